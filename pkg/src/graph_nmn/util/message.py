"""Translatable text shown to the person running the tool."""

from typing import Iterable, NewType, Optional, Union
import gettext


Scalar = Union[str, int, float, bool, None, BaseException]
UserMessageData = Union[Scalar, Iterable[str], Iterable[int], Iterable[float]]
I18n = NewType("I18n", str)


def i18n(message: str) -> I18n:
    """Mark a template for message extraction; modules import it `as _`."""
    return I18n(message)


class UserMessage:
    """A `str.format` template and its arguments, translated when first displayed.

    Loaders create one for every bad record they meet, and most are never
    printed, so nothing is formatted up front.
    """

    __slots__ = ("__template", "__args", "__text")

    def __init__(self, __template: I18n, **__arguments: UserMessageData) -> None:
        self.__template = __template
        self.__args = __arguments
        self.__text: Optional[str] = None

    def msg(self) -> str:
        """The translated, formatted text."""
        if self.__text is None:
            self.__text = gettext.gettext(self.__template).format(**self.__args)
        return self.__text

    def __repr__(self) -> str:
        args = "".join(f", {key}={value!r}" for key, value in self.__args.items())
        return f"UserMessage({self.__template!r}{args})"
