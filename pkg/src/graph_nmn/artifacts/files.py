"""Reading and writing the JSON and text files every artifact is stored in."""

from typing import Any, Callable, Sequence, TypeVar
import json
import logging
import os
from ..util.message import UserMessage
from ..util.message import i18n as _
from ..util.result import Problem, Result, SourcePath


_LOG = logging.getLogger(__name__)
_T = TypeVar("_T")


def read_problem(path: str, err: BaseException) -> Problem:
    """The problem reported when a file cannot be read at all."""
    return Problem(
        source=(path,),
        level="error",
        message=UserMessage(_("could not read file: {err}"), err=err),
    )


def read_text(path: str) -> Result[str]:
    """The whole file as UTF-8 text."""
    try:
        with open(path, "r", encoding="UTF-8") as inp:
            return Result.as_value(inp.read())
    except (OSError, UnicodeDecodeError) as err:
        return Result.as_error(read_problem(path, err))


def read_lines(path: str) -> Result[Sequence[str]]:
    """The lines of a text file, without their line endings."""
    return read_text(path).map_to(lambda text: text.splitlines())


def parse_json(text: str, source: SourcePath) -> Result[Any]:
    """Decode one JSON document."""
    try:
        return Result.as_value(json.loads(text))
    except json.JSONDecodeError as err:
        return Result.as_error(
            Problem.as_validation(
                (*source, err.lineno),
                _("not valid JSON: {msg}"),
                msg=err.msg,
            )
        )


def read_json(path: str) -> Result[Any]:
    """Decode a JSON file."""
    return read_text(path).map_result(lambda text: parse_json(text, (path,)))


def write_text(path: str, text: str) -> None:
    """Write a file, creating its directory."""
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="UTF-8") as out:
        out.write(text)
    _LOG.info("wrote %s", path)


def write_json(path: str, data: Any) -> None:
    """Write a JSON document with stable key order."""
    write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")


def write_lines(path: str, lines: Sequence[str]) -> None:
    """Write one entry per line."""
    write_text(path, "".join(line + "\n" for line in lines))


def expect(
    value: Any,
    check: Callable[[Any], bool],
    source: SourcePath,
    expected: str,
) -> Result[Any]:
    """The value when the check passes, otherwise a problem naming what was expected."""
    if check(value):
        return Result.as_value(value)
    return Result.as_error(
        Problem.as_validation(
            source,
            _("expected {expected}, found {value}"),
            expected=expected,
            value=_short_repr(value),
        )
    )


def _short_repr(value: Any) -> str:
    ret = repr(value)
    if len(ret) > 60:
        return ret[:57] + "..."
    return ret


def is_number(value: Any) -> bool:
    """JSON numbers, excluding booleans."""
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def is_number_list(value: Any) -> bool:
    """A JSON array of numbers."""
    return isinstance(value, list) and all(is_number(v) for v in value)


def is_string_list(value: Any) -> bool:
    """A JSON array of strings."""
    return isinstance(value, list) and all(isinstance(v, str) for v in value)


def is_text(value: Any) -> bool:
    """A non-empty string."""
    return isinstance(value, str) and bool(value.strip())
