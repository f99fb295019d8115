"""Error and warning reporting for user-supplied inputs.

Configuration files, annotation files, datasets and checkpoints are all
checked record by record; every violation becomes a `Problem` that names the
file and record it came from.  Loaders collect the problems in a `ResultGen`
and hand back a `Result`, so a user sees every broken record at once instead
of fixing them one run at a time.
"""

from typing import Any, Callable, Generic, Iterable, List, Literal, Optional
from typing import Sequence, Tuple, TypeVar, Union, cast
from .message import I18n, UserMessage, UserMessageData


_T = TypeVar("_T")
_R = TypeVar("_R")
_T_co = TypeVar("_T_co", covariant=True)

# A file name first, then record indices and field names inside it.
SourcePath = Sequence[Union[str, int]]
ProblemLevel = Literal["error", "warning"]
ProblemSource = Union["Problem", Iterable["Problem"]]


class Problem:
    """One complaint about an input file, tied to the record that caused it."""

    __slots__ = ("_source", "_message", "_level")

    def __init__(
        self,
        *,
        source: SourcePath,
        level: ProblemLevel,
        message: UserMessage,
    ) -> None:
        self._source: Tuple[Union[str, int], ...] = tuple(source)
        self._message = message
        self._level = level

    @staticmethod
    def as_validation(
        __source: SourcePath,
        __message: I18n,
        **__arguments: UserMessageData,
    ) -> "Problem":
        """An error: the record cannot be used."""
        return Problem(
            source=__source, level="error", message=UserMessage(__message, **__arguments)
        )

    @staticmethod
    def as_warning(
        __source: SourcePath,
        __message: I18n,
        **__arguments: UserMessageData,
    ) -> "Problem":
        """A warning: the record was used, possibly after dropping part of it."""
        return Problem(
            source=__source, level="warning", message=UserMessage(__message, **__arguments)
        )

    @property
    def is_error(self) -> bool:
        """Does this problem make the input unusable?"""
        return self._level == "error"

    @property
    def is_warning(self) -> bool:
        """Is this only a warning?"""
        return self._level == "warning"

    @property
    def source(self) -> SourcePath:
        """File, then record index or key."""
        return self._source

    def msg(self) -> str:
        """The translated message."""
        return self._message.msg()

    def __repr__(self) -> str:
        where = "/".join(str(part) for part in self._source)
        return f"[{self._level.upper()}] {where} - {self.msg()}"


def _problem_list(sources: Iterable[ProblemSource]) -> Tuple[Problem, ...]:
    ret: List[Problem] = []
    for item in sources:
        if isinstance(item, Problem):
            ret.append(item)
        else:
            ret.extend(item)
    return tuple(ret)


class Result(Generic[_T_co]):
    """A loaded value with its warnings, or the errors that stopped it loading."""

    __slots__ = ("__value", "__problems", "__invalid")

    def __init__(
        self,
        *,
        value: Optional[_T_co],
        problems: Sequence[Problem],
        invalid: bool,
    ) -> None:
        if invalid and value is not None:
            raise ValueError("an invalid result carries no value")
        self.__value = value
        self.__problems = tuple(problems)
        self.__invalid = invalid

    @staticmethod
    def as_value(value: _T, *problems: ProblemSource) -> "Result[_T]":
        """A usable value; warnings may ride along."""
        return Result(value=value, problems=_problem_list(problems), invalid=False)

    @staticmethod
    def as_error(*problems: ProblemSource) -> "Result[_T_co]":
        """No value, only the reasons why."""
        return Result(value=None, problems=_problem_list(problems), invalid=True)

    @property
    def is_valid(self) -> bool:
        """Can the value be used?"""
        return not self.__invalid

    @property
    def is_not_valid(self) -> bool:
        """Did loading fail?"""
        return self.__invalid

    @property
    def problems(self) -> Sequence[Problem]:
        """Every problem, in the order it was found."""
        return self.__problems

    @property
    def errors(self) -> Sequence[Problem]:
        """The problems that are not warnings."""
        return tuple(p for p in self.__problems if p.is_error)

    def map_to(self, callback: Callable[[_T_co], _R]) -> "Result[_R]":
        """Transform a valid value; an invalid result passes through."""
        if self.__invalid:
            return cast(Result[_R], self)
        value = callback(cast(_T_co, self.__value))
        return Result(value=value, problems=self.__problems, invalid=False)

    def map_result(self, callback: "Callable[[_T_co], Result[_R]]") -> "Result[_R]":
        """Run a further check on a valid value; problems from both stages are kept."""
        if self.__invalid:
            return cast(Result[_R], self)
        after = callback(cast(_T_co, self.__value))
        return Result(
            value=after.optional(),
            problems=(*self.__problems, *after.problems),
            invalid=after.is_not_valid,
        )

    def optional(self, default: Optional[_T_co] = None) -> Optional[_T_co]:
        """The value, or the default when loading failed."""
        return default if self.__invalid else self.__value

    def required(self) -> _T_co:
        """The value; raises when loading failed."""
        if self.__invalid:
            errors = "; ".join(repr(p) for p in self.errors)
            raise RuntimeError(f"Value is not valid: {errors}")
        return cast(_T_co, self.__value)


class ResultGen:
    """Collects problems while a loader walks a file."""

    __slots__ = ("__found", "__failed")

    def __init__(self) -> None:
        self.__found: List[Problem] = []
        self.__failed = False

    def is_valid(self) -> bool:
        """Has no error been added yet?"""
        return not self.__failed

    def is_not_valid(self) -> bool:
        """Has an error been added?"""
        return self.__failed

    @property
    def problems(self) -> Sequence[Problem]:
        """Everything added so far."""
        return self.__found

    def add(self, *items: Union[ProblemSource, Result[Any], Iterable[Result[Any]]]) -> "ResultGen":
        """Record problems, or the problems of other results.

        An error-level problem or an invalid result marks the whole load as failed.
        """
        for item in items:
            if isinstance(item, Problem):
                self.__found.append(item)
                self.__failed = self.__failed or item.is_error
            elif isinstance(item, Result):
                self.__found.extend(item.problems)
                self.__failed = self.__failed or item.is_not_valid
            else:
                self.add(*item)
        return self

    def include(self, result: Result[_T], default: _T) -> _T:
        """Take over a sub-result's problems and return its value, or `default` if it failed."""
        self.add(result)
        return cast(_T, result.optional()) if result.is_valid else default

    def build(self, value: _T) -> Result[_T]:
        """Finish with `value`, unless an error was recorded."""
        return self.build_with(lambda: value)

    def build_with(self, callback: Callable[[], _T_co]) -> Result[_T_co]:
        """Finish with the callback's value; it is not called when an error was recorded."""
        if self.__failed:
            return Result.as_error(self.__found)
        return Result.as_value(callback(), self.__found)

    def __repr__(self) -> str:
        state = "failed, " if self.__failed else ""
        return f"ResultGen({state}{len(self.__found)} problems)"
