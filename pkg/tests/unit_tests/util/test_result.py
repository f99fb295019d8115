"""Test the module."""

import unittest
from graph_nmn.util.message import i18n
from graph_nmn.util.result import Problem, Result, ResultGen


class ProblemTest(unittest.TestCase):
    """Test the Problem class."""

    def test_repr__validation(self) -> None:
        """The repr names the level, the source path and the formatted message."""
        problem = Problem.as_validation(("a.json", "steps", 3), i18n("bad {x}"), x=4)
        self.assertTrue(problem.is_error)
        self.assertEqual("[ERROR] a.json/steps/3 - bad 4", repr(problem))

    def test_repr__warning(self) -> None:
        """Warnings do not count as errors."""
        problem = Problem.as_warning(("f",), i18n("careful"))
        self.assertTrue(problem.is_warning)
        self.assertFalse(problem.is_error)
        self.assertEqual("[WARNING] f - careful", repr(problem))


class ResultGenTest(unittest.TestCase):
    """Test the ResultGen class."""

    def test_include__invalid_uses_default(self) -> None:
        """An invalid result contributes its problems and the default."""
        res = ResultGen()
        bad: Result[int] = Result.as_error(Problem.as_validation(("x",), i18n("no")))
        self.assertEqual(-1, res.include(bad, -1))
        self.assertEqual(5, res.include(Result.as_value(5), -1))
        built = res.build(0)
        self.assertTrue(built.is_not_valid)
        self.assertEqual(["[ERROR] x - no"], [repr(p) for p in built.problems])

    def test_build__warnings_stay_valid(self) -> None:
        """Warnings are carried on a valid result."""
        res = ResultGen()
        res.add(Problem.as_warning(("x",), i18n("hmm")))
        built = res.build("v")
        self.assertTrue(built.is_valid)
        self.assertEqual("v", built.required())
        self.assertEqual(1, len(built.problems))
        self.assertEqual(0, len(built.errors))

    def test_build_with__not_called_when_invalid(self) -> None:
        """The callback only runs for a valid builder."""
        res = ResultGen()
        res.add(Problem.as_validation(("x",), i18n("no")))
        built = res.build_with(lambda: self.fail("called"))
        self.assertIsNone(built.optional())


class ResultTest(unittest.TestCase):
    """Test the Result class."""

    def test_required__invalid(self) -> None:
        """required() on an invalid result raises with the error list."""
        res: Result[int] = Result.as_error(Problem.as_validation(("p",), i18n("broken")))
        with self.assertRaises(RuntimeError) as ctx:
            res.required()
        self.assertEqual("Value is not valid: [ERROR] p - broken", str(ctx.exception))

    def test_map_result__keeps_earlier_problems(self) -> None:
        """Warnings from the first step survive the second."""
        first = Result.as_value(2, Problem.as_warning(("a",), i18n("w")))
        second = first.map_result(lambda v: Result.as_value(v * 3))
        self.assertEqual(6, second.required())
        self.assertEqual(["[WARNING] a - w"], [repr(p) for p in second.problems])
