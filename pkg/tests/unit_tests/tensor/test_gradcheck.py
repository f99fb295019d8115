"""Test the module."""

import unittest
import numpy as np
from graph_nmn.tensor import (
    NonDeterministicError,
    Tensor,
    create_mlp,
    grad_check,
    grad_check_many,
    mlp_forward,
    ParameterStore,
    ops,
    parameter,
)


class GradCheckTest(unittest.TestCase):
    """Test the finite-difference checker against the primitive operations."""

    def setUp(self) -> None:
        self.rng = np.random.default_rng(7)

    def test_grad_check__elementwise_ops(self) -> None:
        """Every elementwise operation agrees with central differences."""
        x = parameter(self.rng.normal(size=5) + 0.1)
        y = parameter(self.rng.uniform(0.5, 2.0, size=5))
        direction = Tensor(self.rng.normal(size=5))
        for name, op in (
            ("add", lambda: ops.add(x, y)),
            ("multiply", lambda: ops.multiply(x, y)),
            ("divide", lambda: ops.divide(x, y)),
            ("tanh", lambda: ops.tanh(x)),
            ("sigmoid", lambda: ops.sigmoid(x)),
            ("square", lambda: ops.square(x)),
            ("fuse", lambda: ops.fuse(x, y)),
        ):
            with self.subTest(op=name):
                report = grad_check(
                    lambda op=op: ops.total(ops.multiply(op(), direction)), x, name=name
                )
                self.assertTrue(report.passed, repr(report))
                self.assertEqual(5, report.checked)

    def test_grad_check__normalizers(self) -> None:
        """softmax, masked softmax and log_softmax agree with central differences."""
        x = parameter(self.rng.normal(size=6))
        mask = np.array([True, True, False, True, False, True])
        direction = Tensor(self.rng.normal(size=6))
        for name, op in (
            ("softmax", lambda: ops.softmax(x)),
            ("masked", lambda: ops.softmax(x, mask=mask)),
            ("log_softmax", lambda: ops.log_softmax(x)),
        ):
            with self.subTest(op=name):
                report = grad_check(lambda op=op: ops.total(ops.multiply(op(), direction)), x)
                self.assertTrue(report.passed, repr(report))

    def test_grad_check_many__mlp(self) -> None:
        """A two-layer perceptron passes for its weights and its input."""
        store = ParameterStore(self.rng)
        mlp = create_mlp(store, "f", [3, 4, 2], "tanh")
        x = parameter(self.rng.normal(size=(5, 3)))
        direction = Tensor(self.rng.normal(size=(5, 2)))
        reports = grad_check_many(
            lambda: ops.total(ops.multiply(mlp_forward(mlp, x), direction)),
            [*store.items(), ("x", x)],
        )
        self.assertEqual(["f.w0", "f.b0", "f.w1", "f.b1", "x"], [r.name for r in reports])
        self.assertTrue(all(r.passed for r in reports), repr(reports))

    def test_grad_check__max_coords(self) -> None:
        """Only the requested number of coordinates is compared."""
        x = parameter(self.rng.normal(size=(4, 4)))
        report = grad_check(lambda: ops.total(ops.square(x)), x, max_coords=3, rng=self.rng)
        self.assertEqual(3, report.checked)

    def test_grad_check__wrong_gradient_fails(self) -> None:
        """A rule that drops a factor is caught."""
        x = parameter(np.array([0.5, 1.5]))

        def wrong() -> Tensor:
            # detach hides the dependence through one factor from the tape
            return ops.total(ops.multiply(x, x.detach()))

        report = grad_check(wrong, x)
        self.assertFalse(report.passed)
        self.assertAlmostEqual(0.5, report.max_error, places=6)

    def test_grad_check__nondeterministic(self) -> None:
        """A function changing between calls is refused."""
        x = parameter(np.ones(2))
        calls = []

        def drifting() -> Tensor:
            calls.append(1)
            return ops.total(ops.scale(x, float(len(calls))))

        with self.assertRaises(NonDeterministicError):
            grad_check(drifting, x)
