"""Test the module."""

import unittest
import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
from graph_nmn.tensor import ParameterStore, backward, ops, recording
from graph_nmn.training import Adam, DivergenceError


class AdamTest(unittest.TestCase):
    """Test the Adam class."""

    def setUp(self) -> None:
        self.store = ParameterStore(np.random.default_rng(0))
        self.weights = self.store.create("w", (3,), 1)

    def test_step__zero_gradient(self) -> None:
        """Zero gradients leave the parameters unchanged."""
        before = np.array(self.weights.data)
        optimizer = Adam(self.store, lr=0.1)
        self.store.zero_grad()
        optimizer.step()
        assert_array_equal(before, self.weights.data)
        self.assertEqual(1, optimizer.step_count)

    def test_step__first_update(self) -> None:
        """The first bias-corrected step moves each entry by about lr against its gradient."""
        before = np.array(self.weights.data)
        optimizer = Adam(self.store, lr=0.01)
        self.store.zero_grad()
        self.weights.accumulate_grad(np.array([2.0, -0.5, 10.0]))
        optimizer.step()
        assert_allclose(before - 0.01 * np.array([1.0, -1.0, 1.0]), self.weights.data, atol=1e-8)

    def test_step__quadratic_bowl(self) -> None:
        """Repeated steps on |w - c|^2 converge to c."""
        target = np.array([0.5, -1.0, 2.0])
        optimizer = Adam(self.store, lr=0.05)
        for _ in range(2000):
            self.store.zero_grad()
            with recording():
                backward(ops.total(ops.square(ops.subtract(self.weights, target))))
            optimizer.step()
        assert_allclose(target, self.weights.data, atol=1e-2)

    def test_step__nan_gradient(self) -> None:
        """A non-finite gradient stops training before any parameter moves."""
        before = np.array(self.weights.data)
        optimizer = Adam(self.store)
        self.store.zero_grad()
        self.weights.accumulate_grad(np.array([0.0, np.nan, 1.0]))
        with self.assertRaises(DivergenceError) as ctx:
            optimizer.step()
        self.assertEqual(
            "gradient of w has 1 non-finite entries at update 1", str(ctx.exception)
        )
        assert_array_equal(before, self.weights.data)

    def test_init__bad_settings(self) -> None:
        """Negative rates and decays outside [0, 1) are refused."""
        with self.assertRaises(ValueError):
            Adam(self.store, lr=-1.0)
        with self.assertRaises(ValueError):
            Adam(self.store, beta1=1.0)
