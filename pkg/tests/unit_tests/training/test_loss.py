"""Test the module."""

import math
import unittest
import numpy as np
from graph_nmn.tensor import DimensionError, Tensor
from graph_nmn.training import cross_entropy_loss


class CrossEntropyLossTest(unittest.TestCase):
    """Test cross_entropy_loss."""

    def test_cross_entropy_loss__uniform(self) -> None:
        """Equal logits over four classes cost ln 4."""
        loss = cross_entropy_loss(Tensor(np.zeros(4)), 2)
        self.assertAlmostEqual(math.log(4.0), loss.item(), places=12)

    def test_cross_entropy_loss__confident(self) -> None:
        """A large margin on the right class costs almost nothing."""
        loss = cross_entropy_loss(Tensor(np.array([0.0, 40.0, 0.0])), 1)
        self.assertLess(loss.item(), 1e-15)
        self.assertGreaterEqual(loss.item(), 0.0)

    def test_cross_entropy_loss__bad_label(self) -> None:
        """The label must index a class."""
        with self.assertRaises(ValueError) as ctx:
            cross_entropy_loss(Tensor(np.zeros(3)), 3)
        self.assertEqual("label 3 is not a class index below 3", str(ctx.exception))
        with self.assertRaises(ValueError):
            cross_entropy_loss(Tensor(np.zeros(3)), True)

    def test_cross_entropy_loss__not_vector(self) -> None:
        """Logits are a vector."""
        with self.assertRaises(DimensionError):
            cross_entropy_loss(Tensor(np.zeros((2, 2))), 0)
