"""Test the module."""

import unittest
import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
from graph_nmn.tensor import DimensionError, Tensor, backward, ops, parameter, recording


class ElementwiseTest(unittest.TestCase):
    """Test the elementwise operations."""

    def test_add__broadcast_gradient(self) -> None:
        """A broadcast operand receives the gradient summed over the broadcast axis."""
        matrix = parameter(np.ones((3, 2)))
        row = parameter(np.array([1.0, 2.0]))
        with recording():
            loss = ops.total(ops.add(matrix, row))
            backward(loss)
        assert_array_equal(np.ones((3, 2)), matrix.grad)
        assert_array_equal([3.0, 3.0], row.grad)

    def test_add__incompatible(self) -> None:
        """Shapes that do not broadcast raise a DimensionError naming both."""
        with self.assertRaises(DimensionError) as ctx:
            ops.add(Tensor(np.ones(3)), Tensor(np.ones(2)))
        self.assertEqual("add: incompatible shapes (3,), (2,)", str(ctx.exception))

    def test_sigmoid__large_inputs(self) -> None:
        """Large magnitudes saturate without overflow."""
        out = ops.sigmoid(Tensor(np.array([-1000.0, 0.0, 1000.0])))
        assert_allclose([0.0, 0.5, 1.0], out.data)
        self.assertTrue(np.all(np.isfinite(out.data)))

    def test_fuse__value(self) -> None:
        """F(x, y) = ReLU(x + y) - (x - y)^2."""
        out = ops.fuse(Tensor(np.array([1.0, -3.0])), Tensor(np.array([2.0, 1.0])))
        assert_allclose([3.0 - 1.0, 0.0 - 16.0], out.data)

    def test_fuse__shape_mismatch(self) -> None:
        """Fusion needs equal shapes."""
        with self.assertRaises(DimensionError):
            ops.fuse(Tensor(np.ones(2)), Tensor(np.ones((2, 1))))


class LinearAlgebraTest(unittest.TestCase):
    """Test products and reductions."""

    def test_matmul__mismatch(self) -> None:
        """Inner dimensions must agree."""
        with self.assertRaises(DimensionError) as ctx:
            ops.matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((2, 3))))
        self.assertEqual("matmul", ctx.exception.op_kind)

    def test_matmul__vector_matrix_gradients(self) -> None:
        """d(x @ W)/dW is the outer product with the output gradient."""
        x = parameter(np.array([1.0, 2.0]))
        w = parameter(np.array([[1.0, 0.0, 2.0], [0.0, 1.0, 1.0]]))
        with recording():
            backward(ops.total(ops.matmul(x, w)))
        assert_allclose([3.0, 2.0], x.grad)
        assert_allclose([[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]], w.grad)

    def test_total__axis(self) -> None:
        """Summing over an axis drops it."""
        out = ops.total(Tensor(np.arange(6.0).reshape(2, 3)), axis=0)
        assert_array_equal([3.0, 5.0, 7.0], out.data)

    def test_mean__value(self) -> None:
        """Mean of every entry."""
        self.assertEqual(2.5, ops.mean(Tensor(np.arange(6.0))).item())


class StructuralTest(unittest.TestCase):
    """Test structural operations."""

    def test_take__row_gradient(self) -> None:
        """Only the selected row receives gradient."""
        x = parameter(np.arange(6.0).reshape(3, 2))
        with recording():
            backward(ops.total(ops.take(x, 1)))
        assert_array_equal([[0.0, 0.0], [1.0, 1.0], [0.0, 0.0]], x.grad)

    def test_take__out_of_range(self) -> None:
        """Indices past the leading axis are rejected."""
        with self.assertRaises(DimensionError):
            ops.take(Tensor(np.ones(3)), 3)

    def test_scatter_matrix__repeated_cells(self) -> None:
        """Values landing on the same cell add up."""
        out = ops.scatter_matrix(
            Tensor(np.array([1.0, 2.0, 4.0])), np.array([0, 0, 1]), np.array([1, 1, 0]), (2, 2)
        )
        assert_array_equal([[0.0, 3.0], [4.0, 0.0]], out.data)

    def test_concat__gradient_split(self) -> None:
        """The gradient of a concatenation is split back per part."""
        a = parameter(np.array([1.0]))
        b = parameter(np.array([2.0, 3.0]))
        weights = Tensor(np.array([1.0, 2.0, 3.0]))
        with recording():
            backward(ops.total(ops.multiply(ops.concat([a, b]), weights)))
        assert_array_equal([1.0], a.grad)
        assert_array_equal([2.0, 3.0], b.grad)


class SoftmaxTest(unittest.TestCase):
    """Test the normalizers."""

    def test_softmax__sums_to_one(self) -> None:
        """Large logits stay finite and sum to one."""
        out = ops.softmax(Tensor(np.array([1000.0, 1001.0, 999.0])))
        self.assertAlmostEqual(1.0, float(out.data.sum()), places=12)
        self.assertEqual(1, int(np.argmax(out.data)))

    def test_softmax__masked_entries(self) -> None:
        """Masked entries get exactly zero probability and no gradient."""
        logits = parameter(np.array([0.5, 2.0, -1.0]))
        mask = np.array([True, False, True])
        with recording():
            out = ops.softmax(logits, mask=mask)
            backward(ops.take(out, 0))
        self.assertEqual(0.0, out.data[1])
        self.assertEqual(0.0, logits.grad[1])
        self.assertAlmostEqual(1.0, float(out.data.sum()), places=12)

    def test_softmax__all_masked(self) -> None:
        """A mask leaving nothing to normalize is an error."""
        with self.assertRaises(ValueError) as ctx:
            ops.softmax(Tensor(np.ones(2)), mask=np.array([False, False]))
        self.assertEqual("softmax mask leaves an empty axis", str(ctx.exception))

    def test_log_softmax__matches_log_of_softmax(self) -> None:
        """The shifted form agrees with the naive one on moderate inputs."""
        logits = Tensor(np.array([0.1, -0.4, 2.0, 0.0]))
        assert_allclose(
            np.log(ops.softmax(logits).data), ops.log_softmax(logits).data, atol=1e-12
        )
