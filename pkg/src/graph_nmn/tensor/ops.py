"""Primitive differentiable operations.

Each operation computes its result with numpy and, when a tape is recording
and an input requires a gradient, records a backward rule mapping the output
gradient to one gradient per input.
"""

from typing import Optional, Sequence, Tuple, Union
import numpy as np
from .tape import BackwardRule, active_tape
from .tensor import ArrayLike, DimensionError, Tensor, as_tensor


Operand = Union[Tensor, ArrayLike]
Axis = Optional[int]


def _apply(
    op_kind: str,
    inputs: Sequence[Tensor],
    out_data: np.ndarray,
    rule: BackwardRule,
) -> Tensor:
    requires = any(t.requires_grad for t in inputs)
    out = Tensor(out_data, requires_grad=requires)
    if requires:
        tape = active_tape()
        if tape is not None:
            tape.record(op_kind, inputs, out, rule)
    return out


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _broadcast_shape(op_kind: str, left: Tensor, right: Tensor) -> None:
    try:
        np.broadcast_shapes(left.shape, right.shape)
    except ValueError as err:
        raise DimensionError(op_kind, left.shape, right.shape) from err


# ---------------------------------------------------------------------------
# Elementwise arithmetic


def add(left: Operand, right: Operand) -> Tensor:
    """Elementwise sum with broadcasting."""
    x, y = as_tensor(left), as_tensor(right)
    _broadcast_shape("add", x, y)
    return _apply(
        "add",
        (x, y),
        x.data + y.data,
        lambda g: (_unbroadcast(g, x.shape), _unbroadcast(g, y.shape)),
    )


def subtract(left: Operand, right: Operand) -> Tensor:
    """Elementwise difference with broadcasting."""
    x, y = as_tensor(left), as_tensor(right)
    _broadcast_shape("subtract", x, y)
    return _apply(
        "subtract",
        (x, y),
        x.data - y.data,
        lambda g: (_unbroadcast(g, x.shape), _unbroadcast(-g, y.shape)),
    )


def multiply(left: Operand, right: Operand) -> Tensor:
    """Elementwise product with broadcasting."""
    x, y = as_tensor(left), as_tensor(right)
    _broadcast_shape("multiply", x, y)
    return _apply(
        "multiply",
        (x, y),
        x.data * y.data,
        lambda g: (_unbroadcast(g * y.data, x.shape), _unbroadcast(g * x.data, y.shape)),
    )


def divide(left: Operand, right: Operand) -> Tensor:
    """Elementwise quotient with broadcasting."""
    x, y = as_tensor(left), as_tensor(right)
    _broadcast_shape("divide", x, y)
    return _apply(
        "divide",
        (x, y),
        x.data / y.data,
        lambda g: (
            _unbroadcast(g / y.data, x.shape),
            _unbroadcast(-g * x.data / (y.data * y.data), y.shape),
        ),
    )


def scale(value: Operand, factor: float) -> Tensor:
    """Multiply by a constant scalar."""
    x = as_tensor(value)
    return _apply("scale", (x,), x.data * factor, lambda g: (g * factor,))


def square(value: Operand) -> Tensor:
    """Elementwise square."""
    x = as_tensor(value)
    return _apply("square", (x,), x.data * x.data, lambda g: (2.0 * x.data * g,))


# ---------------------------------------------------------------------------
# Activations


def relu(value: Operand) -> Tensor:
    """max(0, x)."""
    x = as_tensor(value)
    mask = x.data > 0.0
    return _apply("relu", (x,), np.where(mask, x.data, 0.0), lambda g: (g * mask,))


def tanh(value: Operand) -> Tensor:
    """Hyperbolic tangent."""
    x = as_tensor(value)
    out = np.tanh(x.data)
    return _apply("tanh", (x,), out, lambda g: (g * (1.0 - out * out),))


def sigmoid(value: Operand) -> Tensor:
    """Logistic function, evaluated without overflow for large |x|."""
    x = as_tensor(value)
    out = np.empty_like(x.data)
    pos = x.data >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-x.data[pos]))
    exp_neg = np.exp(x.data[~pos])
    out[~pos] = exp_neg / (1.0 + exp_neg)
    return _apply("sigmoid", (x,), out, lambda g: (g * out * (1.0 - out),))


# ---------------------------------------------------------------------------
# Linear algebra and reductions


def matmul(left: Operand, right: Operand) -> Tensor:
    """Matrix product for 1-D and 2-D operands, following numpy's rules."""
    x, y = as_tensor(left), as_tensor(right)
    if x.data.ndim not in (1, 2) or y.data.ndim not in (1, 2) or x.shape[-1] != y.shape[0]:
        raise DimensionError("matmul", x.shape, y.shape)
    a, b = x.data, y.data

    def rule(g: np.ndarray) -> Sequence[np.ndarray]:
        if a.ndim == 2 and b.ndim == 2:
            return g @ b.T, a.T @ g
        if a.ndim == 2:
            return np.outer(g, b), a.T @ g
        if b.ndim == 2:
            return b @ g, np.outer(a, g)
        return g * b, g * a

    return _apply("matmul", (x, y), np.asarray(a @ b, dtype=np.float64), rule)


def transpose(value: Operand) -> Tensor:
    """Swap the two axes of a matrix."""
    x = as_tensor(value)
    if x.data.ndim != 2:
        raise DimensionError("transpose", x.shape)
    return _apply("transpose", (x,), x.data.T, lambda g: (g.T,))


def reshape(value: Operand, shape: Tuple[int, ...]) -> Tensor:
    """Same entries, new shape."""
    x = as_tensor(value)
    if int(np.prod(shape)) != x.size:
        raise DimensionError("reshape", x.shape, tuple(shape))
    return _apply("reshape", (x,), x.data.reshape(shape), lambda g: (g.reshape(x.shape),))


def total(value: Operand, axis: Axis = None) -> Tensor:
    """Sum over one axis, or over everything."""
    x = as_tensor(value)
    if axis is not None and not -x.data.ndim <= axis < x.data.ndim:
        raise DimensionError("sum", x.shape)

    def rule(g: np.ndarray) -> Sequence[np.ndarray]:
        if axis is None:
            return (np.broadcast_to(g, x.shape).copy(),)
        return (np.broadcast_to(np.expand_dims(g, axis), x.shape).copy(),)

    return _apply("sum", (x,), np.asarray(x.data.sum(axis=axis)), rule)


def mean(value: Operand) -> Tensor:
    """Mean of every entry."""
    x = as_tensor(value)
    return scale(total(x), 1.0 / x.size)


# ---------------------------------------------------------------------------
# Structural operations


def concat(values: Sequence[Operand]) -> Tensor:
    """Join 1-D tensors end to end."""
    parts = [as_tensor(v) for v in values]
    if not parts or any(p.data.ndim != 1 for p in parts):
        raise DimensionError("concat", *[p.shape for p in parts])
    bounds = np.cumsum([0] + [p.size for p in parts])

    def rule(g: np.ndarray) -> Sequence[np.ndarray]:
        return [g[bounds[i] : bounds[i + 1]] for i in range(len(parts))]

    return _apply("concat", parts, np.concatenate([p.data for p in parts]), rule)


def stack(values: Sequence[Operand]) -> Tensor:
    """Stack same-shape tensors along a new leading axis."""
    parts = [as_tensor(v) for v in values]
    if not parts or any(p.shape != parts[0].shape for p in parts):
        raise DimensionError("stack", *[p.shape for p in parts])
    return _apply(
        "stack",
        parts,
        np.stack([p.data for p in parts]),
        lambda g: [g[i] for i in range(len(parts))],
    )


def repeat_rows(value: Operand, count: int) -> Tensor:
    """Stack `count` copies of a 1-D tensor into a matrix."""
    x = as_tensor(value)
    if x.data.ndim != 1 or count <= 0:
        raise DimensionError("repeat_rows", x.shape, (count,))
    return _apply(
        "repeat_rows",
        (x,),
        np.broadcast_to(x.data, (count, x.size)).copy(),
        lambda g: (g.sum(axis=0),),
    )


def take(value: Operand, index: int) -> Tensor:
    """Select one entry (1-D) or one row (2-D) along the leading axis."""
    x = as_tensor(value)
    if not -x.shape[0] <= index < x.shape[0]:
        raise DimensionError("take", x.shape, (index,))

    def rule(g: np.ndarray) -> Sequence[np.ndarray]:
        ret = np.zeros_like(x.data)
        ret[index] = g
        return (ret,)

    return _apply("take", (x,), np.asarray(x.data[index]), rule)


def scatter_matrix(
    values: Operand,
    rows: np.ndarray,
    cols: np.ndarray,
    shape: Tuple[int, int],
) -> Tensor:
    """Place edge values into a dense matrix, zero elsewhere; repeated cells add up."""
    x = as_tensor(values)
    if x.data.ndim != 1 or len(rows) != x.size or len(cols) != x.size:
        raise DimensionError("scatter_matrix", x.shape, (len(rows),), (len(cols),))
    out = np.zeros(shape, dtype=np.float64)
    np.add.at(out, (rows, cols), x.data)
    return _apply("scatter_matrix", (x,), out, lambda g: (g[rows, cols],))


# ---------------------------------------------------------------------------
# Normalizers


def softmax(value: Operand, axis: int = -1, mask: Optional[np.ndarray] = None) -> Tensor:
    """Softmax along an axis, stabilized by subtracting the maximum.

    Entries where `mask` is False get probability exactly 0 and no gradient.
    """
    x = as_tensor(value)
    if x.data.ndim == 0 or x.shape[axis] == 0:
        raise ValueError("softmax over an empty axis")
    logits = x.data
    if mask is not None:
        mask = np.broadcast_to(np.asarray(mask, dtype=bool), x.shape)
        if not np.all(np.any(mask, axis=axis)):
            raise ValueError("softmax mask leaves an empty axis")
        logits = np.where(mask, logits, -np.inf)
    shifted = logits - np.max(logits, axis=axis, keepdims=True)
    exp = np.exp(shifted)
    out = exp / exp.sum(axis=axis, keepdims=True)

    def rule(g: np.ndarray) -> Sequence[np.ndarray]:
        return (out * (g - (g * out).sum(axis=axis, keepdims=True)),)

    return _apply("softmax", (x,), out, rule)


def log_softmax(value: Operand, axis: int = -1) -> Tensor:
    """log(softmax(x)), computed with the log-sum-exp shift."""
    x = as_tensor(value)
    if x.data.ndim == 0 or x.shape[axis] == 0:
        raise ValueError("log_softmax over an empty axis")
    shifted = x.data - np.max(x.data, axis=axis, keepdims=True)
    out = shifted - np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
    probs = np.exp(out)

    def rule(g: np.ndarray) -> Sequence[np.ndarray]:
        return (g - probs * g.sum(axis=axis, keepdims=True),)

    return _apply("log_softmax", (x,), out, rule)


def fuse(left: Operand, right: Operand) -> Tensor:
    """Multimodal fusion F(x, y) = ReLU(x + y) - (x - y)^2."""
    x, y = as_tensor(left), as_tensor(right)
    if x.shape != y.shape:
        raise DimensionError("fuse", x.shape, y.shape)
    return subtract(relu(add(x, y)), square(subtract(x, y)))
