"""Classification loss."""

from ..tensor import DimensionError, Tensor, ops


def cross_entropy_loss(logits: Tensor, label: int) -> Tensor:
    """-log softmax(logits)[label]."""
    if len(logits.shape) != 1:
        raise DimensionError("cross_entropy_loss", logits.shape)
    if isinstance(label, bool) or not 0 <= label < logits.shape[0]:
        raise ValueError(f"label {label!r} is not a class index below {logits.shape[0]}")
    return ops.scale(ops.take(ops.log_softmax(logits), int(label)), -1.0)
