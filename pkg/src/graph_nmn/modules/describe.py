"""Describe: summarize a layer as the attention-weighted sum of its node features."""

from ..graph import AttentionMap
from ..tensor import DimensionError, Tensor, ops


def describe(attention: AttentionMap, node_features: Tensor) -> Tensor:
    """y = X^T a."""
    if len(node_features.shape) != 2 or node_features.shape[0] != len(attention):
        raise DimensionError("describe", attention.weights.shape, node_features.shape)
    return ops.matmul(attention.weights, node_features)
