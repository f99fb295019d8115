"""Building and normalizing attention maps."""

import numpy as np
from .defs import AttentionMap, HeteroGraph, Modality
from ..tensor import Tensor, ops


# Below this total mass a map is treated as attending nothing.
DEGENERATE_MASS = 1e-12


def uniform_attention(graph: HeteroGraph) -> AttentionMap:
    """Every node weighted 1/n; the reasoning state before the first step."""
    if graph.num_nodes < 1:
        raise ValueError(f"cannot attend over an empty {graph.modality} graph")
    return AttentionMap(graph.modality, uniform_weights(graph.num_nodes))


def uniform_weights(count: int) -> Tensor:
    """A constant vector of `count` entries equal to 1/count."""
    return Tensor(np.full(count, 1.0 / count))


def normalize_weights(weights: Tensor) -> Tensor:
    """Scale nonnegative weights to unit sum; near-zero mass becomes uniform."""
    if np.any(weights.data < 0.0):
        raise ValueError(
            f"attention weights must be nonnegative, got minimum {weights.data.min()!r}"
        )
    mass = float(weights.data.sum())
    if mass < DEGENERATE_MASS:
        return uniform_weights(weights.shape[0])
    return ops.divide(weights, ops.total(weights))


def l1_normalize(attention: AttentionMap) -> AttentionMap:
    """`normalize_weights` applied to a map."""
    return AttentionMap(attention.layer, normalize_weights(attention.weights))


def attention_of(layer: Modality, weights: Tensor) -> AttentionMap:
    """Wrap normalized weights produced by a module."""
    return AttentionMap(layer, normalize_weights(weights))
