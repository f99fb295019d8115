"""Soft execution of every module at one reasoning step."""

from typing import Dict, Mapping, Optional, Sequence
import numpy as np
from ..graph import MODALITIES, AttentionMap, Modality, normalize_weights
from ..modules import StepInputs
from ..tensor import DimensionError, Tensor, ops
from .inventory import ModuleInventory


# A weighted average of distributions has unit mass up to rounding; only drift
# beyond this is renormalized, so exact inputs give exact outputs.
MASS_DRIFT = 1e-9


def execute_step(
    inventory: ModuleInventory,
    inputs: StepInputs,
    module_weights: Tensor,
    enabled: Optional[np.ndarray] = None,
) -> Dict[Modality, AttentionMap]:
    """a_t = sum_m w_m a_m for each layer, with w renormalized inside the layer's partition.

    Every enabled module runs; disabled ones (see `ModuleInventory.enabled`)
    are skipped and take no part in the average.
    """
    if module_weights.shape != (len(inventory),):
        raise DimensionError("execute_step", module_weights.shape, (len(inventory),))
    if enabled is None:
        enabled = np.ones(len(inventory), dtype=bool)
    ret: Dict[Modality, AttentionMap] = {}
    for modality in MODALITIES:
        active = [i for i in inventory.partition(modality) if enabled[i]]
        if not active:
            raise ValueError(f"every module writing to {modality} is disabled")
        ret[modality] = _partition_average(
            modality,
            [inventory.modules[i].execute(inputs) for i in active],
            ops.stack([ops.take(module_weights, i) for i in active]),
        )
    return ret


def _partition_average(
    modality: Modality,
    outputs: Sequence[AttentionMap],
    weights: Tensor,
) -> AttentionMap:
    local = normalize_weights(weights)
    mixed = ops.matmul(local, ops.stack([out.weights for out in outputs]))
    if abs(float(mixed.data.sum()) - 1.0) > MASS_DRIFT:
        mixed = normalize_weights(mixed)
    return AttentionMap(modality, mixed)


def partition_mass(
    inventory: ModuleInventory, module_weights: np.ndarray
) -> Mapping[Modality, float]:
    """Raw controller weight falling on each layer's partition, before renormalization."""
    return {
        modality: float(np.sum(module_weights[list(inventory.partition(modality))]))
        for modality in MODALITIES
    }
