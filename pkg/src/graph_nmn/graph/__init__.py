"""Graph layers, the three-layer container and attention maps."""

from .defs import (
    AttentionMap,
    HeteroGraph,
    MultiLayerGraph,
    Modality,
    MODALITIES,
    PLACEHOLDER_LABEL,
)
from .attention import (
    DEGENERATE_MASS,
    attention_of,
    l1_normalize,
    normalize_weights,
    uniform_attention,
    uniform_weights,
)
from .validation import validate_graph
