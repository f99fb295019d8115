"""Graph construction from detector, caption-parse and knowledge-base outputs."""

from .defs import (
    DEFAULT_RELATIONS,
    CaptionTuple,
    Detection,
    EmbeddingTable,
    KnowledgeTriple,
    normalize_label,
    tokenize,
)
from .visual import DEFAULT_MAX_OBJECTS, build_visual_graph, iou, spatial_edge_feature
from .semantic import ATTRIBUTE_RELATION, build_semantic_graph
from .commonsense import (
    DEFAULT_SCORE_A,
    DEFAULT_SCORE_B,
    DEFAULT_TOP_K,
    ScoredTriple,
    retrieve_first_order_subgraph,
    score_and_select,
    score_triples,
    select_top_k,
)
from .pipeline import build_multilayer_graph
