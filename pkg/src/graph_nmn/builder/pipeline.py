"""All three layers from one image's annotations."""

from typing import Sequence
from .commonsense import (
    DEFAULT_SCORE_A,
    DEFAULT_SCORE_B,
    DEFAULT_TOP_K,
    retrieve_first_order_subgraph,
    score_and_select,
)
from .defs import CaptionTuple, Detection, EmbeddingTable, KnowledgeTriple, normalize_label
from .semantic import build_semantic_graph
from .visual import DEFAULT_MAX_OBJECTS, build_visual_graph
from ..graph import MultiLayerGraph


def build_multilayer_graph(
    *,
    detections: Sequence[Detection],
    captions: Sequence[CaptionTuple],
    store: Sequence[KnowledgeTriple],
    emb: EmbeddingTable,
    max_objects: int = DEFAULT_MAX_OBJECTS,
    a: float = DEFAULT_SCORE_A,
    b: float = DEFAULT_SCORE_B,
    k: int = DEFAULT_TOP_K,
) -> MultiLayerGraph:
    """Visual graph from detections, semantic graph from captions, and the
    commonsense graph retrieved with the kept object labels as keys."""
    visual = build_visual_graph(detections, max_objects)
    kept_labels = set(visual.node_labels)

    object_scores = {}
    for det in detections:
        if det.label in kept_labels:
            key = normalize_label(det.label)
            object_scores[key] = max(det.score, object_scores.get(key, 0.0))

    candidates = retrieve_first_order_subgraph(object_scores.keys(), store)
    return MultiLayerGraph(
        visual=visual,
        semantic=build_semantic_graph(captions, emb),
        commonsense=score_and_select(candidates, object_scores, emb, a=a, b=b, k=k),
    )
