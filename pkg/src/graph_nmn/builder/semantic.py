"""The semantic graph over caption parses."""

from typing import Dict, List, Sequence, Set, Tuple
import logging
from .defs import CaptionTuple, EmbeddingTable, normalize_label
from ..graph import HeteroGraph


_LOG = logging.getLogger(__name__)

# Relation label on subject -> attribute edges.
ATTRIBUTE_RELATION = "has"


def build_semantic_graph(tuples: Sequence[CaptionTuple], emb: EmbeddingTable) -> HeteroGraph:
    """One node per distinct name or attribute, one edge per distinct relation.

    Attributes of a subject hang off it through a `has` edge.  Node and edge
    features are averaged word vectors of their phrases.
    """
    if not tuples:
        raise ValueError("the semantic graph needs at least one caption tuple")

    index: Dict[str, int] = {}
    labels: List[str] = []

    def node(name: str) -> int:
        key = normalize_label(name)
        if key not in index:
            index[key] = len(labels)
            labels.append(key)
        return index[key]

    seen: Set[Tuple[int, str, int]] = set()
    edges: List[Tuple[int, int]] = []
    relations: List[str] = []

    def connect(src: int, relation: str, dst: int) -> None:
        key = (src, normalize_label(relation), dst)
        if key not in seen:
            seen.add(key)
            edges.append((src, dst))
            relations.append(key[1])

    for item in tuples:
        subject = node(item.subject)
        connect(subject, item.relation, node(item.obj))
        for attribute in item.attributes:
            connect(subject, ATTRIBUTE_RELATION, node(attribute))

    node_features, node_oov = emb.phrase_matrix(labels)
    edge_features, edge_oov = emb.phrase_matrix(relations)
    if node_oov or edge_oov:
        _LOG.info(
            "semantic graph: %d unknown node tokens, %d unknown edge tokens (zero vectors)",
            node_oov,
            edge_oov,
        )
    return HeteroGraph(
        modality="semantic",
        node_features=node_features,
        node_labels=labels,
        edges=edges,
        edge_features=edge_features,
        edge_labels=relations,
    )
