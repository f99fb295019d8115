"""Knowledge retrieval, edge scoring and top-K selection for the commonsense graph."""

from typing import Dict, Iterable, List, Mapping, Sequence, Set, Tuple
import heapq
import logging
import numpy as np
from .defs import EmbeddingTable, KnowledgeTriple, normalize_label
from ..graph import HeteroGraph


_LOG = logging.getLogger(__name__)

DEFAULT_SCORE_A = 0.7
DEFAULT_SCORE_B = 0.3
DEFAULT_TOP_K = 50
EMPTY_LABEL = "<none>"


class ScoredTriple:
    """A triple with its final edge score a * S_l + b * S_t."""

    __slots__ = ("__triple", "__score")

    def __init__(self, triple: KnowledgeTriple, score: float) -> None:
        self.__triple = triple
        self.__score = score

    @property
    def triple(self) -> KnowledgeTriple:
        """The underlying fact."""
        return self.__triple

    @property
    def score(self) -> float:
        """The edge score."""
        return self.__score

    def rank_key(self) -> Tuple[float, str, str, str]:
        """Score descending, then head, relation and tail ascending."""
        return (
            -self.__score,
            normalize_label(self.__triple.head),
            self.__triple.relation,
            normalize_label(self.__triple.tail),
        )

    def __repr__(self) -> str:
        return f"ScoredTriple({self.__triple!r}, {self.__score:.4f})"


def retrieve_first_order_subgraph(
    labels: Iterable[str],
    store: Sequence[KnowledgeTriple],
) -> List[KnowledgeTriple]:
    """Every triple whose head or tail is one of the labels, each once, in store order."""
    keys = {normalize_label(label) for label in labels}
    seen: Set[Tuple[str, str, str]] = set()
    ret: List[KnowledgeTriple] = []
    for triple in store:
        if normalize_label(triple.head) in keys or normalize_label(triple.tail) in keys:
            key = triple.key()
            if key not in seen:
                seen.add(key)
                ret.append(triple)
    return ret


def score_triples(
    triples: Sequence[KnowledgeTriple],
    object_scores: Mapping[str, float],
    a: float = DEFAULT_SCORE_A,
    b: float = DEFAULT_SCORE_B,
) -> List[ScoredTriple]:
    """Score each triple with the S_l of its matching object (max when both ends match)."""
    if a < 0.0 or b < 0.0:
        raise ValueError(f"score weights must be nonnegative, got a={a}, b={b}")
    scores = {normalize_label(label): s for label, s in object_scores.items()}
    ret: List[ScoredTriple] = []
    for triple in triples:
        matched = [
            scores[end]
            for end in (normalize_label(triple.head), normalize_label(triple.tail))
            if end in scores
        ]
        s_l = max(matched) if matched else 0.0
        ret.append(ScoredTriple(triple, a * s_l + b * triple.score))
    return ret


def select_top_k(scored: Sequence[ScoredTriple], k: int) -> List[ScoredTriple]:
    """The K best triples under `ScoredTriple.rank_key`."""
    if k <= 0:
        raise ValueError(f"K must be positive, got {k}")
    return heapq.nsmallest(k, scored, key=ScoredTriple.rank_key)


def score_and_select(
    triples: Sequence[KnowledgeTriple],
    object_scores: Mapping[str, float],
    emb: EmbeddingTable,
    *,
    a: float = DEFAULT_SCORE_A,
    b: float = DEFAULT_SCORE_B,
    k: int = DEFAULT_TOP_K,
) -> HeteroGraph:
    """Keep the top-K scored triples and turn them into the commonsense graph.

    Nodes are the entities of the surviving triples; edge features are the
    relation phrase vector with the edge score appended.  When nothing
    survives, the graph is a single zero node labelled `<none>`.
    """
    if k <= 0:
        raise ValueError(f"K must be positive, got {k}")
    selected = select_top_k(score_triples(triples, object_scores, a, b), k)
    _LOG.debug("commonsense graph: kept %d of %d candidate triples", len(selected), len(triples))
    if not selected:
        _LOG.info("no knowledge triple matched the detected objects")
        return HeteroGraph(
            modality="commonsense",
            node_features=np.zeros((1, emb.dim)),
            node_labels=(EMPTY_LABEL,),
            edges=(),
            edge_features=np.zeros((0, emb.dim + 1)),
        )

    index: Dict[str, int] = {}
    labels: List[str] = []

    def node(name: str) -> int:
        key = normalize_label(name)
        if key not in index:
            index[key] = len(labels)
            labels.append(key)
        return index[key]

    edges = [(node(s.triple.head), node(s.triple.tail)) for s in selected]
    node_features, node_oov = emb.phrase_matrix(labels)
    relation_features, edge_oov = emb.phrase_matrix(s.triple.relation for s in selected)
    if node_oov or edge_oov:
        _LOG.info(
            "commonsense graph: %d unknown node tokens, %d unknown edge tokens (zero vectors)",
            node_oov,
            edge_oov,
        )
    edge_scores = np.array([[s.score] for s in selected])
    return HeteroGraph(
        modality="commonsense",
        node_features=node_features,
        node_labels=labels,
        edges=edges,
        edge_features=np.hstack([relation_features, edge_scores]),
        edge_labels=[s.triple.relation for s in selected],
    )
