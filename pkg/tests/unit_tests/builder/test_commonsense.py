"""Test the module."""

import unittest
from typing import Dict, List, Tuple
import numpy as np
from numpy.testing import assert_allclose
from graph_nmn.builder import (
    CaptionTuple,
    Detection,
    EmbeddingTable,
    KnowledgeTriple,
    build_multilayer_graph,
    normalize_label,
    retrieve_first_order_subgraph,
    score_and_select,
    score_triples,
)


ENTITIES = ("knife", "bread", "cup", "table", "kitchen", "tool", "fork")
RELATIONS = ("UsedFor", "IsA", "AtLocation", "PartOf")
EMB = EmbeddingTable({w: [float(i), 1.0] for i, w in enumerate(ENTITIES)}, 2)


def _triple(head: str, relation: str, tail: str, score: float) -> KnowledgeTriple:
    return KnowledgeTriple(head=head, relation=relation, tail=tail, score=score)


def _random_store(rng: np.random.Generator) -> List[KnowledgeTriple]:
    count = int(rng.integers(1, 1001))
    return [
        _triple(
            str(rng.choice(ENTITIES)),
            str(rng.choice(RELATIONS)),
            str(rng.choice(ENTITIES)),
            # Coarse scores make ties common.
            float(rng.integers(0, 5)) / 4.0,
        )
        for _ in range(count)
    ]


class RetrieveTest(unittest.TestCase):
    """Test retrieve_first_order_subgraph."""

    def test_retrieve__either_end_once(self) -> None:
        """A triple matches through its head or its tail, and duplicates appear once."""
        store = [
            _triple("Knife", "UsedFor", "bread", 0.9),
            _triple("table", "AtLocation", "knife", 0.5),
            _triple("cup", "IsA", "tool", 0.4),
            _triple("knife", "UsedFor", "Bread", 0.9),
        ]
        found = retrieve_first_order_subgraph(["KNIFE"], store)
        self.assertEqual([store[0], store[1]], found)


class ScoreTriplesTest(unittest.TestCase):
    """Test score_triples."""

    def test_score_triples__both_ends_take_max(self) -> None:
        """a * S_l + b * S_t with the larger object score when both ends are detected."""
        scored = score_triples(
            [_triple("knife", "UsedFor", "bread", 0.5), _triple("cup", "IsA", "tool", 1.0)],
            {"knife": 0.4, "bread": 0.8},
            a=0.7,
            b=0.3,
        )
        self.assertAlmostEqual(0.7 * 0.8 + 0.3 * 0.5, scored[0].score)
        self.assertAlmostEqual(0.3, scored[1].score)

    def test_score_triples__negative_weight(self) -> None:
        """Score weights are nonnegative."""
        with self.assertRaises(ValueError):
            score_triples([], {}, a=-0.1)


class ScoreAndSelectTest(unittest.TestCase):
    """Test score_and_select against an exhaustive sort."""

    def _expected(
        self, store: List[KnowledgeTriple], scores: Dict[str, float], k: int
    ) -> List[Tuple[str, str, str, float]]:
        ranked = []
        for triple in store:
            head, tail = normalize_label(triple.head), normalize_label(triple.tail)
            s_l = max([scores[e] for e in (head, tail) if e in scores], default=0.0)
            score = 0.7 * s_l + 0.3 * triple.score
            ranked.append((-score, head, triple.relation, tail))
        ranked.sort()
        return [(h, r, t, -s) for s, h, r, t in ranked[:k]]

    def test_score_and_select__matches_exhaustive_sort(self) -> None:
        """The kept edges are the first K of a full sort, in order, on stores of 1 to 1000."""
        rng = np.random.default_rng(11)
        for trial in range(100):
            store = _random_store(rng)
            scores = {
                str(e): float(rng.random()) for e in rng.choice(ENTITIES, size=2, replace=False)
            }
            k = int(rng.integers(1, len(store) + 2))
            with self.subTest(trial=trial):
                graph = score_and_select(store, scores, EMB, a=0.7, b=0.3, k=k)
                expected = self._expected(store, scores, k)
                self.assertEqual(len(expected), graph.num_edges)
                found = [
                    (
                        graph.node_labels[s],
                        graph.edge_labels[i],
                        graph.node_labels[t],
                    )
                    for i, (s, t) in enumerate(graph.edges.tolist())
                ]
                self.assertEqual([e[:3] for e in expected], found)
                assert_allclose([e[3] for e in expected], graph.edge_features[:, -1])

    def test_score_and_select__nothing_selected(self) -> None:
        """An empty candidate list gives the single `<none>` node."""
        graph = score_and_select([], {"knife": 0.9}, EMB, k=5)
        self.assertEqual(("<none>",), tuple(graph.node_labels))
        self.assertEqual(0, graph.num_edges)
        self.assertEqual(EMB.dim + 1, graph.edge_dim)

    def test_score_and_select__bad_k(self) -> None:
        """K is positive."""
        with self.assertRaises(ValueError) as ctx:
            score_and_select([], {}, EMB, k=0)
        self.assertEqual("K must be positive, got 0", str(ctx.exception))


class BuildMultilayerGraphTest(unittest.TestCase):
    """Test build_multilayer_graph."""

    def test_build_multilayer_graph__dropped_objects_not_keys(self) -> None:
        """Only objects kept in the visual graph retrieve knowledge."""
        detections = [
            Detection(bbox=(0, 0, 5, 5), label="knife", score=0.9, feature=[1.0, 0.0]),
            Detection(bbox=(5, 5, 5, 5), label="cup", score=0.2, feature=[0.0, 1.0]),
        ]
        store = [
            _triple("knife", "UsedFor", "bread", 0.8),
            _triple("cup", "AtLocation", "table", 0.9),
        ]
        graphs = build_multilayer_graph(
            detections=detections,
            captions=[CaptionTuple(subject="knife", relation="on", obj="table")],
            store=store,
            emb=EMB,
            max_objects=1,
            k=10,
        )
        self.assertEqual(("knife",), tuple(graphs.visual.node_labels))
        self.assertEqual(("knife", "bread"), tuple(graphs.commonsense.node_labels))
        self.assertEqual(("UsedFor",), tuple(graphs.commonsense.edge_labels))
        self.assertAlmostEqual(0.7 * 0.9 + 0.3 * 0.8, graphs.commonsense.edge_features[0, -1])
        self.assertEqual(("knife", "table"), tuple(graphs.semantic.node_labels))
