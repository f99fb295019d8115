"""Test the module."""

import unittest
import numpy as np
from numpy.testing import assert_allclose
from graph_nmn.builder import (
    ATTRIBUTE_RELATION,
    CaptionTuple,
    EmbeddingTable,
    build_semantic_graph,
    normalize_label,
    tokenize,
)


EMB = EmbeddingTable(
    {
        "man": [1.0, 0.0],
        "horse": [0.0, 1.0],
        "riding": [1.0, 1.0],
        "brown": [0.5, 0.5],
        "has": [0.0, 0.2],
    },
    2,
)


class TokenizeTest(unittest.TestCase):
    """Test the text helpers."""

    def test_tokenize__camel_case(self) -> None:
        """Relation names split at case changes and underscores."""
        self.assertEqual(("used", "for"), tokenize("UsedFor"))
        self.assertEqual(("at", "location", "x"), tokenize("AtLocation_x"))

    def test_normalize_label__whitespace(self) -> None:
        """Case and inner whitespace are folded."""
        self.assertEqual("red apple", normalize_label("  Red   Apple "))


class EmbeddingTableTest(unittest.TestCase):
    """Test the EmbeddingTable class."""

    def test_vector__unknown(self) -> None:
        """Unknown words are zero vectors."""
        assert_allclose([0.0, 0.0], EMB.vector("zebra"))
        assert_allclose([1.0, 0.0], EMB.vector("Man"))

    def test_phrase_vector__average(self) -> None:
        """Phrases average their tokens and count the unknown ones."""
        vec, oov = EMB.phrase_vector("brown zebra horse")
        assert_allclose([0.5 / 3.0, 1.5 / 3.0], vec)
        self.assertEqual(1, oov)

    def test_init__wrong_width(self) -> None:
        """Every vector has the table's width."""
        with self.assertRaises(ValueError):
            EmbeddingTable({"a": [1.0]}, 2)


class BuildSemanticGraphTest(unittest.TestCase):
    """Test build_semantic_graph."""

    def test_build_semantic_graph__attributes_and_duplicates(self) -> None:
        """Nodes are distinct names; repeated relations collapse; attributes hang off `has`."""
        graph = build_semantic_graph(
            [
                CaptionTuple(subject="Man", relation="riding", obj="horse"),
                CaptionTuple(subject="man", relation="riding", obj="Horse", attributes=["brown"]),
            ],
            EMB,
        )
        self.assertEqual(("man", "horse", "brown"), tuple(graph.node_labels))
        self.assertEqual([[0, 1], [0, 2]], graph.edges.tolist())
        self.assertEqual(("riding", ATTRIBUTE_RELATION), tuple(graph.edge_labels))
        assert_allclose([[1.0, 1.0], [0.0, 0.2]], graph.edge_features)
        assert_allclose(EMB.vector("horse"), graph.node_features[1])

    def test_build_semantic_graph__unknown_words(self) -> None:
        """Out-of-vocabulary names get zero features but still become nodes."""
        graph = build_semantic_graph(
            [CaptionTuple(subject="zebra", relation="near", obj="man")], EMB
        )
        self.assertEqual(2, graph.num_nodes)
        self.assertFalse(np.any(graph.node_features[0]))

    def test_build_semantic_graph__empty(self) -> None:
        """No tuples cannot make a graph."""
        with self.assertRaises(ValueError):
            build_semantic_graph([], EMB)
