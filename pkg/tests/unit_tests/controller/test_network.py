"""Test the module."""

import unittest
from typing import Dict
import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
from helpers.graphs import mk_multilayer, mk_random_graph
from graph_nmn.builder import EmbeddingTable
from graph_nmn.controller import (
    GraphModuleNetwork,
    create_answer_params,
    create_network,
    layer_dims,
    predict_answer,
)
from graph_nmn.graph import MODALITIES, PLACEHOLDER_LABEL, Modality, MultiLayerGraph
from graph_nmn.tensor import DimensionError, ParameterStore, Tensor, backward, recording
from graph_nmn.training import cross_entropy_loss


WORDS = ("what", "is", "the", "red", "thing", "used", "for")
ANSWERS = ("cutting", "sitting", "reading")
QUESTION = ("what", "is", "the", "red", "thing", "used", "for")
WIDTHS = (3, 2, 5)


def _network(seed: int, **kwargs: object) -> GraphModuleNetwork:
    rng = np.random.default_rng(100)
    emb = EmbeddingTable({w: rng.normal(size=4) for w in WORDS}, 4)
    graphs = mk_multilayer(np.random.default_rng(0))
    return create_network(
        np.random.default_rng(seed),
        dims=layer_dims(graphs),
        emb=emb,
        answers=ANSWERS,
        model_dim=5,
        max_question_length=10,
        **kwargs,  # type: ignore[arg-type]
    )


class RunReasoningTest(unittest.TestCase):
    """Test run_reasoning through the network."""

    def setUp(self) -> None:
        self.graphs = mk_multilayer(np.random.default_rng(0))

    def test_run__trace_shape(self) -> None:
        """One record per step, each holding distributions over the right things."""
        network = _network(1, steps=4)
        logits, trace = network.run(self.graphs, QUESTION)
        self.assertEqual((3,), logits.shape)
        self.assertEqual(4, len(trace.steps))
        self.assertEqual(ANSWERS[int(np.argmax(logits.data))], trace.answer)
        for record in trace.steps:
            self.assertEqual(len(network.inventory), len(record.module_weights))
            self.assertAlmostEqual(1.0, float(record.module_weights.sum()), places=12)
            self.assertEqual(10, len(record.word_attention))
            self.assertIn(record.argmax_token, QUESTION)
            for modality in MODALITIES:
                layer = record.layer(modality)
                self.assertEqual(tuple(self.graphs.layer(modality).node_labels), layer.labels)
                self.assertAlmostEqual(1.0, float(layer.weights.sum()), places=9)

    def test_run__deterministic(self) -> None:
        """Same seed, same logits, bit for bit; a different seed differs."""
        first, _ = _network(7).run(self.graphs, QUESTION)
        second, _ = _network(7).run(self.graphs, QUESTION)
        other, _ = _network(8).run(self.graphs, QUESTION)
        assert_array_equal(first.data, second.data)
        self.assertFalse(np.array_equal(first.data, other.data))

    def test_run__graph_ablation(self) -> None:
        """An ablated layer is reasoned over as its single placeholder node."""
        _, trace = _network(1, steps=2).run(self.graphs, QUESTION, ["kg"])
        layer = trace.final_attention("commonsense")
        self.assertEqual((PLACEHOLDER_LABEL,), layer.labels)
        assert_allclose([1.0], layer.weights, rtol=1e-12)

    def test_run__module_ablation(self) -> None:
        """Ablated module kinds get zero weight at every step."""
        network = _network(1, steps=3, ablate=["relate", "and"])
        _, trace = network.run(self.graphs, QUESTION)
        for record in trace.steps:
            for name, weight in zip(record.module_names, record.module_weights):
                if name.startswith(("relate.", "and.")):
                    self.assertEqual(0.0, weight)
        _, unablated = network.run(self.graphs, QUESTION, ())
        first = unablated.steps[0]
        relate_weights = [
            w for n, w in zip(first.module_names, first.module_weights) if n.startswith("relate.")
        ]
        self.assertTrue(all(w > 0.0 for w in relate_weights))

    def test_run__wrong_graph_widths(self) -> None:
        """Graphs with other feature widths than the network was built for are refused."""
        network = _network(1)
        graphs = MultiLayerGraph(
            visual=mk_random_graph(np.random.default_rng(0), "visual", 3, node_dim=7),
            semantic=self.graphs.semantic,
            commonsense=self.graphs.commonsense,
        )
        with self.assertRaises(DimensionError):
            network.run(graphs, QUESTION)

    def test_run__gradients_reach_every_kind(self) -> None:
        """A loss on the answer sends gradient into the encoder, controller, modules and head."""
        network = _network(3, steps=3)
        network.store.zero_grad()
        with recording():
            logits, _ = network.run(self.graphs, QUESTION)
            backward(cross_entropy_loss(logits, 0))
        for prefix in ("encoder.", "controller.", "modules.visual.find.", "answer."):
            grads = [t.grad for n, t in network.store.items() if n.startswith(prefix)]
            self.assertTrue(any(g is not None and np.any(g != 0.0) for g in grads), prefix)

    def test_answer_index__unknown(self) -> None:
        """Answers outside the vocabulary are refused."""
        network = _network(1)
        self.assertEqual(1, network.answer_index("sitting"))
        with self.assertRaises(ValueError):
            network.answer_index("flying")

    def test_create_network__no_answers(self) -> None:
        """An empty vocabulary cannot be predicted."""
        with self.assertRaises(ValueError):
            create_network(
                np.random.default_rng(0),
                dims=layer_dims(self.graphs),
                emb=EmbeddingTable({}, 4),
                answers=(),
                model_dim=4,
            )


class PredictAnswerTest(unittest.TestCase):
    """Test predict_answer on its own."""

    def setUp(self) -> None:
        self.rng = np.random.default_rng(4)
        self.store = ParameterStore(self.rng)
        self.params = create_answer_params(
            self.store,
            "answer",
            node_dims=dict(zip(MODALITIES, WIDTHS)),
            question_dim=4,
            model_dim=16,
            answer_count=7,
        )
        self.summaries: Dict[Modality, Tensor] = {
            m: Tensor(self.rng.normal(size=w)) for m, w in zip(MODALITIES, WIDTHS)
        }
        self.question = Tensor(self.rng.normal(size=4))

    def test_predict_answer__every_input_counts(self) -> None:
        """One logit per answer, and each summary and the question move them."""
        base = predict_answer(self.params, self.summaries, self.question).data
        self.assertEqual((7,), base.shape)
        for modality in MODALITIES:
            changed = dict(self.summaries)
            changed[modality] = Tensor(self.summaries[modality].data + 1.0)
            moved = predict_answer(self.params, changed, self.question).data
            self.assertFalse(np.array_equal(base, moved), modality)
        moved = predict_answer(self.params, self.summaries, Tensor(self.question.data + 1.0)).data
        self.assertFalse(np.array_equal(base, moved))

    def test_predict_answer__wrong_width(self) -> None:
        """A summary of the wrong width is refused."""
        summaries = dict(self.summaries)
        summaries["semantic"] = Tensor(np.zeros(3))
        with self.assertRaises(DimensionError):
            predict_answer(self.params, summaries, self.question)

    def test_create_answer_params__empty(self) -> None:
        """An empty vocabulary cannot be predicted."""
        with self.assertRaises(ValueError):
            create_answer_params(
                self.store,
                "other",
                node_dims=dict(zip(MODALITIES, WIDTHS)),
                question_dim=4,
                model_dim=16,
                answer_count=0,
            )
