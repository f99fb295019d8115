"""Test the module."""

import os
import tempfile
import unittest
from numpy.testing import assert_array_equal
from graph_nmn.artifacts import (
    ANSWERS_FILE,
    TRAIN_FILE,
    load_dataset,
    parse_task,
    save_dataset,
    task_to_json,
)
from graph_nmn.graph import MODALITIES
from graph_nmn.training import TrainConfig, create_model, generate_dataset


class DatasetFilesTest(unittest.TestCase):
    """Test saving and loading dataset directories."""

    def setUp(self) -> None:
        self.config = TrainConfig(
            family="mixed", train_size=4, test_size=3, embedding_dim=4, model_dim=4, steps=2
        )
        self.dataset = generate_dataset(self.config)

    def test_save_dataset__reloads(self) -> None:
        """A saved dataset loads back to the same tasks and the same logits."""
        with tempfile.TemporaryDirectory() as tmp:
            save_dataset(self.dataset, tmp)
            loaded = load_dataset(tmp).required()
        self.assertEqual(tuple(self.dataset.answers), tuple(loaded.answers))
        self.assertEqual(len(self.dataset.train), len(loaded.train))
        for before, after in zip(self.dataset.test, loaded.test):
            self.assertEqual(tuple(before.tokens), tuple(after.tokens))
            self.assertEqual(before.answer, after.answer)
            self.assertEqual(before.hops, after.hops)
            self.assertEqual(tuple(before.program), tuple(after.program))
            for modality in MODALITIES:
                old, new = before.graphs.layer(modality), after.graphs.layer(modality)
                assert_array_equal(old.node_features, new.node_features)
                assert_array_equal(old.edges, new.edges)
                self.assertEqual(tuple(old.edge_labels), tuple(new.edge_labels))
        network = create_model(self.config, self.dataset)
        task, again = self.dataset.test[0], loaded.test[0]
        first, _ = network.run(task.graphs, task.tokens)
        second, _ = network.run(again.graphs, again.tokens)
        assert_array_equal(first.data, second.data)

    def test_load_dataset__vocabulary(self) -> None:
        """Answers missing from the vocabulary are reported."""
        with tempfile.TemporaryDirectory() as tmp:
            save_dataset(self.dataset, tmp)
            answers_path = os.path.join(tmp, ANSWERS_FILE)
            with open(answers_path, "w", encoding="utf-8") as out:
                out.write("nothing\n")
            res = load_dataset(tmp)
        self.assertTrue(res.is_not_valid)
        self.assertTrue(
            all(repr(p).startswith(f"[ERROR] {answers_path} - ") for p in res.problems)
        )
        self.assertEqual(
            len(self.dataset.train) + len(self.dataset.test), len(res.problems)
        )

    def test_load_dataset__missing(self) -> None:
        """A directory without the dataset files is refused."""
        with tempfile.TemporaryDirectory() as tmp:
            res = load_dataset(tmp)
            self.assertTrue(res.is_not_valid)
            self.assertTrue(
                repr(res.problems[0]).startswith(
                    f"[ERROR] {os.path.join(tmp, TRAIN_FILE)} - could not read file"
                )
            )

    def test_parse_task__wrong_answer(self) -> None:
        """A stored answer must match what the program derives."""
        task = self.dataset.train[0]
        data = task_to_json(task)
        data["answer"] = "purple haze"
        res = parse_task(data, ("t.jsonl", 1))
        self.assertEqual(
            [
                f"[ERROR] t.jsonl/1/answer - answer purple haze differs from the program's"
                f" answer {task.answer}"
            ],
            [repr(p) for p in res.problems],
        )

    def test_parse_task__broken_graph(self) -> None:
        """Graph problems name the layer and field."""
        data = task_to_json(self.dataset.train[0])
        data["graphs"]["semantic"]["edges"] = [[0, 99]]
        data["graphs"]["semantic"]["edge_features"] = [
            [0.0] * data["graphs"]["semantic"]["edge_dim"]
        ]
        data["graphs"]["semantic"]["edge_labels"] = ["near"]
        data["family"] = "counting"
        problems = [repr(p) for p in parse_task(data, ("t.jsonl", 1)).problems]
        self.assertEqual(2, len(problems))
        self.assertTrue(
            problems[0].startswith("[ERROR] t.jsonl/1/graphs/semantic/edges/0 - edge (0, 99)"),
            problems,
        )
        self.assertTrue(problems[1].startswith("[ERROR] t.jsonl/1/family - expected one of"))
