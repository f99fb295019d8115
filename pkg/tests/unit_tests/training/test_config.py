"""Test the module."""

import os
import tempfile
import unittest
from graph_nmn.controller import DEFAULT_STEPS
from graph_nmn.training import TrainConfig, load_config, parse_config


class TrainConfigTest(unittest.TestCase):
    """Test the TrainConfig class."""

    def test_defaults(self) -> None:
        """Unset keys take their defaults."""
        config = TrainConfig()
        self.assertEqual(DEFAULT_STEPS, config.steps)
        self.assertEqual((1, 2), config.and_inputs)
        self.assertEqual((), config.ablate)
        self.assertEqual("cross_graph", config.family)
        self.assertIsNone(config.dataset)

    def test_ablate__canonical_order(self) -> None:
        """Ablations are kept in canonical order whatever order they were given in."""
        config = TrainConfig(ablate=["relate", "kg"])
        self.assertEqual(("kg", "relate"), config.ablate)
        self.assertEqual(["kg", "relate"], config.as_dict()["ablate"])

    def test_replace__copies(self) -> None:
        """replace leaves the original alone and re-validates."""
        config = TrainConfig(seed=3)
        changed = config.replace(epochs=0)
        self.assertEqual(50, config.epochs)
        self.assertEqual(0, changed.epochs)
        self.assertEqual(3, changed.seed)
        self.assertNotEqual(config, changed)
        self.assertEqual(config, TrainConfig(seed=3))
        with self.assertRaises(ValueError) as ctx:
            config.replace(batch_size=0)
        self.assertEqual("batch_size must be a positive integer, got 0", str(ctx.exception))

    def test_init__unknown_key(self) -> None:
        """Unknown keys are refused."""
        with self.assertRaises(ValueError) as ctx:
            TrainConfig(colour="red")
        self.assertEqual("unknown configuration keys ['colour']", str(ctx.exception))


class ParseConfigTest(unittest.TestCase):
    """Test parse_config."""

    def test_parse_config__every_problem(self) -> None:
        """Each bad key is reported, unknown keys first."""
        res = parse_config(
            {"steps": 0, "colour": 1, "learning_rate": -1, "beta1": 0.5}, ("c.yaml",)
        )
        self.assertTrue(res.is_not_valid)
        problems = [repr(p) for p in res.problems]
        self.assertEqual(3, len(problems))
        self.assertTrue(
            problems[0].startswith(
                "[ERROR] c.yaml/colour - unknown configuration key; expected one of learning_rate"
            ),
            problems[0],
        )
        self.assertEqual(
            [
                "[ERROR] c.yaml/learning_rate - must be a non-negative number, found -1",
                "[ERROR] c.yaml/steps - must be a positive integer, found 0",
            ],
            problems[1:],
        )

    def test_parse_config__booleans(self) -> None:
        """Booleans are not numbers here."""
        res = parse_config({"epochs": True}, ("c.yaml",))
        self.assertEqual(
            ["[ERROR] c.yaml/epochs - must be a non-negative integer, found True"],
            [repr(p) for p in res.problems],
        )

    def test_parse_config__not_mapping(self) -> None:
        """The document must be a mapping."""
        res = parse_config([1, 2], ("c.yaml",))
        self.assertEqual(
            ["[ERROR] c.yaml - configuration must be a mapping of key to value"],
            [repr(p) for p in res.problems],
        )

    def test_parse_config__empty(self) -> None:
        """An empty document is the default configuration."""
        self.assertEqual(TrainConfig(), parse_config(None, ("c.yaml",)).required())

    def test_parse_config__values(self) -> None:
        """Good values come through."""
        config = parse_config(
            {"family": "relational", "and_inputs": [2, 3], "ablate": ["filter"]}, ("c.yaml",)
        ).required()
        self.assertEqual("relational", config.family)
        self.assertEqual((2, 3), config.and_inputs)
        self.assertEqual(("filter",), config.ablate)

    def test_parse_config__bad_choices(self) -> None:
        """Families, ablations and And lags are checked."""
        res = parse_config(
            {"family": "counting", "ablate": ["describe"], "and_inputs": [1]}, ("c.yaml",)
        )
        self.assertEqual(
            [
                "[ERROR] c.yaml/family - must be one of attribute, relational, cross_graph,"
                " mixed, found 'counting'",
                "[ERROR] c.yaml/and_inputs - must be a pair of positive integers, found [1]",
                "[ERROR] c.yaml/ablate - must be a list drawn from vg, sg, kg, and, filter,"
                " relate, crossgraph, found ['describe']",
            ],
            [repr(p) for p in res.problems],
        )


class LoadConfigTest(unittest.TestCase):
    """Test load_config."""

    def test_load_config__file(self) -> None:
        """A YAML file is read and validated."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "train.yaml")
            with open(path, "w", encoding="utf-8") as out:
                out.write("seed: 4\nepochs: 2\nablate: [kg]\n")
            config = load_config(path).required()
        self.assertEqual(4, config.seed)
        self.assertEqual(2, config.epochs)
        self.assertEqual(("kg",), config.ablate)

    def test_load_config__missing(self) -> None:
        """A missing file is a problem, not an exception."""
        with tempfile.TemporaryDirectory() as tmp:
            res = load_config(os.path.join(tmp, "nope.yaml"))
        self.assertTrue(res.is_not_valid)
        self.assertIn("could not read configuration file", repr(res.problems[0]))

    def test_load_config__bad_yaml(self) -> None:
        """Broken YAML is a problem, not an exception."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "bad.yaml")
            with open(path, "w", encoding="utf-8") as out:
                out.write("steps: [1\n")
            res = load_config(path)
        self.assertTrue(res.is_not_valid)
        self.assertIn("configuration is not valid YAML", repr(res.problems[0]))
