"""Test the module."""

import unittest
import numpy as np
from graph_nmn.graph import MODALITIES
from graph_nmn.training import SUITE_COMPONENTS, random_graphs, run_gradient_suite


class GradientSuiteTest(unittest.TestCase):
    """Test run_gradient_suite."""

    def test_run_gradient_suite__every_component(self) -> None:
        """Ten seeded instances of every component agree with finite differences."""
        report = run_gradient_suite(0, instances=10)
        failures = report.as_json()["failures"]
        self.assertTrue(report.passed, failures)
        self.assertEqual(len(SUITE_COMPONENTS) * 10, len(report.entries))
        for component in SUITE_COMPONENTS:
            self.assertLess(report.max_error(component), 1e-3, component)

    def test_run_gradient_suite__subset(self) -> None:
        """A subset runs only the named components, in order."""
        report = run_gradient_suite(3, instances=2, components=("describe", "relate"))
        self.assertEqual(
            ["describe", "describe", "relate", "relate"], [c for c, _, _ in report.entries]
        )
        summary = report.as_json()
        self.assertEqual(["describe", "relate"], list(summary["components"]))  # type: ignore
        self.assertEqual([], summary["failures"])

    def test_run_gradient_suite__bad_arguments(self) -> None:
        """At least one instance of a known component."""
        with self.assertRaises(ValueError) as ctx:
            run_gradient_suite(0, instances=0)
        self.assertEqual(
            "at least one instance per component is needed, got 0", str(ctx.exception)
        )
        with self.assertRaises(ValueError):
            run_gradient_suite(0, instances=1, components=("describe_all",))

    def test_random_graphs__small(self) -> None:
        """Suite graphs have 2 to 6 nodes and at least one edge per layer."""
        rng = np.random.default_rng(0)
        for _ in range(20):
            graphs = random_graphs(rng)
            for modality in MODALITIES:
                graph = graphs.layer(modality)
                self.assertTrue(2 <= graph.num_nodes <= 6)
                self.assertGreaterEqual(graph.num_edges, 1)
