"""Test the module."""

import unittest
from typing import Dict, List
import numpy as np
from numpy.testing import assert_array_equal
from helpers.graphs import mk_multilayer
from graph_nmn.controller import (
    ModuleInventory,
    build_inventory,
    check_ablations,
    execute_step,
    layer_dims,
    partition_mass,
)
from graph_nmn.graph import MODALITIES, AttentionMap, Modality, uniform_attention
from graph_nmn.modules import NoOpModule, StepInputs
from graph_nmn.tensor import DimensionError, ParameterStore, Tensor


class InventoryTest(unittest.TestCase):
    """Test the module inventory."""

    def setUp(self) -> None:
        self.graphs = mk_multilayer(np.random.default_rng(1))
        self.inventory = build_inventory(
            ParameterStore(np.random.default_rng(2)),
            layer_dims(self.graphs),
            query_dim=4,
            model_dim=4,
        )

    def test_build_inventory__partitions(self) -> None:
        """Each layer has Find, And, Filter, Relate, two CrossGraphs and NoOp."""
        self.assertEqual(21, len(self.inventory))
        names = [self.inventory.names[i] for i in self.inventory.partition("semantic")]
        self.assertEqual(
            [
                "find.semantic",
                "and.semantic",
                "filter.semantic",
                "relate.semantic",
                "cross_graph.visual->semantic",
                "cross_graph.commonsense->semantic",
                "noop.semantic",
            ],
            names,
        )

    def test_enabled__module_ablation(self) -> None:
        """Ablating a kind masks every instance of it."""
        enabled = self.inventory.enabled(["relate", "crossgraph"])
        disabled = [n for n, on in zip(self.inventory.names, enabled) if not on]
        self.assertEqual(9, len(disabled))
        self.assertTrue(all(n.startswith(("relate.", "cross_graph.")) for n in disabled))

    def test_check_ablations__unknown(self) -> None:
        """Unknown names are refused; known ones come back in canonical order."""
        self.assertEqual(("kg", "relate"), check_ablations(["relate", "kg", "relate"]))
        with self.assertRaises(ValueError):
            check_ablations(["describe"])

    def test_inventory__needs_noop(self) -> None:
        """A partition without NoOp is refused."""
        with self.assertRaises(ValueError) as ctx:
            ModuleInventory([NoOpModule("visual"), NoOpModule("semantic")])
        self.assertEqual("the commonsense partition has no noop module", str(ctx.exception))


class ExecuteStepTest(unittest.TestCase):
    """Test execute_step over many steps."""

    def setUp(self) -> None:
        self.rng = np.random.default_rng(3)
        self.graphs = mk_multilayer(self.rng, (4, 5, 6))
        self.inventory = build_inventory(
            ParameterStore(self.rng), layer_dims(self.graphs), query_dim=4, model_dim=4
        )
        self.features = {g.modality: Tensor(g.node_features) for g in self.graphs.layers()}
        self.history: List[Dict[Modality, AttentionMap]] = [
            {g.modality: uniform_attention(g) for g in self.graphs.layers()}
        ]

    def _step(self, weights: np.ndarray) -> Dict[Modality, AttentionMap]:
        state = execute_step(
            self.inventory,
            StepInputs(
                graphs=self.graphs,
                features=self.features,
                query=Tensor(self.rng.normal(size=4)),
                history=self.history,
            ),
            Tensor(weights),
        )
        self.history.append(state)
        return state

    def test_execute_step__distributions_hold(self) -> None:
        """Every map stays a nonnegative unit-mass distribution for 1000 steps."""
        for step in range(1000):
            logits = self.rng.normal(scale=3.0, size=len(self.inventory))
            weights = np.exp(logits - logits.max())
            state = self._step(weights / weights.sum())
            for modality in MODALITIES:
                values = state[modality].values
                if np.any(values < 0.0) or abs(float(values.sum()) - 1.0) > 1e-9:
                    self.fail(f"step {step} {modality}: {values}")
            # Long histories are not needed by any module.
            del self.history[1:-2]

    def test_execute_step__noop_saturation(self) -> None:
        """One-hot weight on every NoOp leaves the uniform maps exactly unchanged."""
        weights = np.zeros(len(self.inventory))
        for modality in MODALITIES:
            weights[self.inventory.index_of(f"noop.{modality}")] = 1.0 / 3.0
        for _ in range(12):
            state = self._step(weights)
        for graph in self.graphs.layers():
            assert_array_equal(
                np.full(graph.num_nodes, 1.0 / graph.num_nodes), state[graph.modality].values
            )

    def test_execute_step__disabled_modules_skipped(self) -> None:
        """With only NoOp enabled the step is an identity whatever the weights."""
        enabled = np.array([m.kind == "noop" for m in self.inventory])
        weights = np.full(len(self.inventory), 1.0 / len(self.inventory))
        state = execute_step(
            self.inventory,
            StepInputs(
                graphs=self.graphs,
                features=self.features,
                query=Tensor(np.zeros(4)),
                history=self.history,
            ),
            Tensor(weights),
            enabled,
        )
        for modality in MODALITIES:
            assert_array_equal(self.history[0][modality].values, state[modality].values)

    def test_execute_step__wrong_weight_count(self) -> None:
        """One weight per inventory instance."""
        with self.assertRaises(DimensionError):
            self._step(np.ones(3) / 3.0)

    def test_partition_mass__sums(self) -> None:
        """The raw mass of the three partitions adds up to the whole vector."""
        weights = self.rng.dirichlet(np.ones(len(self.inventory)))
        masses = partition_mass(self.inventory, weights)
        self.assertAlmostEqual(1.0, sum(masses.values()), places=12)
