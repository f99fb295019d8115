"""Test the module."""

import unittest
import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
from helpers.graphs import mk_attention, mk_graph
from graph_nmn.graph import MultiLayerGraph, uniform_attention
from graph_nmn.modules import (
    AndModule,
    FilterModule,
    FindModule,
    NoOpModule,
    StepInputs,
    and_,
    create_find_params,
    filter_,
    find,
    noop,
)
from graph_nmn.tensor import DimensionError, ParameterStore, Tensor, parameter


class FindTest(unittest.TestCase):
    """Test find and filter."""

    def setUp(self) -> None:
        self.rng = np.random.default_rng(5)
        self.store = ParameterStore(self.rng)
        self.params = create_find_params(self.store, "find", node_dim=3, query_dim=4, model_dim=6)
        self.features = self.rng.normal(size=(5, 3))
        self.query = parameter(self.rng.normal(size=4))

    def test_find__distribution(self) -> None:
        """The map is a strictly positive distribution over the nodes."""
        attention = find(self.params, self.features, self.query, "visual")
        self.assertEqual("visual", attention.layer)
        self.assertEqual(5, len(attention))
        self.assertTrue(np.all(attention.values > 0.0))
        self.assertAlmostEqual(1.0, float(attention.values.sum()), places=12)

    def test_find__permutation_equivariant(self) -> None:
        """Reordering the nodes reorders the weights the same way."""
        order = np.array([3, 0, 4, 1, 2])
        base = find(self.params, self.features, self.query, "visual").values
        shuffled = find(self.params, self.features[order], self.query, "visual").values
        assert_allclose(base[order], shuffled, atol=1e-12)

    def test_find__wrong_widths(self) -> None:
        """Feature and query widths are checked."""
        with self.assertRaises(DimensionError):
            find(self.params, np.ones((5, 2)), self.query, "visual")
        with self.assertRaises(DimensionError):
            find(self.params, self.features, Tensor(np.ones(3)), "visual")

    def test_filter__is_and_of_find(self) -> None:
        """filter(a, X, c) equals and(a, find(X, c)) exactly."""
        attention = mk_attention("visual", [0.5, 0.1, 0.1, 0.2, 0.1])
        filtered = filter_(self.params, attention, self.features, self.query)
        composed = and_(attention, find(self.params, self.features, self.query, "visual"))
        assert_array_equal(composed.values, filtered.values)


class CombineTest(unittest.TestCase):
    """Test and and noop."""

    def test_and__value(self) -> None:
        """Sum, then renormalize."""
        out = and_(
            mk_attention("semantic", [0.5, 0.5, 0.0]), mk_attention("semantic", [0.0, 0.5, 0.5])
        )
        assert_allclose([0.25, 0.5, 0.25], out.values)

    def test_and__different_layers(self) -> None:
        """Both maps must be on the same layer."""
        with self.assertRaises(ValueError) as ctx:
            and_(mk_attention("semantic", [1.0]), mk_attention("visual", [1.0]))
        self.assertEqual(
            "cannot combine semantic attention with visual attention", str(ctx.exception)
        )

    def test_and__different_sizes(self) -> None:
        """Both maps must have the same length."""
        with self.assertRaises(DimensionError):
            and_(mk_attention("visual", [1.0]), mk_attention("visual", [0.5, 0.5]))

    def test_noop__identity(self) -> None:
        """NoOp hands back the very same map."""
        attention = mk_attention("visual", [0.3, 0.7])
        self.assertIs(attention, noop(attention))


class ModuleInstanceTest(unittest.TestCase):
    """Test the module instances against the step inputs."""

    def setUp(self) -> None:
        self.graphs = MultiLayerGraph(
            visual=mk_graph("visual", [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], [(0, 1)]),
            semantic=mk_graph("semantic", [[1.0, 0.0], [0.0, 1.0]], [(1, 0)]),
            commonsense=mk_graph("commonsense", [[1.0, 2.0]]),
        )
        self.features = {g.modality: Tensor(g.node_features) for g in self.graphs.layers()}
        self.initial = {g.modality: uniform_attention(g) for g in self.graphs.layers()}
        self.first = dict(self.initial)
        self.first["visual"] = mk_attention("visual", [0.6, 0.3, 0.1])

    def _inputs(self) -> StepInputs:
        return StepInputs(
            graphs=self.graphs,
            features=self.features,
            query=Tensor(np.ones(2)),
            history=[self.initial, self.first],
        )

    def test_lookback__clamps(self) -> None:
        """Looking further back than the history reaches returns the initial state."""
        inputs = self._inputs()
        self.assertIs(self.first["visual"], inputs.lookback("visual", 1))
        self.assertIs(self.initial["visual"], inputs.lookback("visual", 2))
        self.assertIs(self.initial["visual"], inputs.lookback("visual", 5))
        with self.assertRaises(ValueError):
            inputs.lookback("visual", 0)

    def test_and_module__lags(self) -> None:
        """And combines the maps one and two steps back by default."""
        out = AndModule("visual").execute(self._inputs())
        assert_allclose(
            (np.array([0.6, 0.3, 0.1]) + 1.0 / 3.0) / 2.0, out.values, atol=1e-12
        )

    def test_noop_module__previous(self) -> None:
        """NoOp carries the previous map."""
        out = NoOpModule("visual").execute(self._inputs())
        self.assertIs(self.first["visual"], out)

    def test_find_and_filter_modules__names(self) -> None:
        """Instance names combine the kind and the layer."""
        store = ParameterStore(np.random.default_rng(0))
        params = create_find_params(store, "find.visual", node_dim=2, query_dim=2, model_dim=3)
        self.assertEqual("find.visual", FindModule("visual", params).name)
        filter_module = FilterModule("visual", params)
        self.assertEqual("filter.visual", filter_module.name)
        out = filter_module.execute(self._inputs())
        self.assertAlmostEqual(1.0, float(out.values.sum()), places=12)
