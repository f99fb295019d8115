"""Finite-difference checks of every differentiable component on small random inputs."""

from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple
import logging
import numpy as np
from ..builder import EmbeddingTable
from ..controller import (
    create_answer_params,
    create_controller_params,
    create_lstm_params,
    create_network,
    encode_question,
    layer_dims,
    predict_answer,
    step_controller,
)
from ..graph import MODALITIES, AttentionMap, HeteroGraph, Modality, MultiLayerGraph
from ..modules import (
    create_cross_graph_params,
    create_find_params,
    create_relate_params,
    cross_graph,
    describe,
    filter_,
    find,
    relate,
)
from ..tensor import GradCheckReport, ParameterStore, Tensor, grad_check_many, ops, parameter
from .loss import cross_entropy_loss


_LOG = logging.getLogger(__name__)

SUITE_COMPONENTS: Tuple[str, ...] = (
    "find",
    "filter",
    "relate",
    "cross_graph",
    "describe",
    "encoder",
    "controller_step",
    "answer_head",
    "run_reasoning",
)
DEFAULT_INSTANCES = 10
MAX_SUITE_NODES = 6
SUITE_MODEL_DIM = 4
SUITE_NODE_DIMS: Mapping[Modality, Tuple[int, int]] = {
    "visual": (5, 3),
    "semantic": (4, 4),
    "commonsense": (4, 5),
}
SUITE_WORDS: Tuple[str, ...] = ("what", "is", "the", "red", "object", "used", "for")
SUITE_ANSWERS: Tuple[str, ...] = ("cutting", "reading", "riding", "sitting")

# The full network is large; only a sample of its tensors and coordinates is perturbed.
RUN_REASONING_TENSORS = 12
RUN_REASONING_COORDS = 2
RUN_REASONING_STEPS = 3

_Case = Tuple[Callable[[], Tensor], Sequence[Tuple[str, Tensor]], Optional[int]]


class SuiteReport:
    """Per-component, per-instance gradient check reports."""

    __slots__ = ("__entries",)

    def __init__(self, entries: Sequence[Tuple[str, int, Sequence[GradCheckReport]]]) -> None:
        self.__entries = tuple((c, i, tuple(r)) for c, i, r in entries)

    @property
    def entries(self) -> Sequence[Tuple[str, int, Sequence[GradCheckReport]]]:
        """(component, instance, reports) in run order."""
        return self.__entries

    @property
    def passed(self) -> bool:
        """Did every tensor of every instance pass?"""
        return all(r.passed for _, _, reports in self.__entries for r in reports)

    def max_error(self, component: str) -> float:
        """Largest error seen for one component."""
        return max(
            (r.max_error for c, _, reports in self.__entries if c == component for r in reports),
            default=0.0,
        )

    def as_json(self) -> Dict[str, object]:
        """Summary per component plus every failing tensor."""
        components: Dict[str, object] = {}
        failures: List[Dict[str, object]] = []
        for component in dict.fromkeys(c for c, _, _ in self.__entries):
            reports = [r for c, _, rs in self.__entries if c == component for r in rs]
            components[component] = {
                "max_error": self.max_error(component),
                "checked": sum(r.checked for r in reports),
                "passed": all(r.passed for r in reports),
            }
        for component, instance, reports in self.__entries:
            for report in reports:
                if not report.passed:
                    failures.append(
                        {"component": component, "instance": instance, **report.as_json()}
                    )
        return {"passed": self.passed, "components": components, "failures": failures}


def random_graph(
    rng: np.random.Generator,
    modality: Modality,
    *,
    node_dim: int,
    edge_dim: int,
    max_nodes: int = MAX_SUITE_NODES,
) -> HeteroGraph:
    """A graph of 2 to `max_nodes` nodes with random features and at least one edge."""
    count = int(rng.integers(2, max_nodes + 1))
    pairs = [(s, t) for s in range(count) for t in range(count) if s != t]
    keep = rng.random(len(pairs)) < 0.4
    keep[int(rng.integers(len(pairs)))] = True
    edges = [p for p, k in zip(pairs, keep) if k]
    return HeteroGraph(
        modality=modality,
        node_features=rng.normal(size=(count, node_dim)),
        node_labels=[f"{modality}{i}" for i in range(count)],
        edges=edges,
        edge_features=rng.normal(size=(len(edges), edge_dim)),
    )


def random_graphs(
    rng: np.random.Generator,
    dims: Mapping[Modality, Tuple[int, int]] = SUITE_NODE_DIMS,
    max_nodes: int = MAX_SUITE_NODES,
) -> MultiLayerGraph:
    """Three random layers with the given (node_dim, edge_dim) widths."""
    layers = {
        m: random_graph(rng, m, node_dim=dims[m][0], edge_dim=dims[m][1], max_nodes=max_nodes)
        for m in MODALITIES
    }
    return MultiLayerGraph(
        visual=layers["visual"], semantic=layers["semantic"], commonsense=layers["commonsense"]
    )


def _attention(rng: np.random.Generator, layer: Modality, count: int) -> AttentionMap:
    # Bounded away from zero so a perturbed entry stays nonnegative.
    weights = rng.dirichlet(np.ones(count)) + 0.05
    return AttentionMap(layer, parameter(weights / weights.sum()))


def _dot(value: Tensor, direction: np.ndarray) -> Tensor:
    return ops.total(ops.multiply(value, Tensor(direction)))


def _build_case(component: str, rng: np.random.Generator) -> _Case:
    d = SUITE_MODEL_DIM
    store = ParameterStore(rng)
    graphs = random_graphs(rng)
    visual = graphs.visual
    features = parameter(visual.node_features)
    query = parameter(rng.normal(size=d))
    if component in ("find", "filter"):
        params = create_find_params(
            store, component, node_dim=visual.node_dim, query_dim=d, model_dim=d
        )
        direction = rng.normal(size=visual.num_nodes)
        if component == "find":
            return (
                lambda: _dot(find(params, features, query, "visual").weights, direction),
                [*store.items(), ("features", features), ("query", query)],
                None,
            )
        attention = _attention(rng, "visual", visual.num_nodes)
        return (
            lambda: _dot(filter_(params, attention, features, query).weights, direction),
            [*store.items(), ("attention", attention.weights), ("query", query)],
            None,
        )
    if component == "relate":
        relate_params = create_relate_params(
            store, "relate", edge_dim=visual.edge_dim, query_dim=d, model_dim=d
        )
        attention = _attention(rng, "visual", visual.num_nodes)
        direction = rng.normal(size=visual.num_nodes)
        return (
            lambda: _dot(relate(relate_params, attention, visual, query).weights, direction),
            [*store.items(), ("attention", attention.weights), ("query", query)],
            None,
        )
    if component == "cross_graph":
        target = graphs.commonsense
        cross_params = create_cross_graph_params(
            store,
            "cross_graph",
            source_dim=visual.node_dim,
            target_dim=target.node_dim,
            model_dim=d,
        )
        source_map = _attention(rng, "visual", visual.num_nodes)
        target_map = _attention(rng, "commonsense", target.num_nodes)
        target_features = parameter(target.node_features)
        direction = rng.normal(size=target.num_nodes)
        return (
            lambda: _dot(
                cross_graph(
                    cross_params, source_map, target_map, features, target_features
                ).weights,
                direction,
            ),
            [
                *store.items(),
                ("source_attention", source_map.weights),
                ("target_attention", target_map.weights),
                ("source_features", features),
                ("target_features", target_features),
            ],
            None,
        )
    if component == "describe":
        attention = _attention(rng, "visual", visual.num_nodes)
        direction = rng.normal(size=visual.node_dim)
        return (
            lambda: _dot(describe(attention, features), direction),
            [("attention", attention.weights), ("features", features)],
            None,
        )
    emb = EmbeddingTable({w: rng.normal(size=d) for w in SUITE_WORDS}, d)
    tokens = [str(w) for w in rng.choice(SUITE_WORDS, size=int(rng.integers(2, 6)))]
    if component == "encoder":
        lstm = create_lstm_params(store, "encoder", input_dim=d, hidden_dim=d)
        direction = rng.normal(size=(6, d))
        return (
            lambda: _dot(encode_question(tokens, emb, lstm, 6).word_states, direction),
            list(store.items()),
            None,
        )
    if component == "controller_step":
        lstm = create_lstm_params(store, "encoder", input_dim=d, hidden_dim=d)
        controller = create_controller_params(store, "controller", model_dim=d, module_count=7)
        weights_direction = rng.normal(size=7)
        query_direction = rng.normal(size=d)

        def step_objective() -> Tensor:
            out = step_controller(controller, encode_question(tokens, emb, lstm, 6), query)
            return ops.add(
                _dot(out.module_weights, weights_direction), _dot(out.query, query_direction)
            )

        return step_objective, [*store.items(), ("prev_query", query)], None
    if component == "answer_head":
        head = create_answer_params(
            store,
            "answer",
            node_dims={m: graphs.layer(m).node_dim for m in MODALITIES},
            question_dim=d,
            model_dim=d,
            answer_count=len(SUITE_ANSWERS),
        )
        summaries = {m: parameter(rng.normal(size=graphs.layer(m).node_dim)) for m in MODALITIES}
        label = int(rng.integers(len(SUITE_ANSWERS)))
        return (
            lambda: cross_entropy_loss(predict_answer(head, summaries, query), label),
            [
                *store.items(),
                *((f"summary.{m}", t) for m, t in summaries.items()),
                ("question", query),
            ],
            None,
        )
    if component == "run_reasoning":
        network = create_network(
            rng,
            dims=layer_dims(graphs),
            emb=emb,
            answers=SUITE_ANSWERS,
            model_dim=d,
            steps=RUN_REASONING_STEPS,
        )
        label = int(rng.integers(len(SUITE_ANSWERS)))
        tensors = list(network.store.items())
        chosen = sorted(rng.choice(len(tensors), size=RUN_REASONING_TENSORS, replace=False))
        return (
            lambda: cross_entropy_loss(network.run(graphs, tokens)[0], label),
            [tensors[i] for i in chosen],
            RUN_REASONING_COORDS,
        )
    raise ValueError(f"unknown gradient suite component {component}")


def run_gradient_suite(
    seed: int = 0,
    *,
    instances: int = DEFAULT_INSTANCES,
    components: Sequence[str] = SUITE_COMPONENTS,
    eps: float = 1e-4,
    tol: float = 1e-3,
) -> SuiteReport:
    """Check each component on `instances` seeded random inputs."""
    if instances < 1:
        raise ValueError(f"at least one instance per component is needed, got {instances}")
    entries: List[Tuple[str, int, Sequence[GradCheckReport]]] = []
    for index, component in enumerate(components):
        if component not in SUITE_COMPONENTS:
            raise ValueError(f"unknown gradient suite component {component}")
        for instance in range(instances):
            rng = np.random.default_rng([seed, index, instance])
            func, tensors, max_coords = _build_case(component, rng)
            reports = grad_check_many(
                func, tensors, eps=eps, tol=tol, max_coords=max_coords, rng=rng
            )
            entries.append((component, instance, reports))
        _LOG.info(
            "%s: max error %.3g over %d instances",
            component,
            max(r.max_error for c, _, rs in entries if c == component for r in rs),
            instances,
        )
    return SuiteReport(entries)
