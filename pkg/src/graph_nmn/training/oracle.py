"""Symbolic execution of question programs over graph labels.

The oracle reads only node labels, node attributes and edge labels; it never
looks at features.  It is the ground truth the synthetic tasks are labelled
with, and it re-checks every task it labels.
"""

from typing import FrozenSet, Literal, Optional, Sequence, Tuple
from ..builder import normalize_label
from ..graph import Modality, MultiLayerGraph


ProgramOp = Literal["find", "relate", "cross", "query_attribute", "query_label"]


class OracleError(ValueError):
    """The program cannot be executed on these graphs (empty or ambiguous selection)."""


class ProgramStep:
    """One symbolic operation: op, the layer it acts on, and its argument."""

    __slots__ = ("__op", "__layer", "__arg")

    def __init__(self, op: ProgramOp, layer: Modality, arg: str = "") -> None:
        self.__op = op
        self.__layer = layer
        self.__arg = arg

    @property
    def op(self) -> ProgramOp:
        """What to do."""
        return self.__op

    @property
    def layer(self) -> Modality:
        """The layer acted on; for `cross`, the layer moved to."""
        return self.__layer

    @property
    def arg(self) -> str:
        """Label, attribute or relation to match."""
        return self.__arg

    def as_json(self) -> Tuple[str, str, str]:
        """Plain-data form."""
        return (self.__op, self.__layer, self.__arg)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ProgramStep) and other.as_json() == self.as_json()

    def __hash__(self) -> int:
        return hash(self.as_json())

    def __repr__(self) -> str:
        return f"{self.__op}({self.__layer}, {self.__arg!r})"


Selection = Tuple[Modality, FrozenSet[int]]


def execute_program(graphs: MultiLayerGraph, program: Sequence[ProgramStep]) -> str:
    """Run the program and return the answer string."""
    if not program:
        raise OracleError("empty program")
    selection: Optional[Selection] = None
    for index, step in enumerate(program):
        last = index == len(program) - 1
        if step.op in ("query_attribute", "query_label"):
            if not last:
                raise OracleError(f"step {index}: {step.op} must end the program")
            return _query(graphs, selection, step)
        selection = _select(graphs, selection, step, index)
        if not selection[1]:
            raise OracleError(f"step {index}: {step!r} selected nothing")
    raise OracleError("program does not end with a query")


def _select(
    graphs: MultiLayerGraph,
    selection: Optional[Selection],
    step: ProgramStep,
    index: int,
) -> Selection:
    graph = graphs.layer(step.layer)
    key = normalize_label(step.arg)
    if step.op == "find":
        return step.layer, frozenset(
            i
            for i in range(graph.num_nodes)
            if normalize_label(graph.node_labels[i]) == key
            or key in (normalize_label(a) for a in graph.node_attributes[i])
        )
    if selection is None:
        raise OracleError(f"step {index}: {step.op} needs a prior selection")
    source_layer, nodes = selection
    if step.op == "relate":
        if source_layer != step.layer:
            raise OracleError(f"step {index}: relate on {step.layer} after {source_layer}")
        return step.layer, frozenset(
            int(dst)
            for (src, dst), label in zip(graph.edges, graph.edge_labels)
            if int(src) in nodes and normalize_label(label) == key
        )
    if step.op == "cross":
        source = graphs.layer(source_layer)
        wanted = {normalize_label(source.node_labels[i]) for i in nodes}
        return step.layer, frozenset(
            i for i in range(graph.num_nodes) if normalize_label(graph.node_labels[i]) in wanted
        )
    raise OracleError(f"step {index}: unknown op {step.op}")


def _query(graphs: MultiLayerGraph, selection: Optional[Selection], step: ProgramStep) -> str:
    if selection is None:
        raise OracleError(f"{step.op} needs a prior selection")
    layer, nodes = selection
    if len(nodes) != 1:
        raise OracleError(f"{step.op} needs exactly one selected node, got {len(nodes)}")
    graph = graphs.layer(layer)
    (node,) = nodes
    if step.op == "query_label":
        return normalize_label(graph.node_labels[node])
    attributes = graph.node_attributes[node]
    if len(attributes) != 1:
        raise OracleError(f"query_attribute needs exactly one attribute, got {len(attributes)}")
    return normalize_label(attributes[0])
