"""Structural checks of a graph layer.

A graph that fails here was built from a bad annotation file or by a buggy
builder.  Every violation is listed, not just the first.
"""

from typing import Sequence
import numpy as np
from .defs import HeteroGraph, MODALITIES
from ..util.message import i18n as _
from ..util.result import Problem, Result, ResultGen, SourcePath


def validate_graph(graph: HeteroGraph, source: Sequence[str] = ()) -> Result[HeteroGraph]:
    """Check every HeteroGraph invariant; the result is valid when none is broken."""
    where: SourcePath = (*source, graph.modality)
    res = ResultGen()
    count = graph.num_nodes

    if graph.modality not in MODALITIES:
        res.add(Problem.as_validation(where, _("unknown modality {mod}"), mod=graph.modality))
    if graph.node_features.ndim != 2:
        res.add(
            Problem.as_validation(
                (*where, "node_features"),
                _("node features must be a matrix, got {ndim} dimensions"),
                ndim=graph.node_features.ndim,
            )
        )
    if count < 1:
        res.add(Problem.as_validation(where, _("graph has no nodes")))
    if len(graph.node_labels) != count:
        res.add(
            Problem.as_validation(
                (*where, "node_labels"),
                _("{labels} node labels for {count} nodes"),
                labels=len(graph.node_labels),
                count=count,
            )
        )
    if len(graph.node_attributes) != len(graph.node_labels):
        res.add(
            Problem.as_validation(
                (*where, "node_attributes"),
                _("{attrs} attribute lists for {count} nodes"),
                attrs=len(graph.node_attributes),
                count=len(graph.node_labels),
            )
        )
    if graph.node_features.size and not np.all(np.isfinite(graph.node_features)):
        res.add(Problem.as_validation((*where, "node_features"), _("non-finite node feature")))

    for index, (src, dst) in enumerate(graph.edges.tolist()):
        if not (0 <= src < count and 0 <= dst < count):
            res.add(
                Problem.as_validation(
                    (*where, "edges", index),
                    _("edge ({src}, {dst}) has an endpoint outside [0, {count})"),
                    src=src,
                    dst=dst,
                    count=count,
                )
            )

    rows = graph.edge_features.shape[0] if graph.edge_features.ndim == 2 else -1
    if rows != graph.num_edges:
        res.add(
            Problem.as_validation(
                (*where, "edge_features"),
                _("{rows} edge feature rows for {edges} edges"),
                rows=rows,
                edges=graph.num_edges,
            )
        )
    elif graph.edge_features.size and not np.all(np.isfinite(graph.edge_features)):
        res.add(Problem.as_validation((*where, "edge_features"), _("non-finite edge feature")))
    if len(graph.edge_labels) != graph.num_edges:
        res.add(
            Problem.as_validation(
                (*where, "edge_labels"),
                _("{labels} edge labels for {edges} edges"),
                labels=len(graph.edge_labels),
                edges=graph.num_edges,
            )
        )
    return res.build(graph)
