"""The module inventory and the ablation switches that shape it."""

from typing import Dict, Iterable, Iterator, List, Literal, Mapping, Sequence, Tuple
import logging
import numpy as np
from ..graph import MODALITIES, Modality, MultiLayerGraph
from ..modules import (
    AbcGraphModule,
    AndModule,
    CrossGraphModule,
    FilterModule,
    FindModule,
    NoOpModule,
    RelateModule,
    create_cross_graph_params,
    create_find_params,
    create_relate_params,
)
from ..tensor import ParameterStore


_LOG = logging.getLogger(__name__)

Ablation = Literal["vg", "sg", "kg", "and", "filter", "relate", "crossgraph"]
ABLATIONS: Tuple[Ablation, ...] = ("vg", "sg", "kg", "and", "filter", "relate", "crossgraph")

GRAPH_ABLATIONS: Mapping[str, Modality] = {
    "vg": "visual",
    "sg": "semantic",
    "kg": "commonsense",
}
MODULE_ABLATIONS: Mapping[str, str] = {
    "and": "and",
    "filter": "filter",
    "relate": "relate",
    "crossgraph": "cross_graph",
}

# (node_dim, edge_dim) for each layer.
LayerDims = Mapping[Modality, Tuple[int, int]]


def layer_dims(graphs: MultiLayerGraph) -> Dict[Modality, Tuple[int, int]]:
    """Feature widths of each layer of a graph triple."""
    return {g.modality: (g.node_dim, g.edge_dim) for g in graphs.layers()}


def check_ablations(ablate: Iterable[str]) -> Tuple[str, ...]:
    """Reject unknown ablation names; returns them deduplicated in canonical order."""
    requested = set(ablate)
    unknown = requested - set(ABLATIONS)
    if unknown:
        raise ValueError(
            f"unknown ablation {sorted(unknown)}; choose from {', '.join(ABLATIONS)}"
        )
    return tuple(a for a in ABLATIONS if a in requested)


def ablate_graphs(graphs: MultiLayerGraph, ablate: Iterable[str]) -> MultiLayerGraph:
    """Swap every ablated layer for its placeholder."""
    ret = graphs
    for name in check_ablations(ablate):
        modality = GRAPH_ABLATIONS.get(name)
        if modality is not None:
            ret = ret.with_placeholder(modality)
    return ret


class ModuleInventory:
    """All module instances, in the order of the controller's weight vector."""

    __slots__ = ("__modules", "__partitions")

    def __init__(self, modules: Sequence[AbcGraphModule]) -> None:
        names = [m.name for m in modules]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate module names in inventory: {names}")
        partitions: Dict[Modality, List[int]] = {m: [] for m in MODALITIES}
        for index, module in enumerate(modules):
            if module.kind == "describe":
                raise ValueError("describe is a readout, not an inventory module")
            partitions[module.target].append(index)
        for modality, indices in partitions.items():
            if not any(modules[i].kind == "noop" for i in indices):
                raise ValueError(f"the {modality} partition has no noop module")
        self.__modules = tuple(modules)
        self.__partitions = {m: tuple(ix) for m, ix in partitions.items()}

    @property
    def modules(self) -> Sequence[AbcGraphModule]:
        """Every instance, index-aligned with the module weights."""
        return self.__modules

    @property
    def names(self) -> Sequence[str]:
        """Instance names, index-aligned with the module weights."""
        return tuple(m.name for m in self.__modules)

    def partition(self, modality: Modality) -> Sequence[int]:
        """Indices of the instances writing to one layer."""
        return self.__partitions[modality]

    def enabled(self, ablate: Iterable[str] = ()) -> np.ndarray:
        """Boolean mask over the inventory: False for instances of an ablated kind."""
        removed = {MODULE_ABLATIONS[a] for a in check_ablations(ablate) if a in MODULE_ABLATIONS}
        return np.array([m.kind not in removed for m in self.__modules], dtype=bool)

    def index_of(self, name: str) -> int:
        """Position of a named instance."""
        return self.names.index(name)

    def __len__(self) -> int:
        return len(self.__modules)

    def __iter__(self) -> Iterator[AbcGraphModule]:
        return iter(self.__modules)


def build_inventory(
    store: ParameterStore,
    dims: LayerDims,
    *,
    query_dim: int,
    model_dim: int,
    depth: int = 2,
    and_lags: Tuple[int, int] = (1, 2),
) -> ModuleInventory:
    """Create every module instance and its parameters.

    Each layer gets Find, And, Filter, Relate, the CrossGraph instances reading
    from the other two layers, and NoOp.  Ablations never remove instances;
    `ModuleInventory.enabled` masks them out at run time.
    """
    modules: List[AbcGraphModule] = []
    for target in MODALITIES:
        node_dim, edge_dim = dims[target]
        prefix = f"modules.{target}"
        find_dims = {"node_dim": node_dim, "query_dim": query_dim, "model_dim": model_dim}
        modules.append(
            FindModule(
                target, create_find_params(store, f"{prefix}.find", depth=depth, **find_dims)
            )
        )
        modules.append(AndModule(target, and_lags))
        modules.append(
            FilterModule(
                target, create_find_params(store, f"{prefix}.filter", depth=depth, **find_dims)
            )
        )
        modules.append(
            RelateModule(
                target,
                create_relate_params(
                    store,
                    f"{prefix}.relate",
                    edge_dim=edge_dim,
                    query_dim=query_dim,
                    model_dim=model_dim,
                    depth=depth,
                ),
            )
        )
        for source in MODALITIES:
            if source == target:
                continue
            modules.append(
                CrossGraphModule(
                    source,
                    target,
                    create_cross_graph_params(
                        store,
                        f"{prefix}.cross_graph.{source}",
                        source_dim=dims[source][0],
                        target_dim=node_dim,
                        model_dim=model_dim,
                    ),
                )
            )
        modules.append(NoOpModule(target))
    _LOG.debug("built module inventory of %d instances", len(modules))
    return ModuleInventory(modules)
