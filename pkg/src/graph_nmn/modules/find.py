"""Find and Filter: locate nodes matching the step query."""

from typing import Union
import numpy as np
from ..graph import AttentionMap, Modality
from ..tensor import (
    DimensionError,
    MlpParams,
    ParameterStore,
    Tensor,
    as_tensor,
    create_mlp,
    mlp_dims,
    mlp_forward,
    ops,
)
from .base import AbcGraphModule, ModuleKind, StepInputs
from .combine import and_


class FindParams:
    """W_1 (node projection), W_2 (query projection) and the scoring f_mlp."""

    __slots__ = ("__w_node", "__w_query", "__mlp")

    def __init__(self, *, w_node: Tensor, w_query: Tensor, mlp: MlpParams) -> None:
        if w_node.shape[1] != w_query.shape[1] or mlp.input_dim != w_node.shape[1]:
            raise DimensionError("find params", w_node.shape, w_query.shape)
        if mlp.output_dim != 1:
            raise DimensionError("find params", (mlp.output_dim,), (1,))
        self.__w_node = w_node
        self.__w_query = w_query
        self.__mlp = mlp

    @property
    def w_node(self) -> Tensor:
        """W_1: node_dim x model_dim."""
        return self.__w_node

    @property
    def w_query(self) -> Tensor:
        """W_2: query_dim x model_dim."""
        return self.__w_query

    @property
    def mlp(self) -> MlpParams:
        """Scores each fused node vector."""
        return self.__mlp


def create_find_params(
    store: ParameterStore,
    name: str,
    *,
    node_dim: int,
    query_dim: int,
    model_dim: int,
    depth: int = 2,
) -> FindParams:
    """Register the parameters of one Find (or Filter) instance."""
    return FindParams(
        w_node=store.create(f"{name}.w_node", (node_dim, model_dim), node_dim),
        w_query=store.create(f"{name}.w_query", (query_dim, model_dim), query_dim),
        mlp=create_mlp(store, f"{name}.mlp", mlp_dims(model_dim, model_dim, 1, depth)),
    )


def find(
    params: FindParams,
    node_features: Union[Tensor, np.ndarray],
    query: Tensor,
    layer: Modality,
) -> AttentionMap:
    """a = softmax(f_mlp(F(X W_1, c W_2))) over the nodes."""
    features = as_tensor(node_features)
    if len(features.shape) != 2 or features.shape[1] != params.w_node.shape[0]:
        raise DimensionError("find", features.shape, params.w_node.shape)
    if query.shape != (params.w_query.shape[0],):
        raise DimensionError("find", query.shape, params.w_query.shape)
    count = features.shape[0]
    nodes = ops.matmul(features, params.w_node)
    queried = ops.repeat_rows(ops.matmul(query, params.w_query), count)
    scores = mlp_forward(params.mlp, ops.fuse(nodes, queried))
    return AttentionMap(layer, ops.softmax(ops.reshape(scores, (count,))))


def filter_(
    params: FindParams,
    attention: AttentionMap,
    node_features: Union[Tensor, np.ndarray],
    query: Tensor,
) -> AttentionMap:
    """The input map combined with a fresh Find, i.e. and(a, find(X, c))."""
    return and_(attention, find(params, node_features, query, attention.layer))


class FindModule(AbcGraphModule):
    """Find bound to one layer."""

    __slots__ = ("__target", "__params")

    def __init__(self, target: Modality, params: FindParams) -> None:
        self.__target = target
        self.__params = params

    @property
    def kind(self) -> ModuleKind:
        return "find"

    @property
    def target(self) -> Modality:
        return self.__target

    @property
    def params(self) -> FindParams:
        """This instance's weights."""
        return self.__params

    def execute(self, inputs: StepInputs) -> AttentionMap:
        return find(self.__params, inputs.features(self.__target), inputs.query, self.__target)


class FilterModule(AbcGraphModule):
    """Filter bound to one layer; refines the previous step's map."""

    __slots__ = ("__target", "__params")

    def __init__(self, target: Modality, params: FindParams) -> None:
        self.__target = target
        self.__params = params

    @property
    def kind(self) -> ModuleKind:
        return "filter"

    @property
    def target(self) -> Modality:
        return self.__target

    @property
    def params(self) -> FindParams:
        """This instance's weights (its own Find)."""
        return self.__params

    def execute(self, inputs: StepInputs) -> AttentionMap:
        return filter_(
            self.__params,
            inputs.lookback(self.__target, 1),
            inputs.features(self.__target),
            inputs.query,
        )
