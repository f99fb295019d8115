"""Relate: move attention along the edges the query asks about."""

from ..graph import AttentionMap, HeteroGraph, Modality, attention_of, uniform_weights
from ..tensor import (
    DimensionError,
    MlpParams,
    ParameterStore,
    Tensor,
    create_mlp,
    mlp_dims,
    mlp_forward,
    ops,
)
from .base import AbcGraphModule, ModuleKind, StepInputs


class RelateParams:
    """W_3 (query projection), W_4 (edge projection) and the edge-scoring f_mlp."""

    __slots__ = ("__w_query", "__w_edge", "__mlp")

    def __init__(self, *, w_query: Tensor, w_edge: Tensor, mlp: MlpParams) -> None:
        if w_query.shape[1] != w_edge.shape[1] or mlp.input_dim != w_edge.shape[1]:
            raise DimensionError("relate params", w_query.shape, w_edge.shape)
        if mlp.output_dim != 1:
            raise DimensionError("relate params", (mlp.output_dim,), (1,))
        self.__w_query = w_query
        self.__w_edge = w_edge
        self.__mlp = mlp

    @property
    def w_query(self) -> Tensor:
        """W_3: query_dim x model_dim."""
        return self.__w_query

    @property
    def w_edge(self) -> Tensor:
        """W_4: edge_dim x model_dim."""
        return self.__w_edge

    @property
    def mlp(self) -> MlpParams:
        """Scores each gated edge vector."""
        return self.__mlp


def create_relate_params(
    store: ParameterStore,
    name: str,
    *,
    edge_dim: int,
    query_dim: int,
    model_dim: int,
    depth: int = 2,
) -> RelateParams:
    """Register the parameters of one Relate instance."""
    return RelateParams(
        w_query=store.create(f"{name}.w_query", (query_dim, model_dim), query_dim),
        w_edge=store.create(f"{name}.w_edge", (edge_dim, model_dim), edge_dim),
        mlp=create_mlp(store, f"{name}.mlp", mlp_dims(model_dim, model_dim, 1, depth)),
    )


def edge_weights(params: RelateParams, graph: HeteroGraph, query: Tensor) -> Tensor:
    """W_ij = ReLU(f_mlp(c W_3 * e_ij W_4)), one entry per edge."""
    if graph.num_edges == 0:
        raise ValueError(f"{graph.modality} graph has no edges to weigh")
    if graph.edge_dim != params.w_edge.shape[0]:
        raise DimensionError("relate", graph.edge_features.shape, params.w_edge.shape)
    if query.shape != (params.w_query.shape[0],):
        raise DimensionError("relate", query.shape, params.w_query.shape)
    gated = ops.multiply(
        ops.matmul(graph.edge_features, params.w_edge),
        ops.matmul(query, params.w_query),
    )
    scores = mlp_forward(params.mlp, gated)
    return ops.relu(ops.reshape(scores, (graph.num_edges,)))


def edge_attention(params: RelateParams, graph: HeteroGraph, query: Tensor) -> Tensor:
    """The dense n x n edge-attention matrix, zero where there is no edge."""
    count = graph.num_nodes
    return ops.scatter_matrix(
        edge_weights(params, graph, query),
        graph.sources,
        graph.targets,
        (count, count),
    )


def relate(
    params: RelateParams,
    attention: AttentionMap,
    graph: HeteroGraph,
    query: Tensor,
) -> AttentionMap:
    """a = norm(W^T a); a graph without edges, or with all weights zero, yields uniform."""
    if attention.layer != graph.modality:
        raise ValueError(f"{attention.layer} attention cannot move along {graph.modality} edges")
    if len(attention) != graph.num_nodes:
        raise DimensionError("relate", attention.weights.shape, graph.node_features.shape)
    if graph.num_edges == 0:
        return AttentionMap(attention.layer, uniform_weights(graph.num_nodes))
    return transfer(attention, edge_attention(params, graph, query))


def transfer(attention: AttentionMap, edge_matrix: Tensor) -> AttentionMap:
    """Move node weight along a dense edge-attention matrix: norm(W^T a)."""
    count = len(attention)
    if edge_matrix.shape != (count, count):
        raise DimensionError("transfer", edge_matrix.shape, attention.weights.shape)
    moved = ops.matmul(ops.transpose(edge_matrix), attention.weights)
    return attention_of(attention.layer, moved)


class RelateModule(AbcGraphModule):
    """Relate bound to one layer."""

    __slots__ = ("__target", "__params")

    def __init__(self, target: Modality, params: RelateParams) -> None:
        self.__target = target
        self.__params = params

    @property
    def kind(self) -> ModuleKind:
        return "relate"

    @property
    def target(self) -> Modality:
        return self.__target

    @property
    def params(self) -> RelateParams:
        """This instance's weights."""
        return self.__params

    def execute(self, inputs: StepInputs) -> AttentionMap:
        return relate(
            self.__params,
            inputs.lookback(self.__target, 1),
            inputs.graph(self.__target),
            inputs.query,
        )
