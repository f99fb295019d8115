"""CrossGraph: carry attention from one layer onto another through node features."""

from typing import Optional
from ..graph import AttentionMap, Modality, attention_of
from ..tensor import DimensionError, ParameterStore, Tensor, ops
from .base import AbcGraphModule, ModuleKind, StepInputs


class CrossGraphParams:
    """W_5 (source summary), W_6 (target nodes) and W_7 (scoring row)."""

    __slots__ = ("__w_source", "__w_target", "__w_out")

    def __init__(self, *, w_source: Tensor, w_target: Tensor, w_out: Tensor) -> None:
        if w_source.shape[1] != w_target.shape[1] or w_out.shape != (w_target.shape[1], 1):
            raise DimensionError("cross_graph params", w_source.shape, w_target.shape, w_out.shape)
        self.__w_source = w_source
        self.__w_target = w_target
        self.__w_out = w_out

    @property
    def w_source(self) -> Tensor:
        """W_5: source node_dim x model_dim."""
        return self.__w_source

    @property
    def w_target(self) -> Tensor:
        """W_6: target node_dim x model_dim."""
        return self.__w_target

    @property
    def w_out(self) -> Tensor:
        """W_7: model_dim x 1."""
        return self.__w_out


def create_cross_graph_params(
    store: ParameterStore,
    name: str,
    *,
    source_dim: int,
    target_dim: int,
    model_dim: int,
) -> CrossGraphParams:
    """Register the parameters of one CrossGraph instance."""
    return CrossGraphParams(
        w_source=store.create(f"{name}.w_source", (source_dim, model_dim), source_dim),
        w_target=store.create(f"{name}.w_target", (target_dim, model_dim), target_dim),
        w_out=store.create(f"{name}.w_out", (model_dim, 1), model_dim),
    )


def cross_graph(
    params: CrossGraphParams,
    source: AttentionMap,
    target: AttentionMap,
    source_features: Tensor,
    target_features: Tensor,
    query: Optional[Tensor] = None,
) -> AttentionMap:
    """a'_n = softmax(tanh(X_m^T a_m W_5 + X_n W_6) W_7); returns norm(a'_n + a_n).

    `query` is part of the module signature but does not enter the score.
    """
    del query
    if source.layer == target.layer:
        raise ValueError(f"cross_graph needs two different layers, got {source.layer} twice")
    if source_features.shape[0] != len(source) or target_features.shape[0] != len(target):
        raise DimensionError(
            "cross_graph",
            source.weights.shape,
            source_features.shape,
            target.weights.shape,
            target_features.shape,
        )
    if (
        source_features.shape[1] != params.w_source.shape[0]
        or target_features.shape[1] != params.w_target.shape[0]
    ):
        raise DimensionError(
            "cross_graph", source_features.shape, params.w_source.shape, params.w_target.shape
        )
    summary = ops.matmul(ops.matmul(source.weights, source_features), params.w_source)
    hidden = ops.tanh(ops.add(ops.matmul(target_features, params.w_target), summary))
    scores = ops.matmul(hidden, params.w_out)
    moved = ops.softmax(ops.reshape(scores, (len(target),)))
    return attention_of(target.layer, ops.add(moved, target.weights))


class CrossGraphModule(AbcGraphModule):
    """CrossGraph for one ordered layer pair, writing to the target layer."""

    __slots__ = ("__source", "__target", "__params")

    def __init__(self, source: Modality, target: Modality, params: CrossGraphParams) -> None:
        if source == target:
            raise ValueError(f"cross_graph needs two different layers, got {source} twice")
        self.__source = source
        self.__target = target
        self.__params = params

    @property
    def kind(self) -> ModuleKind:
        return "cross_graph"

    @property
    def source(self) -> Modality:
        """The layer attention is read from."""
        return self.__source

    @property
    def target(self) -> Modality:
        return self.__target

    @property
    def name(self) -> str:
        return f"cross_graph.{self.__source}->{self.__target}"

    @property
    def params(self) -> CrossGraphParams:
        """This instance's weights."""
        return self.__params

    def execute(self, inputs: StepInputs) -> AttentionMap:
        return cross_graph(
            self.__params,
            inputs.lookback(self.__source, 1),
            inputs.lookback(self.__target, 1),
            inputs.features(self.__source),
            inputs.features(self.__target),
            inputs.query,
        )
