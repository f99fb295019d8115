"""What every module instance looks like to the executor."""

from typing import Literal, Mapping, Sequence, Tuple
import abc
from ..graph import AttentionMap, HeteroGraph, Modality, MultiLayerGraph
from ..tensor import Tensor


ModuleKind = Literal["find", "and", "filter", "relate", "cross_graph", "describe", "noop"]

# Kinds that take part in the per-step weighted average.
STEP_KINDS: Tuple[ModuleKind, ...] = ("find", "and", "filter", "relate", "noop", "cross_graph")


class StepInputs:
    """Everything a module may read at reasoning step t.

    `history[-1]` holds the per-graph maps after step t-1; `history[0]` is the
    initial uniform state.  Node features are wrapped as constant tensors once
    per run.
    """

    __slots__ = ("__graphs", "__features", "__query", "__history")

    def __init__(
        self,
        *,
        graphs: MultiLayerGraph,
        features: Mapping[Modality, Tensor],
        query: Tensor,
        history: Sequence[Mapping[Modality, AttentionMap]],
    ) -> None:
        if not history:
            raise ValueError("step inputs need at least the initial attention state")
        self.__graphs = graphs
        self.__features = features
        self.__query = query
        self.__history = history

    @property
    def graphs(self) -> MultiLayerGraph:
        """The three layers."""
        return self.__graphs

    @property
    def query(self) -> Tensor:
        """The step query c_t."""
        return self.__query

    def graph(self, modality: Modality) -> HeteroGraph:
        """One layer."""
        return self.__graphs.layer(modality)

    def features(self, modality: Modality) -> Tensor:
        """Node features of one layer as a constant tensor."""
        return self.__features[modality]

    def lookback(self, modality: Modality, steps: int) -> AttentionMap:
        """The map of one layer `steps` steps ago; clamps to the initial state."""
        if steps < 1:
            raise ValueError(f"lookback must be at least one step, got {steps}")
        index = max(len(self.__history) - steps, 0)
        return self.__history[index][modality]


class AbcGraphModule(abc.ABC):
    """A module instance bound to the layer it writes to."""

    __slots__ = ()

    @property
    @abc.abstractmethod
    def kind(self) -> ModuleKind:
        """The module family."""

    @property
    @abc.abstractmethod
    def target(self) -> Modality:
        """The layer whose attention this instance produces."""

    @property
    def name(self) -> str:
        """Stable instance name, also the parameter-name prefix."""
        return f"{self.kind}.{self.target}"

    @abc.abstractmethod
    def execute(self, inputs: StepInputs) -> AttentionMap:
        """Produce this step's attention map on the target layer."""

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"
