"""And and NoOp: modules that only rearrange existing attention."""

from typing import Tuple
from ..graph import AttentionMap, Modality, attention_of
from ..tensor import DimensionError, ops
from .base import AbcGraphModule, ModuleKind, StepInputs


def and_(first: AttentionMap, second: AttentionMap) -> AttentionMap:
    """Elementwise sum of two maps on the same layer, renormalized."""
    if first.layer != second.layer:
        raise ValueError(f"cannot combine {first.layer} attention with {second.layer} attention")
    if len(first) != len(second):
        raise DimensionError("and", first.weights.shape, second.weights.shape)
    return attention_of(first.layer, ops.add(first.weights, second.weights))


def noop(attention: AttentionMap) -> AttentionMap:
    """The input, untouched."""
    return attention


class AndModule(AbcGraphModule):
    """Combines the maps of two earlier steps; which steps is configurable."""

    __slots__ = ("__target", "__lags")

    def __init__(self, target: Modality, lags: Tuple[int, int] = (1, 2)) -> None:
        self.__target = target
        self.__lags = lags

    @property
    def kind(self) -> ModuleKind:
        return "and"

    @property
    def target(self) -> Modality:
        return self.__target

    def execute(self, inputs: StepInputs) -> AttentionMap:
        return and_(
            inputs.lookback(self.__target, self.__lags[0]),
            inputs.lookback(self.__target, self.__lags[1]),
        )


class NoOpModule(AbcGraphModule):
    """Carries the previous map forward, padding programs shorter than T."""

    __slots__ = ("__target",)

    def __init__(self, target: Modality) -> None:
        self.__target = target

    @property
    def kind(self) -> ModuleKind:
        return "noop"

    @property
    def target(self) -> Modality:
        return self.__target

    def execute(self, inputs: StepInputs) -> AttentionMap:
        return noop(inputs.lookback(self.__target, 1))
