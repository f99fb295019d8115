"""Multilayer perceptrons (the f_mlp of every module)."""

from typing import Callable, Literal, Mapping, Sequence, Tuple
from . import ops
from .params import ParameterStore
from .tensor import DimensionError, Tensor


Activation = Literal["relu", "tanh", "linear"]

_ACTIVATIONS: Mapping[Activation, Callable[[Tensor], Tensor]] = {
    "relu": ops.relu,
    "tanh": ops.tanh,
    "linear": lambda x: x,
}


class MlpParams:
    """Weights, biases and hidden activations of one perceptron.

    Weights are stored input-major (fan_in x fan_out), so a layer computes
    `x @ W + b` for a single vector or for a matrix of row vectors.
    """

    __slots__ = ("__layers", "__activations")

    def __init__(
        self,
        layers: Sequence[Tuple[Tensor, Tensor]],
        activations: Sequence[Activation],
    ) -> None:
        if not layers:
            raise ValueError("an MLP needs at least one layer")
        if len(activations) != len(layers) - 1:
            raise ValueError(
                f"{len(layers)} layers need {len(layers) - 1} hidden activations, "
                f"got {len(activations)}"
            )
        for index, (weight, bias) in enumerate(layers):
            if weight.data.ndim != 2 or bias.shape != (weight.shape[1],):
                raise DimensionError(f"mlp layer {index}", weight.shape, bias.shape)
            if index > 0 and layers[index - 1][0].shape[1] != weight.shape[0]:
                raise DimensionError(
                    f"mlp layer {index}", layers[index - 1][0].shape, weight.shape
                )
        self.__layers = tuple(layers)
        self.__activations = tuple(activations)

    @property
    def layers(self) -> Sequence[Tuple[Tensor, Tensor]]:
        """(weight, bias) pairs, input layer first."""
        return self.__layers

    @property
    def activations(self) -> Sequence[Activation]:
        """Activation after each hidden layer; the output layer is linear."""
        return self.__activations

    @property
    def input_dim(self) -> int:
        """Width of the input."""
        return self.__layers[0][0].shape[0]

    @property
    def output_dim(self) -> int:
        """Width of the output."""
        return self.__layers[-1][0].shape[1]


def create_mlp(
    store: ParameterStore,
    name: str,
    dims: Sequence[int],
    hidden_activation: Activation = "relu",
) -> MlpParams:
    """Register the parameters of an MLP with layer widths `dims`.

    `dims` lists the input width, each hidden width and the output width, so
    the default two-layer f_mlp is `[d_in, d_model, d_out]`.
    """
    if len(dims) < 2:
        raise ValueError(f"MLP {name} needs at least input and output widths")
    layers = []
    for index, (fan_in, fan_out) in enumerate(zip(dims[:-1], dims[1:])):
        layers.append(
            (
                store.create(f"{name}.w{index}", (fan_in, fan_out), fan_in),
                store.create(f"{name}.b{index}", (fan_out,), fan_in),
            )
        )
    return MlpParams(layers, [hidden_activation] * (len(layers) - 1))


def mlp_dims(d_in: int, d_hidden: int, d_out: int, depth: int) -> Sequence[int]:
    """Layer widths for an MLP of `depth` affine layers."""
    if depth < 1:
        raise ValueError(f"MLP depth must be positive, got {depth}")
    return [d_in, *([d_hidden] * (depth - 1)), d_out]


def mlp_forward(params: MlpParams, x: Tensor) -> Tensor:
    """Affine + activation stack with a linear output layer."""
    if x.shape[-1] != params.input_dim:
        raise DimensionError("mlp_forward", x.shape, params.layers[0][0].shape)
    out = x
    last = len(params.layers) - 1
    for index, (weight, bias) in enumerate(params.layers):
        out = ops.add(ops.matmul(out, weight), bias)
        if index < last:
            out = _ACTIVATIONS[params.activations[index]](out)
    return out
