"""Per-step query and soft module-weight generation."""

from typing import Optional
import numpy as np
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
from .encoder import QuestionEncoding


class ControllerParams:
    """The three perceptrons of the controller."""

    __slots__ = ("__merge", "__word", "__module")

    def __init__(self, *, merge: MlpParams, word: MlpParams, module: MlpParams) -> None:
        dim = word.input_dim
        if merge.input_dim != 2 * dim or merge.output_dim != dim or module.input_dim != dim:
            raise DimensionError("controller params", (merge.input_dim, merge.output_dim), (dim,))
        if word.output_dim != 1:
            raise DimensionError("controller params", (word.output_dim,), (1,))
        self.__merge = merge
        self.__word = word
        self.__module = module

    @property
    def merge(self) -> MlpParams:
        """u = f([q; c_{t-1}])."""
        return self.__merge

    @property
    def word(self) -> MlpParams:
        """Scores each word state against u."""
        return self.__word

    @property
    def module(self) -> MlpParams:
        """Module-weight logits from u."""
        return self.__module

    @property
    def model_dim(self) -> int:
        """d."""
        return self.__word.input_dim

    @property
    def module_count(self) -> int:
        """|M|."""
        return self.__module.output_dim


def create_controller_params(
    store: ParameterStore,
    name: str,
    *,
    model_dim: int,
    module_count: int,
    depth: int = 2,
) -> ControllerParams:
    """Register the controller perceptrons for an inventory of `module_count` instances."""
    return ControllerParams(
        merge=create_mlp(
            store, f"{name}.merge", mlp_dims(2 * model_dim, model_dim, model_dim, depth)
        ),
        word=create_mlp(store, f"{name}.word", mlp_dims(model_dim, model_dim, 1, depth)),
        module=create_mlp(
            store, f"{name}.module", mlp_dims(model_dim, model_dim, module_count, depth)
        ),
    )


class StepOutput:
    """What the controller emits at one step."""

    __slots__ = ("__query", "__module_weights", "__word_attention", "__intermediate")

    def __init__(
        self,
        *,
        query: Tensor,
        module_weights: Tensor,
        word_attention: Tensor,
        intermediate: Tensor,
    ) -> None:
        self.__query = query
        self.__module_weights = module_weights
        self.__word_attention = word_attention
        self.__intermediate = intermediate

    @property
    def query(self) -> Tensor:
        """c_t."""
        return self.__query

    @property
    def module_weights(self) -> Tensor:
        """w_t, a distribution over the inventory."""
        return self.__module_weights

    @property
    def word_attention(self) -> Tensor:
        """alpha, a distribution over the valid tokens (zero on padding)."""
        return self.__word_attention

    @property
    def intermediate(self) -> Tensor:
        """u."""
        return self.__intermediate


def step_controller(
    params: ControllerParams,
    encoding: QuestionEncoding,
    prev_query: Tensor,
    module_mask: Optional[np.ndarray] = None,
) -> StepOutput:
    """One controller step.

    u = f([q; c_{t-1}]), alpha = softmax(f(u * h_l)) over valid words,
    c_t = sum_l alpha_l h_l and w = softmax(f(u)).  Modules where `module_mask`
    is False get weight exactly 0.
    """
    dim = params.model_dim
    if encoding.question.shape != (dim,) or prev_query.shape != (dim,):
        raise DimensionError("step_controller", encoding.question.shape, prev_query.shape, (dim,))
    states = encoding.word_states
    merged = mlp_forward(params.merge, ops.concat([encoding.question, prev_query]))
    scores = mlp_forward(params.word, ops.multiply(states, merged))
    alpha = ops.softmax(ops.reshape(scores, (encoding.padded_length,)), mask=encoding.mask)
    return StepOutput(
        query=ops.matmul(alpha, states),
        module_weights=ops.softmax(mlp_forward(params.module, merged), mask=module_mask),
        word_attention=alpha,
        intermediate=merged,
    )
