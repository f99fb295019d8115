"""The per-step record of a reasoning run."""

from typing import Mapping, Sequence
import numpy as np
from ..graph import Modality


def _frozen(values: np.ndarray) -> np.ndarray:
    ret = np.array(values, dtype=np.float64)
    ret.flags.writeable = False
    return ret


class LayerAttention:
    """Node attention of one layer after a step, with the node labels."""

    __slots__ = ("__weights", "__labels")

    def __init__(self, weights: np.ndarray, labels: Sequence[str]) -> None:
        if len(weights) != len(labels):
            raise ValueError(f"{len(weights)} attention weights for {len(labels)} nodes")
        self.__weights = _frozen(weights)
        self.__labels = tuple(labels)

    @property
    def weights(self) -> np.ndarray:
        """The distribution over nodes."""
        return self.__weights

    @property
    def labels(self) -> Sequence[str]:
        """Node labels, index-aligned with the weights."""
        return self.__labels

    @property
    def argmax_label(self) -> str:
        """The most attended node."""
        return self.__labels[int(np.argmax(self.__weights))]


class StepRecord:
    """Module weights, word attention and node attention at one step."""

    __slots__ = (
        "__step",
        "__module_names",
        "__module_weights",
        "__tokens",
        "__word_attention",
        "__layers",
    )

    def __init__(
        self,
        *,
        step: int,
        module_names: Sequence[str],
        module_weights: np.ndarray,
        tokens: Sequence[str],
        word_attention: np.ndarray,
        layers: Mapping[Modality, LayerAttention],
    ) -> None:
        if len(module_names) != len(module_weights):
            raise ValueError(
                f"{len(module_weights)} module weights for {len(module_names)} modules"
            )
        if len(word_attention) < len(tokens):
            raise ValueError(f"{len(word_attention)} word weights for {len(tokens)} tokens")
        self.__step = step
        self.__module_names = tuple(module_names)
        self.__module_weights = _frozen(module_weights)
        self.__tokens = tuple(tokens)
        self.__word_attention = _frozen(word_attention)
        self.__layers = dict(layers)

    @property
    def step(self) -> int:
        """Zero-based step index."""
        return self.__step

    @property
    def module_names(self) -> Sequence[str]:
        """Inventory names."""
        return self.__module_names

    @property
    def module_weights(self) -> np.ndarray:
        """w_t."""
        return self.__module_weights

    @property
    def argmax_module(self) -> str:
        """The module with the largest weight."""
        return self.__module_names[int(np.argmax(self.__module_weights))]

    @property
    def argmax_kind(self) -> str:
        """Family of the module with the largest weight."""
        return self.argmax_module.split(".", 1)[0]

    @property
    def tokens(self) -> Sequence[str]:
        """The question tokens."""
        return self.__tokens

    @property
    def word_attention(self) -> np.ndarray:
        """alpha over the padded question; zero past the tokens."""
        return self.__word_attention

    @property
    def argmax_token(self) -> str:
        """The most attended question word."""
        return self.__tokens[int(np.argmax(self.__word_attention[: len(self.__tokens)]))]

    def layer(self, modality: Modality) -> LayerAttention:
        """Attention over one layer after this step."""
        return self.__layers[modality]


class ReasoningTrace:
    """Everything a run decided, step by step, and the answer it reached."""

    __slots__ = ("__tokens", "__steps", "__answers", "__logits")

    def __init__(
        self,
        *,
        tokens: Sequence[str],
        steps: Sequence[StepRecord],
        answers: Sequence[str],
        logits: np.ndarray,
    ) -> None:
        if len(answers) != len(logits):
            raise ValueError(f"{len(logits)} logits for {len(answers)} answers")
        self.__tokens = tuple(tokens)
        self.__steps = tuple(steps)
        self.__answers = tuple(answers)
        self.__logits = _frozen(logits)

    @property
    def tokens(self) -> Sequence[str]:
        """The question tokens."""
        return self.__tokens

    @property
    def steps(self) -> Sequence[StepRecord]:
        """One record per reasoning step."""
        return self.__steps

    @property
    def answers(self) -> Sequence[str]:
        """The answer vocabulary, index-aligned with the logits."""
        return self.__answers

    @property
    def logits(self) -> np.ndarray:
        """Answer logits."""
        return self.__logits

    @property
    def answer(self) -> str:
        """The predicted answer."""
        return self.__answers[int(np.argmax(self.__logits))]

    def final_attention(self, modality: Modality) -> LayerAttention:
        """Attention over one layer after the last step."""
        return self.__steps[-1].layer(modality)
