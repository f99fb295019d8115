"""Single-layer LSTM question encoder."""

from typing import Sequence, Tuple
import numpy as np
from ..builder import EmbeddingTable
from ..tensor import DimensionError, ParameterStore, Tensor, ops


DEFAULT_MAX_QUESTION_LENGTH = 20

# Gate order inside LstmParams.
GATES: Tuple[str, ...] = ("input", "forget", "output", "cell")


class LstmGate:
    """x W_x + h W_h + b for one gate."""

    __slots__ = ("__w_input", "__w_hidden", "__bias")

    def __init__(self, *, w_input: Tensor, w_hidden: Tensor, bias: Tensor) -> None:
        hidden = w_hidden.shape[1]
        if w_input.shape[1] != hidden or w_hidden.shape[0] != hidden or bias.shape != (hidden,):
            raise DimensionError("lstm gate", w_input.shape, w_hidden.shape, bias.shape)
        self.__w_input = w_input
        self.__w_hidden = w_hidden
        self.__bias = bias

    @property
    def w_input(self) -> Tensor:
        """embedding_dim x hidden."""
        return self.__w_input

    @property
    def w_hidden(self) -> Tensor:
        """hidden x hidden."""
        return self.__w_hidden

    @property
    def bias(self) -> Tensor:
        """hidden."""
        return self.__bias

    def preactivation(self, x: Tensor, h: Tensor) -> Tensor:
        """The gate input before its nonlinearity."""
        return ops.add(
            ops.add(ops.matmul(x, self.__w_input), ops.matmul(h, self.__w_hidden)),
            self.__bias,
        )


class LstmParams:
    """The four gates of one LSTM cell."""

    __slots__ = ("__gates",)

    def __init__(self, gates: Sequence[LstmGate]) -> None:
        if len(gates) != len(GATES):
            raise ValueError(f"an LSTM cell has {len(GATES)} gates, got {len(gates)}")
        self.__gates = tuple(gates)

    @property
    def input_gate(self) -> LstmGate:
        """i."""
        return self.__gates[0]

    @property
    def forget_gate(self) -> LstmGate:
        """f."""
        return self.__gates[1]

    @property
    def output_gate(self) -> LstmGate:
        """o."""
        return self.__gates[2]

    @property
    def cell_gate(self) -> LstmGate:
        """g, the candidate cell state."""
        return self.__gates[3]

    @property
    def input_dim(self) -> int:
        """Word embedding width."""
        return self.__gates[0].w_input.shape[0]

    @property
    def hidden_dim(self) -> int:
        """State width d."""
        return self.__gates[0].w_hidden.shape[0]


def create_lstm_params(
    store: ParameterStore, name: str, *, input_dim: int, hidden_dim: int
) -> LstmParams:
    """Register the parameters of an LSTM cell."""
    return LstmParams(
        [
            LstmGate(
                w_input=store.create(f"{name}.{gate}.w_input", (input_dim, hidden_dim), input_dim),
                w_hidden=store.create(
                    f"{name}.{gate}.w_hidden", (hidden_dim, hidden_dim), hidden_dim
                ),
                bias=store.create(f"{name}.{gate}.bias", (hidden_dim,), hidden_dim),
            )
            for gate in GATES
        ]
    )


def lstm_cell(params: LstmParams, x: Tensor, h: Tensor, c: Tensor) -> Tuple[Tensor, Tensor]:
    """One recurrence: returns the new (h, c)."""
    i = ops.sigmoid(params.input_gate.preactivation(x, h))
    f = ops.sigmoid(params.forget_gate.preactivation(x, h))
    o = ops.sigmoid(params.output_gate.preactivation(x, h))
    g = ops.tanh(params.cell_gate.preactivation(x, h))
    c_next = ops.add(ops.multiply(f, c), ops.multiply(i, g))
    return ops.multiply(o, ops.tanh(c_next)), c_next


class QuestionEncoding:
    """Per-word LSTM states padded to a fixed length, and the question vector."""

    __slots__ = ("__word_states", "__question", "__tokens", "__valid_length")

    def __init__(
        self,
        *,
        word_states: Tensor,
        question: Tensor,
        tokens: Sequence[str],
        valid_length: int,
    ) -> None:
        if not 1 <= valid_length <= word_states.shape[0]:
            raise ValueError(
                f"valid length {valid_length} outside 1..{word_states.shape[0]}"
            )
        self.__word_states = word_states
        self.__question = question
        self.__tokens = tuple(tokens)
        self.__valid_length = valid_length

    @property
    def word_states(self) -> Tensor:
        """L x d; rows past the valid length are zero."""
        return self.__word_states

    @property
    def question(self) -> Tensor:
        """q, the state at the last valid token."""
        return self.__question

    @property
    def tokens(self) -> Sequence[str]:
        """The encoded (possibly truncated) tokens."""
        return self.__tokens

    @property
    def valid_length(self) -> int:
        """How many leading rows of `word_states` belong to real tokens."""
        return self.__valid_length

    @property
    def padded_length(self) -> int:
        """L."""
        return self.__word_states.shape[0]

    @property
    def mask(self) -> np.ndarray:
        """True on real tokens, False on padding."""
        return np.arange(self.padded_length) < self.__valid_length


def encode_question(
    tokens: Sequence[str],
    emb: EmbeddingTable,
    params: LstmParams,
    max_length: int = DEFAULT_MAX_QUESTION_LENGTH,
) -> QuestionEncoding:
    """Run the LSTM over the embedded tokens, truncated or padded to `max_length`."""
    if not tokens:
        raise ValueError("cannot encode an empty question")
    if emb.dim != params.input_dim:
        raise DimensionError("encode_question", (emb.dim,), (params.input_dim,))
    kept = tuple(tokens[:max_length])
    hidden = params.hidden_dim
    h = Tensor(np.zeros(hidden))
    c = Tensor(np.zeros(hidden))
    states = []
    for token in kept:
        h, c = lstm_cell(params, Tensor(emb.vector(token)), h, c)
        states.append(h)
    padding = [Tensor(np.zeros(hidden))] * (max_length - len(kept))
    return QuestionEncoding(
        word_states=ops.stack(states + padding),
        question=h,
        tokens=kept,
        valid_length=len(kept),
    )
