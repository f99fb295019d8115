"""The define-by-run tape and the backward pass.

A tape is opened per forward pass with `recording()`.  Every operation whose
output requires a gradient appends an entry holding its inputs, its output and
a backward rule.  Because entries are appended as the forward pass runs, the
list is already in topological order; `backward` walks it in reverse.
"""

from typing import Callable, Dict, Iterator, List, Optional, Sequence
import contextlib
import threading
import numpy as np
from .tensor import Tensor


BackwardRule = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class TapeEntry:
    """One recorded operation."""

    __slots__ = ("__op_kind", "__inputs", "__output", "__rule")

    def __init__(
        self,
        *,
        op_kind: str,
        inputs: Sequence[Tensor],
        output: Tensor,
        rule: BackwardRule,
    ) -> None:
        self.__op_kind = op_kind
        self.__inputs = tuple(inputs)
        self.__output = output
        self.__rule = rule

    @property
    def op_kind(self) -> str:
        """Name of the operation."""
        return self.__op_kind

    @property
    def inputs(self) -> Sequence[Tensor]:
        """The operation inputs, in argument order."""
        return self.__inputs

    @property
    def output(self) -> Tensor:
        """The tensor the operation produced."""
        return self.__output

    def input_grads(self, output_grad: np.ndarray) -> Sequence[Optional[np.ndarray]]:
        """Apply the chain rule for this operation."""
        return self.__rule(output_grad)


class Tape:
    """Ordered record of the operations of one forward pass."""

    __slots__ = ("__entries",)

    def __init__(self) -> None:
        self.__entries: List[TapeEntry] = []

    def record(
        self,
        op_kind: str,
        inputs: Sequence[Tensor],
        output: Tensor,
        rule: BackwardRule,
    ) -> None:
        """Append an operation; its output becomes owned by this tape."""
        output.attach(self)
        self.__entries.append(TapeEntry(op_kind=op_kind, inputs=inputs, output=output, rule=rule))

    @property
    def entries(self) -> Sequence[TapeEntry]:
        """Recorded operations, oldest first."""
        return tuple(self.__entries)

    def __len__(self) -> int:
        return len(self.__entries)

    def backward(self, loss: Tensor) -> None:
        """Fill the grad buffer of every leaf reachable from the scalar loss."""
        if loss.size != 1:
            raise ValueError(f"backward requires a scalar loss, got shape {loss.shape}")
        if not self.__entries:
            raise ValueError("backward called on an empty tape")
        if loss.tape is not self:
            raise ValueError("loss was not recorded on this tape")

        grads: Dict[int, np.ndarray] = {loss.node_id: np.ones_like(loss.data)}
        leaves: Dict[int, Tensor] = {}
        for entry in reversed(self.__entries):
            # Popping guarantees each node is visited once per pass.
            out_grad = grads.pop(entry.output.node_id, None)
            if out_grad is None:
                continue
            for tensor, grad in zip(entry.inputs, entry.input_grads(out_grad)):
                if grad is None or not tensor.requires_grad:
                    continue
                key = tensor.node_id
                if key in grads:
                    grads[key] = grads[key] + grad
                else:
                    grads[key] = grad
                if tensor.is_leaf:
                    leaves[key] = tensor
        for key, leaf in leaves.items():
            leaf.accumulate_grad(grads[key])


class _ActiveTapes(threading.local):
    def __init__(self) -> None:
        super().__init__()
        self.stack: List[Tape] = []


_ACTIVE = _ActiveTapes()


def active_tape() -> Optional[Tape]:
    """The innermost tape recording on this thread, if any."""
    if _ACTIVE.stack:
        return _ACTIVE.stack[-1]
    return None


@contextlib.contextmanager
def recording() -> Iterator[Tape]:
    """Record the operations run inside the block on a fresh tape."""
    tape = Tape()
    _ACTIVE.stack.append(tape)
    try:
        yield tape
    finally:
        _ACTIVE.stack.pop()


@contextlib.contextmanager
def no_recording() -> Iterator[None]:
    """Run the block without recording, even inside a `recording()` block."""
    saved = _ACTIVE.stack
    _ACTIVE.stack = []
    try:
        yield
    finally:
        _ACTIVE.stack = saved


def backward(loss: Tensor) -> None:
    """Run the backward pass of the tape that recorded the loss."""
    if loss.size != 1:
        raise ValueError(f"backward requires a scalar loss, got shape {loss.shape}")
    tape = loss.tape
    if tape is None:
        raise ValueError("loss was not produced on a recording tape")
    tape.backward(loss)
