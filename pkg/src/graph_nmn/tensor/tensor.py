"""Dense float64 tensors that take part in reverse-mode differentiation."""

from typing import Optional, Tuple, Union, Sequence, TYPE_CHECKING
import itertools
import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .tape import Tape


ArrayLike = Union[np.ndarray, float, int, Sequence[float], Sequence[Sequence[float]]]

# next() on itertools.count is atomic under the GIL, so ids stay unique across threads.
_NODE_IDS = itertools.count(1)


class DimensionError(ValueError):
    """An operation received tensors with incompatible shapes."""

    def __init__(self, op_kind: str, *shapes: Tuple[int, ...]) -> None:
        super().__init__(
            f"{op_kind}: incompatible shapes " + ", ".join(str(tuple(s)) for s in shapes)
        )
        self.op_kind = op_kind
        self.shapes = shapes


class Tensor:
    """An n-dimensional float64 array with an optional gradient buffer.

    Tensors created directly are leaves.  Tensors returned by an operation
    while a tape is recording are attached to that tape, which is what
    `backward` replays.
    """

    __slots__ = ("__data", "__grad", "__node_id", "__requires_grad", "__tape")

    def __init__(self, data: ArrayLike, *, requires_grad: bool = False) -> None:
        arr = np.asarray(data, dtype=np.float64)
        if any(dim <= 0 for dim in arr.shape):
            raise DimensionError("tensor", arr.shape)
        self.__data = arr
        self.__grad: Optional[np.ndarray] = None
        self.__node_id = next(_NODE_IDS)
        self.__requires_grad = requires_grad
        self.__tape: Optional["Tape"] = None

    @property
    def data(self) -> np.ndarray:
        """The values.  Optimizers update this in place."""
        return self.__data

    @property
    def shape(self) -> Tuple[int, ...]:
        """The dimension sizes."""
        return tuple(self.__data.shape)

    @property
    def size(self) -> int:
        """Number of entries."""
        return int(self.__data.size)

    @property
    def node_id(self) -> int:
        """Identity of this tensor on a tape."""
        return self.__node_id

    @property
    def requires_grad(self) -> bool:
        """Does the gradient flow back through this tensor?"""
        return self.__requires_grad

    @property
    def grad(self) -> Optional[np.ndarray]:
        """The accumulated gradient, same shape as data, or None before any backward pass."""
        return self.__grad

    @property
    def tape(self) -> Optional["Tape"]:
        """The tape that recorded the operation producing this tensor."""
        return self.__tape

    @property
    def is_leaf(self) -> bool:
        """Leaves are not the output of any recorded operation."""
        return self.__tape is None

    def item(self) -> float:
        """The value of a single-entry tensor."""
        if self.__data.size != 1:
            raise DimensionError("item", self.shape)
        return float(self.__data.reshape(()))

    def zero_grad(self) -> None:
        """Reset the gradient buffer to zeros."""
        self.__grad = np.zeros_like(self.__data)

    def accumulate_grad(self, grad: np.ndarray) -> None:
        """Add to the gradient buffer."""
        if grad.shape != self.__data.shape:
            raise DimensionError("accumulate_grad", self.shape, grad.shape)
        if self.__grad is None:
            self.__grad = np.array(grad, dtype=np.float64)
        else:
            self.__grad = self.__grad + grad

    def attach(self, tape: "Tape") -> None:
        """Mark this tensor as the output of an operation recorded on the tape."""
        if self.__tape is not None and self.__tape is not tape:
            raise RuntimeError(f"tensor {self.__node_id} is already recorded on another tape")
        self.__tape = tape

    def detach(self) -> "Tensor":
        """A leaf copy of the values that gradients do not flow through."""
        return Tensor(np.array(self.__data))

    def __repr__(self) -> str:
        return (
            f"Tensor(shape={self.shape}, id={self.__node_id}, "
            f"requires_grad={self.__requires_grad})"
        )


def as_tensor(value: Union[Tensor, ArrayLike]) -> Tensor:
    """Wrap a constant input; tensors pass through unchanged."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def parameter(data: ArrayLike) -> Tensor:
    """Create a trainable leaf tensor owning a private copy of the data."""
    return Tensor(np.array(data, dtype=np.float64), requires_grad=True)
