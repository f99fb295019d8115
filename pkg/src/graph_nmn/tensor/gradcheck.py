"""Finite-difference verification of analytic gradients."""

from typing import Callable, Dict, List, Optional, Sequence, Tuple
import numpy as np
from .tape import backward, recording
from .tensor import Tensor


ScalarFunction = Callable[[], Tensor]


class NonDeterministicError(RuntimeError):
    """Two forward passes at the same point disagreed."""


class GradCheckReport:
    """Outcome of comparing analytic and numeric gradients for one tensor."""

    __slots__ = ("__name", "__max_error", "__worst", "__checked", "__tol")

    def __init__(
        self,
        *,
        name: str,
        max_error: float,
        worst: Optional[Tuple[int, ...]],
        checked: int,
        tol: float,
    ) -> None:
        self.__name = name
        self.__max_error = max_error
        self.__worst = worst
        self.__checked = checked
        self.__tol = tol

    @property
    def name(self) -> str:
        """Which tensor was checked."""
        return self.__name

    @property
    def max_error(self) -> float:
        """Largest relative (or absolute, for tiny gradients) error seen."""
        return self.__max_error

    @property
    def worst(self) -> Optional[Tuple[int, ...]]:
        """Coordinate of the largest error."""
        return self.__worst

    @property
    def checked(self) -> int:
        """Number of coordinates compared."""
        return self.__checked

    @property
    def passed(self) -> bool:
        """Is the largest error under the tolerance?"""
        return self.__max_error < self.__tol

    def as_json(self) -> Dict[str, object]:
        """Plain-data form for reports."""
        return {
            "name": self.__name,
            "max_error": self.__max_error,
            "worst": list(self.__worst) if self.__worst is not None else None,
            "checked": self.__checked,
            "passed": self.passed,
        }

    def __repr__(self) -> str:
        status = "ok" if self.passed else "FAIL"
        return f"GradCheckReport({self.__name}: {status} max_error={self.__max_error:.3g})"


def analytic_gradients(func: ScalarFunction, tensors: Sequence[Tensor]) -> List[np.ndarray]:
    """Gradients of the scalar function with respect to each tensor."""
    for tensor in tensors:
        tensor.zero_grad()
    with recording():
        loss = func()
    if loss.size != 1:
        raise ValueError(f"gradient check needs a scalar function, got shape {loss.shape}")
    if loss.tape is not None:
        backward(loss)
    ret: List[np.ndarray] = []
    for tensor in tensors:
        assert tensor.grad is not None  # nosec: zero_grad above allocated it
        ret.append(np.array(tensor.grad))
    return ret


def grad_check(
    func: ScalarFunction,
    x: Tensor,
    *,
    eps: float = 1e-4,
    tol: float = 1e-3,
    abs_floor: float = 1e-6,
    max_coords: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    name: str = "x",
) -> GradCheckReport:
    """Compare d func / d x with central differences (f(x+eps) - f(x-eps)) / 2eps.

    `func` must rebuild its output from the current values of `x` each call.
    Coordinates whose analytic gradient is below `abs_floor` are compared
    absolutely.  With `max_coords`, a random subset of coordinates is checked.
    """
    return grad_check_many(
        func,
        [(name, x)],
        eps=eps,
        tol=tol,
        abs_floor=abs_floor,
        max_coords=max_coords,
        rng=rng,
    )[0]


def grad_check_many(
    func: ScalarFunction,
    tensors: Sequence[Tuple[str, Tensor]],
    *,
    eps: float = 1e-4,
    tol: float = 1e-3,
    abs_floor: float = 1e-6,
    max_coords: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> List[GradCheckReport]:
    """`grad_check` for several tensors sharing one analytic backward pass."""
    first = func().item()
    second = func().item()
    if first != second:
        raise NonDeterministicError(
            f"function returned {first!r} then {second!r} at the same point"
        )

    analytic = analytic_gradients(func, [t for _, t in tensors])
    reports: List[GradCheckReport] = []
    for (name, tensor), grad in zip(tensors, analytic):
        coords = list(np.ndindex(*tensor.shape))
        if max_coords is not None and len(coords) > max_coords:
            picker = rng if rng is not None else np.random.default_rng(0)
            chosen = picker.choice(len(coords), size=max_coords, replace=False)
            coords = [coords[i] for i in sorted(chosen)]

        max_error = 0.0
        worst: Optional[Tuple[int, ...]] = None
        for coord in coords:
            numeric = _central_difference(func, tensor, coord, eps)
            expected = float(grad[coord])
            if abs(expected) < abs_floor:
                error = abs(expected - numeric)
            else:
                error = abs(expected - numeric) / max(abs(expected), abs(numeric))
            if error > max_error or worst is None:
                max_error = max(error, max_error)
                worst = tuple(int(c) for c in coord)
        reports.append(
            GradCheckReport(
                name=name, max_error=max_error, worst=worst, checked=len(coords), tol=tol
            )
        )
    return reports


def _central_difference(
    func: ScalarFunction,
    tensor: Tensor,
    coord: Tuple[int, ...],
    eps: float,
) -> float:
    original = float(tensor.data[coord])
    try:
        tensor.data[coord] = original + eps
        plus = func().item()
        tensor.data[coord] = original - eps
        minus = func().item()
    finally:
        tensor.data[coord] = original
    return (plus - minus) / (2.0 * eps)
