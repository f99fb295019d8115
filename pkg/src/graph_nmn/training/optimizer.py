"""Adam over a parameter store."""

from typing import Dict
import logging
import numpy as np
from ..tensor import ParameterStore


_LOG = logging.getLogger(__name__)


class DivergenceError(RuntimeError):
    """A loss or gradient stopped being finite."""


class Adam:
    """Adaptive moment estimation with bias correction.

    Moments are kept per parameter name; `step` updates the store's tensors in
    place from their accumulated gradients.
    """

    __slots__ = ("__store", "__lr", "__beta1", "__beta2", "__eps", "__t", "__m", "__v")

    def __init__(
        self,
        store: ParameterStore,
        *,
        lr: float = 0.001,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ) -> None:
        if lr < 0.0:
            raise ValueError(f"learning rate must be nonnegative, got {lr}")
        if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
            raise ValueError(f"moment decays must be in [0, 1), got {beta1}, {beta2}")
        self.__store = store
        self.__lr = lr
        self.__beta1 = beta1
        self.__beta2 = beta2
        self.__eps = eps
        self.__t = 0
        self.__m: Dict[str, np.ndarray] = {}
        self.__v: Dict[str, np.ndarray] = {}

    @property
    def lr(self) -> float:
        """Step size."""
        return self.__lr

    @property
    def step_count(self) -> int:
        """Updates applied so far."""
        return self.__t

    def step(self) -> None:
        """Apply one update.  A missing gradient counts as zero."""
        for name, tensor in self.__store.items():
            grad = tensor.grad
            if grad is not None and not np.all(np.isfinite(grad)):
                bad = int(np.sum(~np.isfinite(grad)))
                raise DivergenceError(
                    f"gradient of {name} has {bad} non-finite entries at update {self.__t + 1}"
                )
        self.__t += 1
        correction1 = 1.0 - self.__beta1**self.__t
        correction2 = 1.0 - self.__beta2**self.__t
        for name, tensor in self.__store.items():
            grad = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
            m = self.__m.get(name)
            v = self.__v.get(name)
            if m is None or v is None:
                m = np.zeros_like(tensor.data)
                v = np.zeros_like(tensor.data)
            m = self.__beta1 * m + (1.0 - self.__beta1) * grad
            v = self.__beta2 * v + (1.0 - self.__beta2) * grad * grad
            self.__m[name] = m
            self.__v[name] = v
            tensor.data[...] -= self.__lr * (m / correction1) / (
                np.sqrt(v / correction2) + self.__eps
            )
        _LOG.debug("adam update %d applied", self.__t)
