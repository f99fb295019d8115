"""Named storage for every trainable tensor of a model."""

from typing import Dict, Iterator, Mapping, Sequence, Tuple
import math
import numpy as np
from .tensor import Tensor, parameter


class ParameterStore:
    """Trainable tensors keyed by stable, dotted names.

    New parameters are drawn uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)]
    using the store's seeded generator, so two stores built with the same seed
    and the same creation order hold identical values.
    """

    __slots__ = ("__params", "__rng")

    def __init__(self, rng: np.random.Generator) -> None:
        self.__params: Dict[str, Tensor] = {}
        self.__rng = rng

    def create(self, name: str, shape: Tuple[int, ...], fan_in: int) -> Tensor:
        """Create and register a uniformly initialized parameter."""
        if name in self.__params:
            raise ValueError(f"duplicate parameter name {name}")
        bound = 1.0 / math.sqrt(max(fan_in, 1))
        ret = parameter(self.__rng.uniform(-bound, bound, size=shape))
        self.__params[name] = ret
        return ret

    def get(self, name: str) -> Tensor:
        """Look up a parameter by name."""
        return self.__params[name]

    def names(self) -> Sequence[str]:
        """All names, in creation order."""
        return tuple(self.__params.keys())

    def items(self) -> Iterator[Tuple[str, Tensor]]:
        """(name, tensor) pairs, in creation order."""
        return iter(self.__params.items())

    def __len__(self) -> int:
        return len(self.__params)

    def __contains__(self, name: object) -> bool:
        return name in self.__params

    def count(self) -> int:
        """Total number of scalar parameters."""
        return sum(t.size for t in self.__params.values())

    def zero_grad(self) -> None:
        """Give every parameter a zero gradient buffer."""
        for tensor in self.__params.values():
            tensor.zero_grad()

    def state(self) -> Dict[str, np.ndarray]:
        """A copy of every parameter value."""
        return {name: np.array(t.data) for name, t in self.__params.items()}

    def load_state(self, state: Mapping[str, np.ndarray]) -> None:
        """Overwrite values in place; names and shapes must match exactly."""
        missing = set(self.__params) - set(state)
        extra = set(state) - set(self.__params)
        if missing or extra:
            raise ValueError(
                f"parameter names differ: missing {sorted(missing)}, unexpected {sorted(extra)}"
            )
        for name, tensor in self.__params.items():
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != tensor.data.shape:
                raise ValueError(
                    f"parameter {name} has shape {value.shape}, expected {tensor.data.shape}"
                )
            tensor.data[...] = value
