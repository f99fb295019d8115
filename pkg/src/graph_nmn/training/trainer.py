"""Mini-batch training and evaluation of a graph module network."""

from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple
import logging
import math
import numpy as np
from ..controller import GraphModuleNetwork, create_network, layer_dims
from ..tensor import backward, no_recording, ops, recording
from .config import TrainConfig
from .dataset import INIT_STREAM, SHUFFLE_STREAM, Dataset, seeded_rng
from .loss import cross_entropy_loss
from .optimizer import Adam, DivergenceError
from .synthetic import SyntheticTask


_LOG = logging.getLogger(__name__)


class Metrics:
    """Accuracy overall and per hop count, plus the per-epoch training loss."""

    __slots__ = ("__accuracy", "__per_hop", "__loss_curve", "__count")

    def __init__(
        self,
        *,
        accuracy: float,
        per_hop: Mapping[int, float],
        loss_curve: Sequence[float] = (),
        count: int,
    ) -> None:
        if not 0.0 <= accuracy <= 1.0:
            raise ValueError(f"accuracy must be in [0, 1], got {accuracy}")
        self.__accuracy = float(accuracy)
        self.__per_hop = {int(k): float(v) for k, v in sorted(per_hop.items())}
        self.__loss_curve = tuple(float(v) for v in loss_curve)
        self.__count = count

    @property
    def accuracy(self) -> float:
        """Fraction of examples whose argmax answer is correct."""
        return self.__accuracy

    @property
    def per_hop(self) -> Mapping[int, float]:
        """Accuracy restricted to the examples of each hop count."""
        return self.__per_hop

    @property
    def loss_curve(self) -> Sequence[float]:
        """Mean training loss of each epoch; empty for a pure evaluation."""
        return self.__loss_curve

    @property
    def count(self) -> int:
        """Examples evaluated."""
        return self.__count

    def with_loss_curve(self, loss_curve: Sequence[float]) -> "Metrics":
        """A copy carrying a training loss curve."""
        return Metrics(
            accuracy=self.__accuracy,
            per_hop=self.__per_hop,
            loss_curve=loss_curve,
            count=self.__count,
        )

    def as_json(self) -> Dict[str, object]:
        """Plain-data form; hop counts become string keys."""
        return {
            "accuracy": self.__accuracy,
            "per_hop": {str(k): v for k, v in self.__per_hop.items()},
            "loss_curve": list(self.__loss_curve),
            "count": self.__count,
        }

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Metrics) and other.as_json() == self.as_json()

    def __hash__(self) -> int:
        return hash((self.__accuracy, self.__count, self.__loss_curve))

    def __repr__(self) -> str:
        return f"Metrics(accuracy={self.__accuracy:.4f}, count={self.__count})"


def create_model(config: TrainConfig, dataset: Dataset) -> GraphModuleNetwork:
    """An untrained network sized for the dataset, initialized from the config's seed."""
    if not dataset.train:
        raise ValueError("the training split is empty")
    return create_network(
        seeded_rng(config.seed, INIT_STREAM),
        dims=layer_dims(dataset.train[0].graphs),
        emb=dataset.emb,
        answers=dataset.answers,
        model_dim=config.model_dim,
        steps=config.steps,
        mlp_layers=config.mlp_layers,
        max_question_length=config.max_question_length,
        and_lags=config.and_inputs,
        ablate=config.ablate,
    )


def train(
    config: TrainConfig,
    dataset: Dataset,
    *,
    shuffle_rng: Optional[np.random.Generator] = None,
) -> Tuple[GraphModuleNetwork, Metrics]:
    """Train for `config.epochs` epochs and report held-out metrics.

    The batch gradient is the mean of the per-example gradients.  Each example
    is recorded on its own tape with its loss already divided by the batch
    size, so the leaves accumulate the mean directly.
    """
    if not dataset.train:
        raise ValueError("the training split is empty")
    if not dataset.test:
        raise ValueError("the test split is empty")
    network = create_model(config, dataset)
    rng = shuffle_rng if shuffle_rng is not None else seeded_rng(config.seed, SHUFFLE_STREAM)
    optimizer = Adam(
        network.store,
        lr=config.learning_rate,
        beta1=config.beta1,
        beta2=config.beta2,
        eps=config.adam_eps,
    )
    loss_curve: List[float] = []
    for epoch in range(config.epochs):
        order = rng.permutation(len(dataset.train))
        total = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = [dataset.train[int(i)] for i in order[start : start + config.batch_size]]
            total += _train_batch(network, optimizer, batch, epoch)
        mean_loss = total / len(order)
        loss_curve.append(mean_loss)
        _LOG.info("epoch %d/%d: mean loss %.6f", epoch + 1, config.epochs, mean_loss)

    metrics = evaluate(network, dataset.test).with_loss_curve(loss_curve)
    _LOG.info("held-out accuracy %.4f over %d examples", metrics.accuracy, metrics.count)
    return network, metrics


def _train_batch(
    network: GraphModuleNetwork,
    optimizer: Adam,
    batch: Sequence[SyntheticTask],
    epoch: int,
) -> float:
    network.store.zero_grad()
    total = 0.0
    for task in batch:
        with recording():
            logits, _ = network.run(task.graphs, task.tokens)
            loss = cross_entropy_loss(logits, network.answer_index(task.answer))
            if not math.isfinite(loss.item()):
                raise DivergenceError(
                    f"loss became {loss.item()} in epoch {epoch + 1}"
                    f" at update {optimizer.step_count + 1}"
                )
            backward(ops.scale(loss, 1.0 / len(batch)))
        total += loss.item()
    optimizer.step()
    return total


def predict(
    network: GraphModuleNetwork,
    task: SyntheticTask,
    ablate: Optional[Iterable[str]] = None,
) -> str:
    """The network's answer to one task, without recording."""
    with no_recording():
        _, trace = network.run(task.graphs, task.tokens, ablate)
    return trace.answer


def evaluate(
    network: GraphModuleNetwork,
    tasks: Sequence[SyntheticTask],
    ablate: Optional[Iterable[str]] = None,
) -> Metrics:
    """Argmax accuracy over the tasks, overall and per hop count.

    `ablate` replaces the network's own ablations for this evaluation only.
    """
    if not tasks:
        raise ValueError("cannot evaluate on an empty dataset")
    correct: Dict[int, int] = {}
    seen: Dict[int, int] = {}
    for task in tasks:
        seen[task.hops] = seen.get(task.hops, 0) + 1
        if predict(network, task, ablate) == task.answer:
            correct[task.hops] = correct.get(task.hops, 0) + 1
    total_correct = sum(correct.values())
    return Metrics(
        accuracy=total_correct / len(tasks),
        per_hop={hops: correct.get(hops, 0) / count for hops, count in seen.items()},
        count=len(tasks),
    )
