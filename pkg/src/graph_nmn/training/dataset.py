"""In-memory train/test splits and how to generate them."""

from typing import Sequence
import logging
import numpy as np
from ..builder import EmbeddingTable
from .config import TrainConfig
from .synthetic import SyntheticTask, SyntheticWorld, generate_tasks


_LOG = logging.getLogger(__name__)

# Independent generator streams derived from the configured seed.
DATA_STREAM = 1
INIT_STREAM = 2
SHUFFLE_STREAM = 3


def seeded_rng(seed: int, stream: int) -> np.random.Generator:
    """The generator for one purpose (data, initialization, shuffling) of a seed."""
    return np.random.default_rng([seed, stream])


class Dataset:
    """Train and test tasks, the word vectors their questions use, and the answer vocabulary."""

    __slots__ = ("__train", "__test", "__emb", "__answers")

    def __init__(
        self,
        *,
        train: Sequence[SyntheticTask],
        test: Sequence[SyntheticTask],
        emb: EmbeddingTable,
        answers: Sequence[str],
    ) -> None:
        if not answers:
            raise ValueError("the answer vocabulary is empty")
        known = set(answers)
        for split, tasks in (("train", train), ("test", test)):
            for index, task in enumerate(tasks):
                if task.answer not in known:
                    raise ValueError(
                        f"{split} task {index} has answer {task.answer!r} outside the vocabulary"
                    )
        self.__train = tuple(train)
        self.__test = tuple(test)
        self.__emb = emb
        self.__answers = tuple(answers)

    @property
    def train(self) -> Sequence[SyntheticTask]:
        """Training split."""
        return self.__train

    @property
    def test(self) -> Sequence[SyntheticTask]:
        """Held-out split."""
        return self.__test

    @property
    def emb(self) -> EmbeddingTable:
        """Word vectors for the question encoder."""
        return self.__emb

    @property
    def answers(self) -> Sequence[str]:
        """Answer vocabulary, in logit order."""
        return self.__answers


def generate_dataset(config: TrainConfig) -> Dataset:
    """Sample both splits of the configured family from a seeded world."""
    world = SyntheticWorld(config.seed, config.embedding_dim)
    rng = seeded_rng(config.seed, DATA_STREAM)
    train = generate_tasks(
        rng,
        world,
        config.family,
        config.train_size,
        max_objects=config.max_objects,
        top_k=config.top_k,
        score_a=config.score_a,
        score_b=config.score_b,
    )
    test = generate_tasks(
        rng,
        world,
        config.family,
        config.test_size,
        max_objects=config.max_objects,
        top_k=config.top_k,
        score_a=config.score_a,
        score_b=config.score_b,
    )
    _LOG.info("generated %d train and %d test %s tasks", len(train), len(test), config.family)
    return Dataset(
        train=train,
        test=test,
        emb=world.emb,
        answers=world.answer_vocabulary(config.family),
    )
