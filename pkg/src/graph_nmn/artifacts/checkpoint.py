"""Saving a trained network and restoring it bit for bit.

A checkpoint is one JSON document: every parameter under its stable name,
the configuration it was trained with, the shuffling generator's state, and
what is needed to rebuild the network around the parameters (layer widths,
word vectors, answer vocabulary).  Floats are written with `repr`, so a
restored network computes exactly the same logits.
"""

from typing import Any, Dict, Mapping, Sequence, Tuple
import logging
import numpy as np
from ..builder import EmbeddingTable
from ..controller import GraphModuleNetwork, LayerDims, create_network
from ..graph import MODALITIES, Modality
from ..training import INIT_STREAM, TrainConfig, parse_config, seeded_rng
from ..util.message import UserMessage
from ..util.message import i18n as _
from ..util.result import Problem, Result, ResultGen, SourcePath
from .files import expect, is_number_list, is_string_list, read_json, write_json


_LOG = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "graph-nmn-checkpoint"
CHECKPOINT_VERSION = 1


class CheckpointVersionError(Problem):
    """A checkpoint written by an incompatible format version."""

    __slots__ = ()

    def __init__(self, source: SourcePath, found: Any, expected: int) -> None:
        super().__init__(
            source=source,
            level="error",
            message=UserMessage(
                _("checkpoint format version {found} is not supported; expected {expected}"),
                found=repr(found),
                expected=expected,
            ),
        )


class Checkpoint:
    """A restored network with the configuration and generator state saved alongside it."""

    __slots__ = ("__network", "__config", "__rng_state")

    def __init__(
        self,
        *,
        network: GraphModuleNetwork,
        config: TrainConfig,
        rng_state: Mapping[str, Any],
    ) -> None:
        self.__network = network
        self.__config = config
        self.__rng_state = dict(rng_state)

    @property
    def network(self) -> GraphModuleNetwork:
        """The trained network."""
        return self.__network

    @property
    def config(self) -> TrainConfig:
        """Settings it was trained with."""
        return self.__config

    @property
    def rng_state(self) -> Mapping[str, Any]:
        """State of the shuffling generator when training finished."""
        return self.__rng_state

    def restore_rng(self) -> np.random.Generator:
        """A generator continuing from the saved state."""
        ret = np.random.default_rng()
        ret.bit_generator.state = dict(self.__rng_state)
        return ret


def checkpoint_to_json(
    network: GraphModuleNetwork,
    config: TrainConfig,
    rng_state: Mapping[str, Any],
) -> Dict[str, Any]:
    """Plain-data form of a checkpoint."""
    return {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "config": config.as_dict(),
        "rng_state": dict(rng_state),
        "dims": {m: list(network.dims[m]) for m in MODALITIES},
        "answers": list(network.answers),
        "embedding_dim": network.emb.dim,
        "embeddings": {w: network.emb.vector(w).tolist() for w in network.emb.words()},
        "params": {
            name: {"shape": list(value.shape), "values": value.ravel().tolist()}
            for name, value in network.store.state().items()
        },
    }


def save_checkpoint(
    path: str,
    network: GraphModuleNetwork,
    config: TrainConfig,
    rng_state: Mapping[str, Any],
) -> None:
    """Write a checkpoint file."""
    write_json(path, checkpoint_to_json(network, config, rng_state))
    _LOG.info("saved %d parameter tensors to %s", len(network.store), path)


def load_checkpoint(path: str) -> Result[Checkpoint]:
    """Read a checkpoint and rebuild its network."""
    return read_json(path).map_result(lambda data: parse_checkpoint(data, (path,)))


def parse_checkpoint(data: Any, source: SourcePath) -> Result[Checkpoint]:
    """Check a decoded checkpoint document and rebuild its network."""
    if not isinstance(data, dict) or data.get("format") != CHECKPOINT_FORMAT:
        return Result.as_error(Problem.as_validation(source, _("not a graph-nmn checkpoint")))
    if data.get("version") != CHECKPOINT_VERSION:
        return Result.as_error(
            CheckpointVersionError((*source, "version"), data.get("version"), CHECKPOINT_VERSION)
        )
    res = ResultGen()
    config = res.include(parse_config(data.get("config"), (*source, "config")), None)
    rng_state = res.include(
        expect(
            data.get("rng_state"),
            lambda v: isinstance(v, dict),
            (*source, "rng_state"),
            "a generator state",
        ),
        {},
    )
    dims = res.include(_parse_dims(data.get("dims"), (*source, "dims")), None)
    answers = res.include(
        expect(
            data.get("answers"),
            lambda v: is_string_list(v) and len(v) > 0,
            (*source, "answers"),
            "a non-empty answer vocabulary",
        ),
        [],
    )
    emb = res.include(
        _parse_embeddings(
            data.get("embeddings"), data.get("embedding_dim"), (*source, "embeddings")
        ),
        None,
    )
    state = res.include(_parse_params(data.get("params"), (*source, "params")), {})
    if res.is_not_valid() or config is None or dims is None or emb is None:
        return Result.as_error(res.problems)
    network = create_network(
        seeded_rng(config.seed, INIT_STREAM),
        dims=dims,
        emb=emb,
        answers=answers,
        model_dim=config.model_dim,
        steps=config.steps,
        mlp_layers=config.mlp_layers,
        max_question_length=config.max_question_length,
        and_lags=config.and_inputs,
        ablate=config.ablate,
    )
    try:
        network.store.load_state(state)
    except ValueError as err:
        res.add(
            Problem.as_validation(
                (*source, "params"), _("parameters do not fit the network: {err}"), err=err
            )
        )
    _LOG.debug("restored %d parameter tensors", len(state))
    found_config: TrainConfig = config
    return res.build_with(
        lambda: Checkpoint(network=network, config=found_config, rng_state=rng_state)
    )


def _parse_dims(data: Any, source: SourcePath) -> Result[LayerDims]:
    if not isinstance(data, dict):
        return Result.as_error(Problem.as_validation(source, _("expected widths per layer")))
    res = ResultGen()
    ret: Dict[Modality, Tuple[int, int]] = {}
    for modality in MODALITIES:
        pair = res.include(
            expect(
                data.get(modality),
                lambda v: isinstance(v, list)
                and len(v) == 2
                and all(isinstance(i, int) and not isinstance(i, bool) and i > 0 for i in v),
                (*source, modality),
                "[node width, edge width]",
            ),
            None,
        )
        if pair is not None:
            ret[modality] = (pair[0], pair[1])
    return res.build(ret)


def _parse_embeddings(data: Any, dim: Any, source: SourcePath) -> Result[EmbeddingTable]:
    if isinstance(dim, bool) or not isinstance(dim, int) or dim <= 0:
        return Result.as_error(
            Problem.as_validation(source, _("missing or invalid embedding width"))
        )
    if not isinstance(data, dict):
        return Result.as_error(Problem.as_validation(source, _("expected word vectors")))
    res = ResultGen()
    for word, vector in data.items():
        res.add(
            expect(
                vector,
                lambda v: is_number_list(v) and len(v) == dim,
                (*source, word),
                f"{dim} numbers",
            )
        )
    return res.build_with(lambda: EmbeddingTable(data, dim))


def _parse_params(data: Any, source: SourcePath) -> Result[Mapping[str, np.ndarray]]:
    if not isinstance(data, dict) or not data:
        return Result.as_error(Problem.as_validation(source, _("expected parameter tensors")))
    res = ResultGen()
    ret: Dict[str, np.ndarray] = {}
    for name, record in data.items():
        where: SourcePath = (*source, name)
        if (
            not isinstance(record, dict)
            or not isinstance(record.get("shape"), list)
            or not all(isinstance(i, int) and i > 0 for i in record["shape"])
            or not is_number_list(record.get("values"))
        ):
            res.add(Problem.as_validation(where, _("expected a shape and flat values")))
            continue
        shape: Sequence[int] = record["shape"]
        values = np.asarray(record["values"], dtype=np.float64)
        if values.size != int(np.prod(shape)):
            res.add(
                Problem.as_validation(
                    where,
                    _("{count} values do not fill shape {shape}"),
                    count=values.size,
                    shape=list(shape),
                )
            )
            continue
        if not np.all(np.isfinite(values)):
            res.add(Problem.as_validation(where, _("parameter values must be finite")))
            continue
        ret[name] = values.reshape(tuple(shape))
    return res.build(ret)
