"""Training configuration: a flat YAML mapping validated field by field."""

from typing import Any, Callable, Dict, Mapping, Optional, Sequence, Tuple
import yaml
from ..controller import ABLATIONS, DEFAULT_MAX_QUESTION_LENGTH, DEFAULT_STEPS
from ..util.message import UserMessage
from ..util.message import i18n as _
from ..util.result import Problem, Result, ResultGen, SourcePath


FAMILIES: Tuple[str, ...] = ("attribute", "relational", "cross_graph", "mixed")


class _Field:
    __slots__ = ("name", "default", "check")

    def __init__(self, name: str, default: Any, check: Callable[[Any], Optional[str]]) -> None:
        self.name = name
        self.default = default
        self.check = check


def _positive_float(value: Any) -> Optional[str]:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
        return "a positive number"
    return None


def _non_negative_float(value: Any) -> Optional[str]:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value < 0:
        return "a non-negative number"
    return None


def _unit_interval(value: Any) -> Optional[str]:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not 0 <= value < 1:
        return "a number in [0, 1)"
    return None


def _positive_int(value: Any) -> Optional[str]:
    if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
        return "a positive integer"
    return None


def _non_negative_int(value: Any) -> Optional[str]:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        return "a non-negative integer"
    return None


def _family(value: Any) -> Optional[str]:
    if value not in FAMILIES:
        return "one of " + ", ".join(FAMILIES)
    return None


def _ablations(value: Any) -> Optional[str]:
    if not isinstance(value, (list, tuple)) or any(v not in ABLATIONS for v in value):
        return "a list drawn from " + ", ".join(ABLATIONS)
    return None


def _lags(value: Any) -> Optional[str]:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or any(_positive_int(v) is not None for v in value)
    ):
        return "a pair of positive integers"
    return None


def _optional_path(value: Any) -> Optional[str]:
    if value is not None and (not isinstance(value, str) or not value):
        return "a file path"
    return None


_FIELDS: Sequence[_Field] = (
    _Field("learning_rate", 0.001, _non_negative_float),
    _Field("beta1", 0.9, _unit_interval),
    _Field("beta2", 0.999, _unit_interval),
    _Field("adam_eps", 1e-8, _positive_float),
    _Field("steps", DEFAULT_STEPS, _positive_int),
    _Field("model_dim", 16, _positive_int),
    _Field("embedding_dim", 16, _positive_int),
    _Field("mlp_layers", 2, _positive_int),
    _Field("max_question_length", DEFAULT_MAX_QUESTION_LENGTH, _positive_int),
    _Field("max_objects", 36, _positive_int),
    _Field("max_captions", 10, _positive_int),
    _Field("top_k", 50, _positive_int),
    _Field("score_a", 0.7, _non_negative_float),
    _Field("score_b", 0.3, _non_negative_float),
    _Field("epochs", 50, _non_negative_int),
    _Field("batch_size", 16, _positive_int),
    _Field("seed", 0, _non_negative_int),
    _Field("family", "cross_graph", _family),
    _Field("train_size", 2000, _positive_int),
    _Field("test_size", 500, _positive_int),
    _Field("and_inputs", (1, 2), _lags),
    _Field("ablate", (), _ablations),
    _Field("dataset", None, _optional_path),
)

FIELD_NAMES: Tuple[str, ...] = tuple(f.name for f in _FIELDS)


class TrainConfig:
    """Validated training settings.  Read values as attributes; `replace` makes a copy."""

    __slots__ = ("__values",)

    def __init__(self, **values: Any) -> None:
        unknown = set(values) - set(FIELD_NAMES)
        if unknown:
            raise ValueError(f"unknown configuration keys {sorted(unknown)}")
        merged: Dict[str, Any] = {f.name: f.default for f in _FIELDS}
        merged.update(values)
        for field in _FIELDS:
            expected = field.check(merged[field.name])
            if expected is not None:
                raise ValueError(f"{field.name} must be {expected}, got {merged[field.name]!r}")
        merged["and_inputs"] = tuple(int(v) for v in merged["and_inputs"])
        merged["ablate"] = tuple(a for a in ABLATIONS if a in merged["ablate"])
        self.__values = merged

    def replace(self, **changes: Any) -> "TrainConfig":
        """A copy with some fields changed."""
        values = dict(self.__values)
        values.update(changes)
        return TrainConfig(**values)

    def as_dict(self) -> Dict[str, Any]:
        """Plain-data form, for checkpoints and reports."""
        ret = dict(self.__values)
        ret["and_inputs"] = list(ret["and_inputs"])
        ret["ablate"] = list(ret["ablate"])
        return ret

    @property
    def learning_rate(self) -> float:
        """Adam step size."""
        return self.__values["learning_rate"]

    @property
    def beta1(self) -> float:
        """First-moment decay."""
        return self.__values["beta1"]

    @property
    def beta2(self) -> float:
        """Second-moment decay."""
        return self.__values["beta2"]

    @property
    def adam_eps(self) -> float:
        """Adam denominator guard."""
        return self.__values["adam_eps"]

    @property
    def steps(self) -> int:
        """Reasoning steps T."""
        return self.__values["steps"]

    @property
    def model_dim(self) -> int:
        """Hidden width d of every projection and MLP."""
        return self.__values["model_dim"]

    @property
    def embedding_dim(self) -> int:
        """Width of the synthetic word vectors."""
        return self.__values["embedding_dim"]

    @property
    def mlp_layers(self) -> int:
        """Affine layers per f_mlp."""
        return self.__values["mlp_layers"]

    @property
    def max_question_length(self) -> int:
        """Questions are truncated or padded to this many words."""
        return self.__values["max_question_length"]

    @property
    def max_objects(self) -> int:
        """Detections kept per image."""
        return self.__values["max_objects"]

    @property
    def max_captions(self) -> int:
        """Caption tuples kept per image."""
        return self.__values["max_captions"]

    @property
    def top_k(self) -> int:
        """Knowledge triples kept per image."""
        return self.__values["top_k"]

    @property
    def score_a(self) -> float:
        """Weight of the object score in a triple's score."""
        return self.__values["score_a"]

    @property
    def score_b(self) -> float:
        """Weight of the triple's own score."""
        return self.__values["score_b"]

    @property
    def epochs(self) -> int:
        """Passes over the training split."""
        return self.__values["epochs"]

    @property
    def batch_size(self) -> int:
        """Examples per optimizer step."""
        return self.__values["batch_size"]

    @property
    def seed(self) -> int:
        """Seeds data generation, initialization and shuffling."""
        return self.__values["seed"]

    @property
    def family(self) -> str:
        """Synthetic question family."""
        return self.__values["family"]

    @property
    def train_size(self) -> int:
        """Generated training examples."""
        return self.__values["train_size"]

    @property
    def test_size(self) -> int:
        """Generated held-out examples."""
        return self.__values["test_size"]

    @property
    def and_inputs(self) -> Tuple[int, int]:
        """How many steps back the two And inputs are taken from."""
        return self.__values["and_inputs"]

    @property
    def ablate(self) -> Tuple[str, ...]:
        """Disabled layers and module kinds."""
        return self.__values["ablate"]

    @property
    def dataset(self) -> Optional[str]:
        """JSON-lines dataset to load instead of generating one."""
        return self.__values["dataset"]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TrainConfig) and other.as_dict() == self.as_dict()

    def __hash__(self) -> int:
        return hash(tuple(sorted((k, repr(v)) for k, v in self.__values.items())))

    def __repr__(self) -> str:
        return f"TrainConfig({self.__values!r})"


def parse_config(data: Any, source: SourcePath) -> Result[TrainConfig]:
    """Validate an already-parsed mapping, reporting every bad key."""
    if data is None:
        data = {}
    if not isinstance(data, Mapping):
        return Result.as_error(
            Problem.as_validation(source, _("configuration must be a mapping of key to value"))
        )
    res = ResultGen()
    values: Dict[str, Any] = {}
    for key in sorted(data, key=str):
        if key not in FIELD_NAMES:
            res.add(
                Problem.as_validation(
                    (*source, str(key)),
                    _("unknown configuration key; expected one of {names}"),
                    names=", ".join(FIELD_NAMES),
                )
            )
    for field in _FIELDS:
        if field.name not in data:
            continue
        value = data[field.name]
        expected = field.check(value)
        if expected is not None:
            res.add(
                Problem.as_validation(
                    (*source, field.name),
                    _("must be {expected}, found {value}"),
                    expected=expected,
                    value=repr(value),
                )
            )
        else:
            values[field.name] = value
    return res.build_with(lambda: TrainConfig(**values))


def load_config(path: str) -> Result[TrainConfig]:
    """Read and validate a YAML configuration file."""
    try:
        with open(path, "rb") as inp:
            raw = yaml.safe_load(inp)
    except OSError as err:
        return Result.as_error(
            Problem(
                source=(path,),
                level="error",
                message=UserMessage(_("could not read configuration file: {err}"), err=err),
            )
        )
    except yaml.YAMLError as err:
        return Result.as_error(
            Problem(
                source=(path,),
                level="error",
                message=UserMessage(_("configuration is not valid YAML: {err}"), err=err),
            )
        )
    return parse_config(raw, (path,))
