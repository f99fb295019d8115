"""Annotation records consumed by the graph builders."""

from typing import Dict, Iterable, Mapping, Sequence, Tuple
import re
import numpy as np


# Knowledge relations kept at ingestion.
DEFAULT_RELATIONS: Tuple[str, ...] = (
    "UsedFor",
    "IsA",
    "AtLocation",
    "CapableOf",
    "HasProperty",
    "PartOf",
    "HasA",
    "MadeOf",
    "RelatedTo",
    "Desires",
)

_CAMEL = re.compile(r"(?<=[a-z])(?=[A-Z])")
_SPLIT = re.compile(r"[\s_]+")


def normalize_label(label: str) -> str:
    """Case-normalized form used for exact entity matching."""
    return " ".join(label.strip().lower().split())


def tokenize(phrase: str) -> Sequence[str]:
    """Lower-cased word tokens; CamelCase relation names are split ("UsedFor" -> used, for)."""
    return tuple(t for t in _SPLIT.split(_CAMEL.sub(" ", phrase).lower()) if t)


class Detection:
    """One detected object: box, label, confidence and appearance feature."""

    __slots__ = ("__bbox", "__label", "__score", "__feature", "__attributes")

    def __init__(
        self,
        *,
        bbox: Tuple[float, float, float, float],
        label: str,
        score: float,
        feature: Sequence[float],
        attributes: Sequence[str] = (),
    ) -> None:
        if bbox[2] <= 0 or bbox[3] <= 0:
            raise ValueError(f"box width and height must be positive, got {bbox[2]} x {bbox[3]}")
        if not 0.0 <= score <= 1.0:
            raise ValueError(f"detection score {score} is outside [0, 1]")
        self.__bbox = tuple(float(v) for v in bbox)
        self.__label = label
        self.__score = float(score)
        self.__feature = np.asarray(feature, dtype=np.float64)
        self.__attributes = tuple(attributes)

    @property
    def bbox(self) -> Tuple[float, ...]:
        """(x, y, w, h) in pixels."""
        return self.__bbox

    @property
    def label(self) -> str:
        """Class name."""
        return self.__label

    @property
    def score(self) -> float:
        """Detector confidence S_l in [0, 1]."""
        return self.__score

    @property
    def feature(self) -> np.ndarray:
        """Appearance feature vector."""
        return self.__feature

    @property
    def attributes(self) -> Sequence[str]:
        """Predicted attributes such as colour."""
        return self.__attributes


class CaptionTuple:
    """A (subject, relation, object) parse of one caption."""

    __slots__ = ("__subject", "__relation", "__object", "__attributes")

    def __init__(
        self,
        *,
        subject: str,
        relation: str,
        obj: str,
        attributes: Sequence[str] = (),
    ) -> None:
        self.__subject = subject
        self.__relation = relation
        self.__object = obj
        self.__attributes = tuple(attributes)

    @property
    def subject(self) -> str:
        """Subject name."""
        return self.__subject

    @property
    def relation(self) -> str:
        """Relation phrase."""
        return self.__relation

    @property
    def obj(self) -> str:
        """Object name."""
        return self.__object

    @property
    def attributes(self) -> Sequence[str]:
        """Attributes of the subject."""
        return self.__attributes

    def key(self) -> Tuple[str, str, str]:
        """Identity used to collapse duplicate tuples."""
        return (
            normalize_label(self.__subject),
            normalize_label(self.__relation),
            normalize_label(self.__object),
        )


class KnowledgeTriple:
    """A scored (head, relation, tail) knowledge-base fact."""

    __slots__ = ("__head", "__relation", "__tail", "__score")

    def __init__(self, *, head: str, relation: str, tail: str, score: float) -> None:
        if not 0.0 <= score <= 1.0:
            raise ValueError(f"triple score {score} is outside [0, 1]")
        self.__head = head
        self.__relation = relation
        self.__tail = tail
        self.__score = float(score)

    @property
    def head(self) -> str:
        """Head entity."""
        return self.__head

    @property
    def relation(self) -> str:
        """Relation name."""
        return self.__relation

    @property
    def tail(self) -> str:
        """Tail entity."""
        return self.__tail

    @property
    def score(self) -> float:
        """Triple confidence S_t in [0, 1]."""
        return self.__score

    def key(self) -> Tuple[str, str, str]:
        """Identity used for set semantics."""
        return (normalize_label(self.__head), self.__relation, normalize_label(self.__tail))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KnowledgeTriple):
            return False
        return self.key() == other.key() and self.__score == other.score

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"<{self.__head}, {self.__relation}, {self.__tail}: {self.__score:.3f}>"


class EmbeddingTable:
    """Word vectors of one fixed dimension.  Unknown words map to the zero vector."""

    __slots__ = ("__vectors", "__dim")

    def __init__(self, vectors: Mapping[str, Sequence[float]], dim: int) -> None:
        self.__dim = dim
        self.__vectors: Dict[str, np.ndarray] = {}
        for word, vec in vectors.items():
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (dim,):
                raise ValueError(f"embedding for {word!r} has shape {arr.shape}, expected ({dim},)")
            arr.flags.writeable = False
            self.__vectors[word] = arr

    @property
    def dim(self) -> int:
        """Vector dimension d_emb."""
        return self.__dim

    def words(self) -> Sequence[str]:
        """Vocabulary, in insertion order."""
        return tuple(self.__vectors.keys())

    def __contains__(self, word: object) -> bool:
        return word in self.__vectors

    def __len__(self) -> int:
        return len(self.__vectors)

    def vector(self, word: str) -> np.ndarray:
        """The vector of one word; zeros when unknown."""
        ret = self.__vectors.get(word.lower())
        if ret is None:
            return np.zeros(self.__dim)
        return ret

    def phrase_vector(self, phrase: str) -> Tuple[np.ndarray, int]:
        """Average of the token vectors of a phrase, and how many tokens were unknown."""
        tokens = tokenize(phrase)
        if not tokens:
            return np.zeros(self.__dim), 0
        oov = sum(1 for t in tokens if t not in self.__vectors)
        return np.mean([self.vector(t) for t in tokens], axis=0), oov

    def phrase_matrix(self, phrases: Iterable[str]) -> Tuple[np.ndarray, int]:
        """Stacked phrase vectors and the total unknown-token count."""
        rows = []
        oov = 0
        for phrase in phrases:
            vec, missing = self.phrase_vector(phrase)
            rows.append(vec)
            oov += missing
        if not rows:
            return np.zeros((0, self.__dim)), 0
        return np.stack(rows), oov
