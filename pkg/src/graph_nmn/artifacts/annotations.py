"""Loading detector, caption-parse, knowledge-base and word-vector files.

Each loader checks every record and reports every broken one, naming the
file and the record index (JSON arrays) or line number (text files).
"""

from typing import Any, Dict, List, Optional, Sequence, cast
import logging
from ..builder import (
    DEFAULT_RELATIONS,
    CaptionTuple,
    Detection,
    EmbeddingTable,
    KnowledgeTriple,
)
from ..util.message import i18n as _
from ..util.result import Problem, Result, ResultGen, SourcePath
from .files import (
    expect,
    is_number,
    is_number_list,
    is_string_list,
    is_text,
    read_json,
    read_lines,
)


_LOG = logging.getLogger(__name__)

DEFAULT_MAX_CAPTIONS = 10


class Annotations:
    """Everything the graph builder needs for one image."""

    __slots__ = ("__detections", "__captions", "__triples", "__emb")

    def __init__(
        self,
        *,
        detections: Sequence[Detection],
        captions: Sequence[CaptionTuple],
        triples: Sequence[KnowledgeTriple],
        emb: EmbeddingTable,
    ) -> None:
        self.__detections = tuple(detections)
        self.__captions = tuple(captions)
        self.__triples = tuple(triples)
        self.__emb = emb

    @property
    def detections(self) -> Sequence[Detection]:
        """Detector output, in file order."""
        return self.__detections

    @property
    def captions(self) -> Sequence[CaptionTuple]:
        """Caption tuples, already limited to the configured count."""
        return self.__captions

    @property
    def triples(self) -> Sequence[KnowledgeTriple]:
        """Whitelisted knowledge triples."""
        return self.__triples

    @property
    def emb(self) -> EmbeddingTable:
        """Word vectors."""
        return self.__emb


def load_annotations(
    *,
    detections: str,
    captions: str,
    triples: str,
    embeddings: str,
    max_captions: int = DEFAULT_MAX_CAPTIONS,
    relations: Sequence[str] = DEFAULT_RELATIONS,
) -> Result[Annotations]:
    """Load all four files, collecting the problems of every one of them."""
    res = ResultGen()
    found_detections = res.include(load_detections(detections), ())
    found_captions = res.include(load_captions(captions, max_captions), ())
    found_triples = res.include(load_triples(triples, relations), ())
    found_emb = res.include(load_embeddings(embeddings), None)
    return res.build_with(
        lambda: Annotations(
            detections=found_detections,
            captions=found_captions,
            triples=found_triples,
            emb=cast(EmbeddingTable, found_emb),
        )
    )


def load_detections(path: str) -> Result[Sequence[Detection]]:
    """A JSON array of {bbox, label, score, feature, attributes?} records."""
    return read_json(path).map_result(lambda data: _parse_detections(data, path))


def _parse_detections(data: Any, path: str) -> Result[Sequence[Detection]]:
    if not isinstance(data, list):
        return Result.as_error(
            Problem.as_validation((path,), _("detections must be a JSON array"))
        )
    res = ResultGen()
    ret: List[Detection] = []
    feature_dim: Optional[int] = None
    for index, record in enumerate(data):
        where: SourcePath = (path, index)
        if not isinstance(record, dict):
            res.add(Problem.as_validation(where, _("detection must be a JSON object")))
            continue
        item = ResultGen()
        bbox = item.include(
            expect(
                record.get("bbox"),
                lambda v: is_number_list(v) and len(v) == 4,
                (*where, "bbox"),
                "[x, y, w, h]",
            ),
            None,
        )
        if bbox is not None and (bbox[2] <= 0 or bbox[3] <= 0):
            item.add(
                Problem.as_validation(
                    (*where, "bbox"),
                    _("box width and height must be positive, found {w} x {h}"),
                    w=bbox[2],
                    h=bbox[3],
                )
            )
        label = item.include(expect(record.get("label"), is_text, (*where, "label"), "a label"), "")
        score = item.include(
            expect(
                record.get("score"),
                lambda v: is_number(v) and 0 <= v <= 1,
                (*where, "score"),
                "a score in [0, 1]",
            ),
            0.0,
        )
        feature = item.include(
            expect(
                record.get("feature"),
                lambda v: is_number_list(v) and len(v) > 0,
                (*where, "feature"),
                "a non-empty feature vector",
            ),
            None,
        )
        attributes = item.include(
            expect(
                record.get("attributes", []),
                is_string_list,
                (*where, "attributes"),
                "a list of attribute names",
            ),
            [],
        )
        if feature is not None:
            if feature_dim is None:
                feature_dim = len(feature)
            elif len(feature) != feature_dim:
                item.add(
                    Problem.as_validation(
                        (*where, "feature"),
                        _("feature has {found} dimensions, earlier records have {dim}"),
                        found=len(feature),
                        dim=feature_dim,
                    )
                )
        res.add(item.problems)
        if item.is_valid() and bbox is not None and feature is not None:
            ret.append(
                Detection(
                    bbox=(bbox[0], bbox[1], bbox[2], bbox[3]),
                    label=label,
                    score=score,
                    feature=feature,
                    attributes=attributes,
                )
            )
    if res.is_valid() and not ret:
        res.add(Problem.as_validation((path,), _("no detections")))
    _LOG.debug("%s: %d detections", path, len(ret))
    return res.build(ret)


def load_captions(
    path: str, max_captions: int = DEFAULT_MAX_CAPTIONS
) -> Result[Sequence[CaptionTuple]]:
    """A JSON array of {subject, relation, object, attributes?} records.

    Only the first `max_captions` tuples are kept.
    """
    return read_json(path).map_result(lambda data: _parse_captions(data, path, max_captions))


def _parse_captions(data: Any, path: str, max_captions: int) -> Result[Sequence[CaptionTuple]]:
    if not isinstance(data, list):
        return Result.as_error(Problem.as_validation((path,), _("captions must be a JSON array")))
    res = ResultGen()
    ret: List[CaptionTuple] = []
    for index, record in enumerate(data):
        where: SourcePath = (path, index)
        if not isinstance(record, dict):
            res.add(Problem.as_validation(where, _("caption tuple must be a JSON object")))
            continue
        item = ResultGen()
        parts = [
            item.include(expect(record.get(key), is_text, (*where, key), "a phrase"), "")
            for key in ("subject", "relation", "object")
        ]
        attributes = item.include(
            expect(
                record.get("attributes", []),
                is_string_list,
                (*where, "attributes"),
                "a list of attribute names",
            ),
            [],
        )
        res.add(item.problems)
        if item.is_valid():
            ret.append(
                CaptionTuple(
                    subject=parts[0], relation=parts[1], obj=parts[2], attributes=attributes
                )
            )
    if len(ret) > max_captions:
        res.add(
            Problem.as_warning(
                (path,),
                _("kept the first {kept} of {count} caption tuples"),
                kept=max_captions,
                count=len(ret),
            )
        )
        ret = ret[:max_captions]
    if res.is_valid() and not ret:
        res.add(Problem.as_validation((path,), _("no caption tuples")))
    return res.build(ret)


def load_triples(
    path: str, relations: Sequence[str] = DEFAULT_RELATIONS
) -> Result[Sequence[KnowledgeTriple]]:
    """Tab-separated head, relation, tail, score lines.

    Blank lines and lines starting with `#` are skipped.  Triples whose
    relation is not in `relations` are dropped with a warning.
    """
    return read_lines(path).map_result(lambda lines: _parse_triples(lines, path, relations))


def _parse_triples(
    lines: Sequence[str], path: str, relations: Sequence[str]
) -> Result[Sequence[KnowledgeTriple]]:
    allowed = set(relations)
    res = ResultGen()
    ret: List[KnowledgeTriple] = []
    dropped: Dict[str, int] = {}
    for number, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        where: SourcePath = (path, number)
        fields = line.split("\t")
        if len(fields) != 4:
            res.add(
                Problem.as_validation(
                    where,
                    _("expected head, relation, tail and score separated by tabs, got {n} fields"),
                    n=len(fields),
                )
            )
            continue
        head, relation, tail, raw_score = (f.strip() for f in fields)
        try:
            score = float(raw_score)
        except ValueError:
            res.add(Problem.as_validation(where, _("score {raw} is not a number"), raw=raw_score))
            continue
        if not 0.0 <= score <= 1.0:
            res.add(
                Problem.as_validation(
                    where, _("score {raw} is not a probability in [0, 1]"), raw=raw_score
                )
            )
            continue
        if not head or not tail:
            res.add(Problem.as_validation(where, _("head and tail must not be empty")))
            continue
        if relation not in allowed:
            if relation not in dropped:
                res.add(
                    Problem.as_warning(
                        where,
                        _("relation {relation} is not in the whitelist; its triples are dropped"),
                        relation=relation,
                    )
                )
            dropped[relation] = dropped.get(relation, 0) + 1
            continue
        ret.append(KnowledgeTriple(head=head, relation=relation, tail=tail, score=score))
    if dropped:
        _LOG.info(
            "%s: dropped %d triples with relations %s",
            path,
            sum(dropped.values()),
            sorted(dropped),
        )
    return res.build(ret)


def load_embeddings(path: str) -> Result[EmbeddingTable]:
    """Text lines "word v1 v2 ... vd"; every row must have the same d."""
    return read_lines(path).map_result(lambda lines: _parse_embeddings(lines, path))


def _parse_embeddings(lines: Sequence[str], path: str) -> Result[EmbeddingTable]:
    res = ResultGen()
    vectors: Dict[str, List[float]] = {}
    dim: Optional[int] = None
    for number, line in enumerate(lines, start=1):
        fields = line.split()
        if not fields:
            continue
        where: SourcePath = (path, number)
        word, raw = fields[0].lower(), fields[1:]
        try:
            values = [float(v) for v in raw]
        except ValueError:
            res.add(Problem.as_validation(where, _("vector for {word} is not numeric"), word=word))
            continue
        if not values:
            res.add(Problem.as_validation(where, _("no vector for {word}"), word=word))
            continue
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            res.add(
                Problem.as_validation(
                    where,
                    _("vector for {word} has {found} dimensions, earlier rows have {dim}"),
                    word=word,
                    found=len(values),
                    dim=dim,
                )
            )
            continue
        if word in vectors:
            res.add(Problem.as_warning(where, _("{word} repeated; the last row wins"), word=word))
        vectors[word] = values
    if dim is None:
        res.add(Problem.as_validation((path,), _("no word vectors")))
        return Result.as_error(res.problems)
    found_dim = dim
    return res.build_with(lambda: EmbeddingTable(vectors, found_dim))


def format_embeddings(emb: EmbeddingTable) -> Sequence[str]:
    """Lines in the format `load_embeddings` reads, words in table order."""
    return [" ".join([word, *(repr(float(v)) for v in emb.vector(word))]) for word in emb.words()]
