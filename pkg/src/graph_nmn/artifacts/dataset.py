"""JSON-lines task files and dataset directories.

A dataset directory holds `train.jsonl` and `test.jsonl` (one task per line),
`embeddings.txt` (the question word vectors) and `answers.txt` (the answer
vocabulary, one per line, in logit order).
"""

from typing import Any, Dict, List, Optional, Sequence, cast
import functools
import json
import logging
import os
import numpy as np
from ..builder import EmbeddingTable
from ..graph import MODALITIES, HeteroGraph, Modality, MultiLayerGraph, validate_graph
from ..training import (
    FAMILY_HOPS,
    Dataset,
    OracleError,
    ProgramStep,
    SyntheticTask,
    execute_program,
)
from ..util.message import i18n as _
from ..util.result import Problem, Result, ResultGen, SourcePath
from .annotations import format_embeddings, load_embeddings
from .files import (
    expect,
    is_number_list,
    is_string_list,
    is_text,
    parse_json,
    read_lines,
    write_lines,
)


_LOG = logging.getLogger(__name__)

TRAIN_FILE = "train.jsonl"
TEST_FILE = "test.jsonl"
EMBEDDINGS_FILE = "embeddings.txt"
ANSWERS_FILE = "answers.txt"

_PROGRAM_OPS = ("find", "relate", "cross", "query_attribute", "query_label")


def graph_to_json(graph: HeteroGraph) -> Dict[str, Any]:
    """Plain-data form of one layer."""
    return {
        "node_features": graph.node_features.tolist(),
        "node_labels": list(graph.node_labels),
        "node_attributes": [list(a) for a in graph.node_attributes],
        "edges": graph.edges.tolist(),
        "edge_features": graph.edge_features.tolist(),
        "edge_dim": graph.edge_dim,
        "edge_labels": list(graph.edge_labels),
    }


def task_to_json(task: SyntheticTask) -> Dict[str, Any]:
    """One JSON-lines record."""
    return {
        "graphs": {g.modality: graph_to_json(g) for g in task.graphs.layers()},
        "question": list(task.tokens),
        "answer": task.answer,
        "hops": task.hops,
        "family": task.family,
        "program": [list(step.as_json()) for step in task.program],
    }


def format_tasks(tasks: Sequence[SyntheticTask]) -> Sequence[str]:
    """JSON-lines text, one task per line."""
    return [json.dumps(task_to_json(t), sort_keys=True) for t in tasks]


def parse_task(data: Any, source: SourcePath) -> Result[SyntheticTask]:
    """Check and decode one record, then re-derive its answer from its program."""
    if not isinstance(data, dict):
        return Result.as_error(Problem.as_validation(source, _("task must be a JSON object")))
    res = ResultGen()
    graphs = res.include(_parse_graphs(data.get("graphs"), (*source, "graphs")), None)
    tokens = res.include(
        expect(
            data.get("question"),
            lambda v: is_string_list(v) and len(v) > 0,
            (*source, "question"),
            "a non-empty list of words",
        ),
        [],
    )
    answer = res.include(expect(data.get("answer"), is_text, (*source, "answer"), "an answer"), "")
    family = res.include(
        expect(
            data.get("family"),
            lambda v: isinstance(v, str) and v in FAMILY_HOPS,
            (*source, "family"),
            "one of " + ", ".join(FAMILY_HOPS),
        ),
        "",
    )
    hops = res.include(
        expect(
            data.get("hops"),
            lambda v: isinstance(v, int) and not isinstance(v, bool) and v > 0,
            (*source, "hops"),
            "a positive hop count",
        ),
        0,
    )
    program = res.include(_parse_program(data.get("program"), (*source, "program")), [])
    if res.is_not_valid() or graphs is None:
        return Result.as_error(res.problems)
    try:
        derived: Optional[str] = execute_program(graphs, program)
    except OracleError as err:
        res.add(
            Problem.as_validation(
                (*source, "program"), _("program does not run on the graphs: {err}"), err=err
            )
        )
        derived = None
    if derived is not None and derived != answer:
        res.add(
            Problem.as_validation(
                (*source, "answer"),
                _("answer {answer} differs from the program's answer {derived}"),
                answer=answer,
                derived=derived,
            )
        )
    return res.build_with(
        lambda: SyntheticTask(
            graphs=cast(MultiLayerGraph, graphs),
            tokens=tokens,
            answer=answer,
            hops=hops,
            family=family,
            program=program,
        )
    )


def _parse_graphs(data: Any, source: SourcePath) -> Result[MultiLayerGraph]:
    if not isinstance(data, dict):
        return Result.as_error(
            Problem.as_validation(source, _("graphs must map each layer to a graph"))
        )
    res = ResultGen()
    layers: Dict[Modality, HeteroGraph] = {}
    for modality in MODALITIES:
        graph = res.include(_parse_graph(modality, data.get(modality), (*source, modality)), None)
        if graph is not None:
            layers[modality] = graph
    return res.build_with(
        lambda: MultiLayerGraph(
            visual=layers["visual"],
            semantic=layers["semantic"],
            commonsense=layers["commonsense"],
        )
    )


def _parse_graph(modality: Modality, data: Any, source: SourcePath) -> Result[HeteroGraph]:
    if not isinstance(data, dict):
        return Result.as_error(Problem.as_validation(source, _("missing graph layer")))
    res = ResultGen()
    features = res.include(
        expect(
            data.get("node_features"),
            lambda v: isinstance(v, list) and len(v) > 0 and all(is_number_list(r) for r in v),
            (*source, "node_features"),
            "a non-empty matrix",
        ),
        None,
    )
    labels = res.include(
        expect(data.get("node_labels"), is_string_list, (*source, "node_labels"), "labels"), []
    )
    attributes = res.include(
        expect(
            data.get("node_attributes", [[] for _label in labels]),
            lambda v: isinstance(v, list) and all(is_string_list(a) for a in v),
            (*source, "node_attributes"),
            "a list of attribute lists",
        ),
        [],
    )
    edges = res.include(
        expect(
            data.get("edges"),
            lambda v: isinstance(v, list)
            and all(
                isinstance(e, list) and len(e) == 2 and all(isinstance(i, int) for i in e)
                for e in v
            ),
            (*source, "edges"),
            "a list of [source, target] pairs",
        ),
        None,
    )
    edge_dim = res.include(
        expect(
            data.get("edge_dim"),
            lambda v: isinstance(v, int) and not isinstance(v, bool) and v > 0,
            (*source, "edge_dim"),
            "a positive edge feature width",
        ),
        0,
    )
    edge_features = res.include(
        expect(
            data.get("edge_features"),
            lambda v: isinstance(v, list) and all(is_number_list(r) for r in v),
            (*source, "edge_features"),
            "a matrix",
        ),
        None,
    )
    edge_labels = res.include(
        expect(
            data.get("edge_labels", [""] * len(edges or [])),
            is_string_list,
            (*source, "edge_labels"),
            "edge labels",
        ),
        [],
    )
    if res.is_not_valid() or features is None or edges is None or edge_features is None:
        return Result.as_error(res.problems)
    try:
        node_matrix = np.asarray(features, dtype=np.float64)
        edge_matrix = np.asarray(edge_features, dtype=np.float64).reshape(-1, edge_dim)
    except ValueError as err:
        return Result.as_error(
            Problem.as_validation(source, _("ragged feature matrix: {err}"), err=err)
        )
    graph = HeteroGraph(
        modality=modality,
        node_features=node_matrix,
        node_labels=labels,
        node_attributes=attributes,
        edges=[(int(s), int(t)) for s, t in edges],
        edge_features=edge_matrix,
        edge_labels=edge_labels,
    )
    return validate_graph(graph, source[:-1])


def _parse_program(data: Any, source: SourcePath) -> Result[Sequence[ProgramStep]]:
    if not isinstance(data, list) or not data:
        return Result.as_error(
            Problem.as_validation(source, _("program must be a non-empty list of steps"))
        )
    res = ResultGen()
    ret: List[ProgramStep] = []
    for index, step in enumerate(data):
        if (
            not isinstance(step, list)
            or len(step) != 3
            or step[0] not in _PROGRAM_OPS
            or step[1] not in MODALITIES
            or not isinstance(step[2], str)
        ):
            res.add(
                Problem.as_validation(
                    (*source, index), _("program step must be [op, layer, argument]")
                )
            )
            continue
        ret.append(ProgramStep(step[0], step[1], step[2]))
    return res.build(ret)


def load_tasks(path: str) -> Result[Sequence[SyntheticTask]]:
    """Every task of a JSON-lines file; problems name the line."""
    return read_lines(path).map_result(lambda lines: _parse_tasks(lines, path))


def _parse_tasks(lines: Sequence[str], path: str) -> Result[Sequence[SyntheticTask]]:
    res = ResultGen()
    ret: List[SyntheticTask] = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        where: SourcePath = (path, number)
        parsed = parse_json(line, where)
        task = res.include(parsed.map_result(functools.partial(parse_task, source=where)), None)
        if task is not None:
            ret.append(task)
    if res.is_valid() and not ret:
        res.add(Problem.as_validation((path,), _("no tasks")))
    return res.build(ret)


def load_dataset(directory: str) -> Result[Dataset]:
    """Read a dataset directory written by `save_dataset`."""
    res = ResultGen()
    train = res.include(load_tasks(os.path.join(directory, TRAIN_FILE)), ())
    test = res.include(load_tasks(os.path.join(directory, TEST_FILE)), ())
    emb = res.include(load_embeddings(os.path.join(directory, EMBEDDINGS_FILE)), None)
    answers_path = os.path.join(directory, ANSWERS_FILE)
    answers = res.include(
        read_lines(answers_path).map_to(lambda lines: [a.strip() for a in lines if a.strip()]),
        [],
    )
    known = set(answers)
    for split, tasks in (("train", train), ("test", test)):
        for index, task in enumerate(tasks):
            if task.answer not in known:
                res.add(
                    Problem.as_validation(
                        (answers_path,),
                        _("{split} task {index} has answer {answer}, missing from the vocabulary"),
                        split=split,
                        index=index,
                        answer=task.answer,
                    )
                )
    return res.build_with(
        lambda: Dataset(
            train=train,
            test=test,
            emb=cast(EmbeddingTable, emb),
            answers=answers,
        )
    )


def save_dataset(dataset: Dataset, directory: str) -> None:
    """Write the four files of a dataset directory."""
    write_lines(os.path.join(directory, TRAIN_FILE), format_tasks(dataset.train))
    write_lines(os.path.join(directory, TEST_FILE), format_tasks(dataset.test))
    write_lines(os.path.join(directory, EMBEDDINGS_FILE), format_embeddings(dataset.emb))
    write_lines(os.path.join(directory, ANSWERS_FILE), list(dataset.answers))
    _LOG.info(
        "saved %d train and %d test tasks to %s", len(dataset.train), len(dataset.test), directory
    )

