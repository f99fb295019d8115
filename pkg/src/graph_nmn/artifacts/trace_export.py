"""Reasoning traces as JSON documents checked against the shipped schema."""

from typing import Any, Dict, List, Mapping, Sequence, Tuple
import importlib.resources
import json
import logging
import jsonschema
from ..controller import ReasoningTrace, StepRecord
from ..graph import MODALITIES
from ..util.message import i18n as _
from ..util.result import Problem, Result, ResultGen, SourcePath


_LOG = logging.getLogger(__name__)

SCHEMA_RESOURCE = "trace.schema.json"
NOOP_KIND = "noop"
DISTRIBUTION_TOLERANCE = 1e-6


def trace_schema() -> Mapping[str, Any]:
    """The JSON schema every exported trace satisfies."""
    resource = importlib.resources.files("graph_nmn.artifacts").joinpath(SCHEMA_RESOURCE)
    text = resource.read_text("UTF-8")
    ret: Mapping[str, Any] = json.loads(text)
    return ret


def omit_noop(steps: Sequence[StepRecord]) -> Sequence[StepRecord]:
    """Drop the trailing steps whose most weighted module is a NoOp."""
    end = len(steps)
    while end > 0 and steps[end - 1].argmax_kind == NOOP_KIND:
        end -= 1
    return tuple(steps[:end])


def step_to_json(record: StepRecord) -> Dict[str, Any]:
    """Plain-data form of one step; word attention covers the question words only."""
    count = len(record.tokens)
    return {
        "step": record.step,
        "modules": list(record.module_names),
        "module_weights": record.module_weights.tolist(),
        "argmax_module": record.argmax_module,
        "word_attention": record.word_attention[:count].tolist(),
        "argmax_token": record.argmax_token,
        "graphs": {
            m: {
                "labels": list(record.layer(m).labels),
                "weights": record.layer(m).weights.tolist(),
                "argmax_label": record.layer(m).argmax_label,
            }
            for m in MODALITIES
        },
    }


def trace_to_json(trace: ReasoningTrace, *, drop_noop: bool = False) -> Dict[str, Any]:
    """Plain-data form of a trace, optionally without its trailing NoOp steps."""
    steps = omit_noop(trace.steps) if drop_noop else trace.steps
    return {
        "question": list(trace.tokens),
        "answer": trace.answer,
        "answers": list(trace.answers),
        "logits": trace.logits.tolist(),
        "total_steps": len(trace.steps),
        "omitted_steps": len(trace.steps) - len(steps),
        "steps": [step_to_json(s) for s in steps],
    }


def validate_trace(data: Any, source: SourcePath = ()) -> Result[Any]:
    """Check a trace document against the schema, then check its distributions sum to one."""
    res = ResultGen()
    validator = jsonschema.Draft7Validator(trace_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: [str(p) for p in e.absolute_path])
    for error in errors:
        res.add(
            Problem.as_validation(
                (*source, *error.absolute_path),
                _("does not match the trace schema: {msg}"),
                msg=error.message,
            )
        )
    if res.is_not_valid():
        return res.build(data)
    for index, step in enumerate(data["steps"]):
        where: SourcePath = (*source, "steps", index)
        distributions: List[Tuple[SourcePath, Sequence[float]]] = [
            (("module_weights",), step["module_weights"]),
            (("word_attention",), step["word_attention"]),
        ]
        distributions.extend(
            (("graphs", m, "weights"), step["graphs"][m]["weights"]) for m in MODALITIES
        )
        for path, values in distributions:
            total = sum(values)
            if abs(total - 1.0) > DISTRIBUTION_TOLERANCE:
                res.add(
                    Problem.as_validation(
                        (*where, *path), _("weights sum to {total}, not 1"), total=total
                    )
                )
        if len(step["modules"]) != len(step["module_weights"]):
            res.add(
                Problem.as_validation((*where, "modules"), _("one weight per module is required"))
            )
        elif step["argmax_module"] != _argmax(step["modules"], step["module_weights"]):
            res.add(
                Problem.as_validation(
                    (*where, "argmax_module"), _("not the module with the largest weight")
                )
            )
    return res.build(data)


def _argmax(labels: Sequence[str], weights: Sequence[float]) -> str:
    return labels[max(range(len(weights)), key=lambda i: (weights[i], -i))]
