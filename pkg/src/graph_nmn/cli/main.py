"""CLI entrypoint."""

from typing import Any, Optional, Sequence, Tuple
import argparse
import json
import logging
import os
import sys
from ..artifacts import (
    load_annotations,
    load_checkpoint,
    load_dataset,
    load_tasks,
    save_checkpoint,
    save_dataset,
    trace_to_json,
    validate_trace,
    write_json,
)
from ..builder import build_multilayer_graph, tokenize
from ..controller import ABLATIONS, layer_dims
from ..graph import MultiLayerGraph
from ..tensor import DimensionError, no_recording
from ..training import (
    SHUFFLE_STREAM,
    Dataset,
    DivergenceError,
    TrainConfig,
    answer_counts,
    evaluate,
    generate_dataset,
    load_config,
    run_gradient_suite,
    seeded_rng,
    train,
)
from ..util.result import Result


_LOG = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

CHECKPOINT_FILE = "checkpoint.json"
METRICS_FILE = "metrics.json"
DATASET_DIR = "dataset"


def cli_main(args: Sequence[str]) -> int:
    """Called from the __main__."""
    parser = _create_parser()
    parsed = parser.parse_args(args[1:])
    logging.basicConfig(
        level=logging.DEBUG if parsed.verbose else logging.INFO,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        ret: int = parsed.command(parsed)
        return ret
    except (DivergenceError, DimensionError, ValueError, OSError) as err:
        print(f"ERROR: {err}", file=sys.stderr)
        return EXIT_FAILURE


def _create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graph_nmn",
        description="Trains and inspects a module network reasoning over three-layer graphs.",
    )
    parser.add_argument(
        "--verbose", action="store_true", help="Log debug messages as well as progress."
    )
    commands = parser.add_subparsers(dest="command_name", required=True)

    train_cmd = commands.add_parser("train", help="Train a network and write its checkpoint.")
    _add_config(train_cmd, required=True)
    _add_out(train_cmd, "Directory for the checkpoint, metrics and generated dataset.")
    _add_seed(train_cmd)
    _add_ablate(train_cmd)
    train_cmd.set_defaults(command=_cmd_train)

    eval_cmd = commands.add_parser("eval", help="Print the accuracy of a checkpoint as JSON.")
    _add_checkpoint(eval_cmd)
    eval_cmd.add_argument(
        "--dataset",
        help="Dataset directory; defaults to regenerating the checkpoint's own dataset.",
    )
    eval_cmd.add_argument("--split", choices=("train", "test"), default="test")
    _add_ablate(eval_cmd)
    eval_cmd.set_defaults(command=_cmd_eval)

    trace_cmd = commands.add_parser("trace", help="Write the reasoning trace of one question.")
    _add_checkpoint(trace_cmd)
    trace_cmd.add_argument("--tasks", help="JSON-lines task file to take the question from.")
    trace_cmd.add_argument("--index", type=int, default=0, help="Which task of the file.")
    trace_cmd.add_argument("--detections", help="Detections JSON file.")
    trace_cmd.add_argument("--captions", help="Caption tuples JSON file.")
    trace_cmd.add_argument("--triples", help="Knowledge triples TSV file.")
    trace_cmd.add_argument("--embeddings", help="Word vectors text file.")
    trace_cmd.add_argument("--question", help="Question text, used with the annotation files.")
    trace_cmd.add_argument(
        "--omit-noop",
        dest="omit_noop",
        action="store_true",
        help="Drop the trailing steps whose most weighted module is a NoOp.",
    )
    _add_ablate(trace_cmd)
    trace_cmd.add_argument("--out", dest="out", help="Trace file; defaults to standard output.")
    trace_cmd.set_defaults(command=_cmd_trace)

    gen_cmd = commands.add_parser("gen-data", help="Generate a synthetic dataset directory.")
    _add_config(gen_cmd, required=False)
    _add_out(gen_cmd, "Dataset directory to write.")
    _add_seed(gen_cmd)
    gen_cmd.set_defaults(command=_cmd_gen_data)

    grad_cmd = commands.add_parser("grad-check", help="Run the finite-difference gradient suite.")
    _add_seed(grad_cmd)
    grad_cmd.add_argument("--instances", type=int, default=10, help="Random inputs per component.")
    grad_cmd.add_argument("--out", dest="out", help="Report file; defaults to standard output.")
    grad_cmd.set_defaults(command=_cmd_grad_check)
    return parser


def _add_config(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument("--config", required=required, help="YAML training configuration.")


def _add_out(parser: argparse.ArgumentParser, text: str) -> None:
    parser.add_argument("--out", dest="out", default=os.path.curdir, help=text)


def _add_seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, help="Overrides the configured seed.")


def _add_ablate(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--ablate",
        action="append",
        choices=ABLATIONS,
        help="Disable a graph layer or module kind; may be repeated.",
    )


def _add_checkpoint(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--checkpoint", required=True, help="Checkpoint written by train.")


def _report(res: Result[Any]) -> bool:
    """Print the problems of a result; True when it is usable."""
    for problem in res.problems:
        print(repr(problem), file=sys.stderr)
    return res.is_valid


def _print_json(data: Any, out: Optional[str]) -> None:
    if out:
        write_json(out, data)
    else:
        print(json.dumps(data, indent=2, sort_keys=True))


def _load_config(parsed: argparse.Namespace) -> Optional[TrainConfig]:
    if parsed.config is None:
        config = TrainConfig()
    else:
        res = load_config(parsed.config)
        if not _report(res):
            return None
        config = res.required()
    if parsed.seed is not None:
        if parsed.seed < 0:
            print(f"ERROR: --seed must be non-negative, got {parsed.seed}", file=sys.stderr)
            return None
        config = config.replace(seed=parsed.seed)
    if getattr(parsed, "ablate", None):
        config = config.replace(ablate=parsed.ablate)
    return config


def _dataset_for(config: TrainConfig) -> Optional[Dataset]:
    if config.dataset is None:
        return generate_dataset(config)
    res = load_dataset(config.dataset)
    if not _report(res):
        return None
    return res.required()


def _cmd_train(parsed: argparse.Namespace) -> int:
    config = _load_config(parsed)
    if config is None:
        return EXIT_USAGE
    dataset = _dataset_for(config)
    if dataset is None:
        return EXIT_USAGE
    if config.dataset is None:
        save_dataset(dataset, os.path.join(parsed.out, DATASET_DIR))
    shuffle_rng = seeded_rng(config.seed, SHUFFLE_STREAM)
    network, metrics = train(config, dataset, shuffle_rng=shuffle_rng)
    save_checkpoint(
        os.path.join(parsed.out, CHECKPOINT_FILE),
        network,
        config,
        shuffle_rng.bit_generator.state,
    )
    write_json(os.path.join(parsed.out, METRICS_FILE), metrics.as_json())
    return EXIT_OK


def _cmd_eval(parsed: argparse.Namespace) -> int:
    res = load_checkpoint(parsed.checkpoint)
    if not _report(res):
        return EXIT_USAGE
    checkpoint = res.required()
    if parsed.dataset is not None:
        found = load_dataset(parsed.dataset)
        if not _report(found):
            return EXIT_USAGE
        dataset: Optional[Dataset] = found.required()
    else:
        dataset = _dataset_for(checkpoint.config)
    if dataset is None:
        return EXIT_USAGE
    tasks = dataset.test if parsed.split == "test" else dataset.train
    metrics = evaluate(checkpoint.network, tasks, parsed.ablate)
    _print_json(metrics.as_json(), None)
    return EXIT_OK


def _cmd_trace(parsed: argparse.Namespace) -> int:
    res = load_checkpoint(parsed.checkpoint)
    if not _report(res):
        return EXIT_USAGE
    checkpoint = res.required()
    question = _trace_question(parsed, checkpoint.config)
    if question is None:
        return EXIT_USAGE
    graphs, tokens = question
    found = layer_dims(graphs)
    if found != checkpoint.network.dims:
        print(
            f"ERROR: graph feature widths {found} do not match the checkpoint's"
            f" {dict(checkpoint.network.dims)}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    with no_recording():
        _, trace = checkpoint.network.run(graphs, tokens, parsed.ablate)
    data = trace_to_json(trace, drop_noop=parsed.omit_noop)
    checked = validate_trace(data)
    if not _report(checked):
        return EXIT_FAILURE
    _print_json(data, parsed.out)
    return EXIT_OK


def _trace_question(
    parsed: argparse.Namespace, config: TrainConfig
) -> Optional[Tuple[MultiLayerGraph, Sequence[str]]]:
    annotation_args = (parsed.detections, parsed.captions, parsed.triples, parsed.embeddings)
    if parsed.tasks is not None:
        tasks = load_tasks(parsed.tasks)
        if not _report(tasks):
            return None
        found = tasks.required()
        if not 0 <= parsed.index < len(found):
            print(
                f"ERROR: --index must be below {len(found)}, got {parsed.index}", file=sys.stderr
            )
            return None
        task = found[parsed.index]
        return task.graphs, task.tokens
    if any(a is None for a in annotation_args) or not parsed.question:
        print(
            "ERROR: give --tasks, or all of --detections, --captions, --triples, --embeddings"
            " and --question",
            file=sys.stderr,
        )
        return None
    annotations = load_annotations(
        detections=parsed.detections,
        captions=parsed.captions,
        triples=parsed.triples,
        embeddings=parsed.embeddings,
        max_captions=config.max_captions,
    )
    if not _report(annotations):
        return None
    loaded = annotations.required()
    graphs = build_multilayer_graph(
        detections=loaded.detections,
        captions=loaded.captions,
        store=loaded.triples,
        emb=loaded.emb,
        max_objects=config.max_objects,
        a=config.score_a,
        b=config.score_b,
        k=config.top_k,
    )
    return graphs, tokenize(parsed.question)


def _cmd_gen_data(parsed: argparse.Namespace) -> int:
    config = _load_config(parsed)
    if config is None:
        return EXIT_USAGE
    dataset = generate_dataset(config)
    save_dataset(dataset, parsed.out)
    counts = answer_counts(dataset.train)
    _LOG.info(
        "%d distinct answers in the training split, most frequent %d times",
        len(counts),
        max(counts.values()),
    )
    return EXIT_OK


def _cmd_grad_check(parsed: argparse.Namespace) -> int:
    if parsed.instances < 1:
        print(f"ERROR: --instances must be positive, got {parsed.instances}", file=sys.stderr)
        return EXIT_USAGE
    report = run_gradient_suite(parsed.seed or 0, instances=parsed.instances)
    _print_json(report.as_json(), parsed.out)
    return EXIT_OK if report.passed else EXIT_FAILURE
