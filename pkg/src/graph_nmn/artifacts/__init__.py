"""Files the command line reads and writes: annotations, datasets, checkpoints and traces."""

from .files import read_json, write_json
from .annotations import (
    DEFAULT_MAX_CAPTIONS,
    Annotations,
    format_embeddings,
    load_annotations,
    load_captions,
    load_detections,
    load_embeddings,
    load_triples,
)
from .dataset import (
    ANSWERS_FILE,
    EMBEDDINGS_FILE,
    TEST_FILE,
    TRAIN_FILE,
    format_tasks,
    graph_to_json,
    load_dataset,
    load_tasks,
    parse_task,
    save_dataset,
    task_to_json,
)
from .checkpoint import (
    CHECKPOINT_FORMAT,
    CHECKPOINT_VERSION,
    Checkpoint,
    CheckpointVersionError,
    checkpoint_to_json,
    load_checkpoint,
    parse_checkpoint,
    save_checkpoint,
)
from .trace_export import (
    NOOP_KIND,
    omit_noop,
    step_to_json,
    trace_schema,
    trace_to_json,
    validate_trace,
)
