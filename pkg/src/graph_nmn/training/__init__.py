"""Synthetic tasks, their symbolic oracle, and the training and evaluation loops."""

from .config import FAMILIES, FIELD_NAMES, TrainConfig, load_config, parse_config
from .oracle import OracleError, ProgramOp, ProgramStep, execute_program
from .synthetic import (
    DEFAULT_COLORS,
    DEFAULT_KNOWLEDGE,
    FAMILY_HOPS,
    MAX_LAYER_NODES,
    MIN_LAYER_NODES,
    SyntheticTask,
    SyntheticWorld,
    TaskSizes,
    answer_counts,
    generate_synthetic_task,
    generate_tasks,
)
from .loss import cross_entropy_loss
from .optimizer import Adam, DivergenceError
from .dataset import (
    DATA_STREAM,
    INIT_STREAM,
    SHUFFLE_STREAM,
    Dataset,
    generate_dataset,
    seeded_rng,
)
from .trainer import Metrics, create_model, evaluate, predict, train
from .gradient_suite import (
    SUITE_COMPONENTS,
    SuiteReport,
    random_graph,
    random_graphs,
    run_gradient_suite,
)
