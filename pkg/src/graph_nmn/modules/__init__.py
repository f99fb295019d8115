"""The differentiable graph modules."""

from .base import AbcGraphModule, ModuleKind, STEP_KINDS, StepInputs
from .combine import AndModule, NoOpModule, and_, noop
from .find import FilterModule, FindModule, FindParams, create_find_params, filter_, find
from .relate import (
    RelateModule,
    RelateParams,
    create_relate_params,
    edge_attention,
    edge_weights,
    relate,
    transfer,
)
from .cross_graph import (
    CrossGraphModule,
    CrossGraphParams,
    create_cross_graph_params,
    cross_graph,
)
from .describe import describe
