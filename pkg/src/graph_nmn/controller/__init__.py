"""Question encoding, the step controller, soft execution and answer readout."""

from .encoder import (
    DEFAULT_MAX_QUESTION_LENGTH,
    LstmGate,
    LstmParams,
    QuestionEncoding,
    create_lstm_params,
    encode_question,
    lstm_cell,
)
from .step import ControllerParams, StepOutput, create_controller_params, step_controller
from .inventory import (
    ABLATIONS,
    GRAPH_ABLATIONS,
    MODULE_ABLATIONS,
    Ablation,
    LayerDims,
    ModuleInventory,
    ablate_graphs,
    build_inventory,
    check_ablations,
    layer_dims,
)
from .executor import MASS_DRIFT, execute_step, partition_mass
from .answer import AnswerParams, create_answer_params, predict_answer
from .trace import LayerAttention, ReasoningTrace, StepRecord
from .network import (
    DEFAULT_STEPS,
    GraphModuleNetwork,
    create_network,
    run_reasoning,
)
