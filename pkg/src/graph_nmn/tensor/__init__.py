"""Dense float64 tensors with define-by-run reverse-mode differentiation."""

from . import ops
from .tensor import Tensor, DimensionError, as_tensor, parameter
from .tape import Tape, backward, recording, no_recording, active_tape
from .params import ParameterStore
from .mlp import MlpParams, create_mlp, mlp_dims, mlp_forward
from .gradcheck import GradCheckReport, NonDeterministicError, grad_check, grad_check_many
