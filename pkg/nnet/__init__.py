from .adam import AdamState, adam_init, adam_step, adam_update
from .checkpoint import CHECKPOINT_FORMAT, load_checkpoint, params_from_dict, params_to_dict, save_checkpoint
from .mlp import (
    MemberPrediction,
    MlpParams,
    NumericError,
    backward,
    forward,
    forward_batch,
    init_params,
    input_gradient,
    input_gradient_batch,
    min_abs_preactivation,
    nll,
    nll_batch,
)
from .train import EmptyDatasetError, TrainConfig, learning_rate, train

__all__ = [
    "AdamState",
    "adam_init",
    "adam_step",
    "adam_update",
    "CHECKPOINT_FORMAT",
    "load_checkpoint",
    "params_from_dict",
    "params_to_dict",
    "save_checkpoint",
    "MemberPrediction",
    "MlpParams",
    "NumericError",
    "backward",
    "forward",
    "forward_batch",
    "init_params",
    "input_gradient",
    "input_gradient_batch",
    "min_abs_preactivation",
    "nll",
    "nll_batch",
    "EmptyDatasetError",
    "TrainConfig",
    "learning_rate",
    "train",
]
