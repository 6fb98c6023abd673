from .__version__ import __version__
from .checkpoint import Checkpoint, CheckpointKind, TrainingHistory, load_checkpoint, save_checkpoint
from .config import OptimizerKind, TrainConfig
from .dataset import DatasetMetadata, TransitionPairs, read_dataset, write_dataset
from .ei import (
    EiConfig,
    EiEstimate,
    EiReport,
    SweepResult,
    cluster_macro_codes,
    ei_gaussian,
    ei_linear_closed_form,
    ei_of_macro,
    judge_emergence,
    sweep_q,
)
from .errors import (
    ConfigurationError,
    DatasetError,
    DimensionMismatchError,
    IllConditionedWarning,
    NisError,
    NumericRangeError,
    TrainingDivergedError,
)
from .model import BaselineModel, NisModel, Rollout
from .networks import Bijector, CouplingBlock, Mlp
from .rng import RandomStreams
from .training import baseline_train, build_model, train

__all__ = [
    "BaselineModel",
    "Bijector",
    "Checkpoint",
    "CheckpointKind",
    "ConfigurationError",
    "CouplingBlock",
    "DatasetError",
    "DatasetMetadata",
    "DimensionMismatchError",
    "EiConfig",
    "EiEstimate",
    "EiReport",
    "IllConditionedWarning",
    "Mlp",
    "NisError",
    "NisModel",
    "NumericRangeError",
    "OptimizerKind",
    "RandomStreams",
    "Rollout",
    "SweepResult",
    "TrainConfig",
    "TrainingDivergedError",
    "TrainingHistory",
    "TransitionPairs",
    "__version__",
    "baseline_train",
    "build_model",
    "cluster_macro_codes",
    "ei_gaussian",
    "ei_linear_closed_form",
    "ei_of_macro",
    "judge_emergence",
    "load_checkpoint",
    "read_dataset",
    "save_checkpoint",
    "sweep_q",
    "train",
    "write_dataset",
]
