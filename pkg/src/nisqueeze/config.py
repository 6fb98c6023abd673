import dataclasses
import hashlib
import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping

import numpy as np

from .__version__ import __version__
from .errors import ConfigurationError
from .networks import DEFAULT_BLOCKS, DEFAULT_CLAMP, DEFAULT_HIDDEN

TOOL_NAME = "nisqueeze"


class OptimizerKind(str, Enum):
    ADAM = "adam"
    SGD = "sgd"


@dataclasses.dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    batch_size: int = 128
    learning_rate: float = 1e-3
    optimizer: OptimizerKind = OptimizerKind.ADAM
    seed: int = 0
    norm: int = 2
    grad_clip: float = 1.0
    validation_fraction: float = 0.1
    hidden: int = DEFAULT_HIDDEN
    blocks: int = DEFAULT_BLOCKS
    clamp: float = DEFAULT_CLAMP
    log_every: int = 1

    def validate(self) -> "TrainConfig":
        for name in ("epochs", "batch_size", "hidden", "blocks", "log_every"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("learning_rate", "grad_clip", "clamp"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be non-negative, got {self.seed}")
        if self.norm not in (1, 2):
            raise ConfigurationError(f"norm must be 1 or 2, got {self.norm}")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ConfigurationError(f"validation_fraction must lie in (0, 1), got {self.validation_fraction}")
        return self

    @classmethod
    def from_document(cls, document: Mapping[str, Any]) -> "TrainConfig":
        values = dict(document)
        if "optimizer" in values:
            values["optimizer"] = OptimizerKind(values["optimizer"])
        known = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in values.items() if k in known})


def to_document(value: Any) -> Any:
    """Convert dataclasses, enums, paths and numpy values into JSON-ready builtins."""
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_document(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Mapping):
        return {str(k): to_document(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_document(v) for v in value]
    return value


def canonical_json(value: Any) -> str:
    return json.dumps(to_document(value), sort_keys=True, separators=(",", ":"))


def config_hash(*configs: Any) -> str:
    return hashlib.sha256(canonical_json(list(configs)).encode("utf-8")).hexdigest()[:16]


def artifact_header(seed: int, *configs: Any) -> Dict[str, Any]:
    return {"tool": TOOL_NAME, "version": __version__, "seed": int(seed), "config_hash": config_hash(*configs)}


def header_lines(header: Mapping[str, Any]) -> List[str]:
    return [f"# {key}: {value}" for key, value in header.items()]
