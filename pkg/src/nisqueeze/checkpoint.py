"""JSON checkpoints of trained squeezers and baselines.

Floats are written with their shortest round-trip representation, so a saved checkpoint loads back bit-exactly.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from .config import TrainConfig, to_document
from .errors import ConfigurationError, DatasetError
from .model import BaselineModel, NisModel
from .rng import RandomStreams

_logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class CheckpointKind(str, Enum):
    NIS = "nis"
    BASELINE = "baseline"


@dataclass
class TrainingHistory:
    """Per-epoch losses; epoch 0 is the untrained model."""

    epochs: List[int] = field(default_factory=list)
    train_loss: List[float] = field(default_factory=list)
    val_loss: List[float] = field(default_factory=list)
    best_val_loss: List[float] = field(default_factory=list)
    mean_log_det: List[Optional[float]] = field(default_factory=list)

    def record(self, epoch: int, train: float, val: float, log_det: Optional[float]) -> None:
        best = min(val, self.best_val_loss[-1]) if self.best_val_loss else val
        self.epochs.append(epoch)
        self.train_loss.append(train)
        self.val_loss.append(val)
        self.best_val_loss.append(best)
        self.mean_log_det.append(log_det)

    def to_columns(self) -> Dict[str, List[Any]]:
        return {
            "epoch": list(self.epochs),
            "train_loss": list(self.train_loss),
            "val_loss": list(self.val_loss),
            "best_val_loss": list(self.best_val_loss),
            "mean_log_det": list(self.mean_log_det),
        }

    @classmethod
    def from_columns(cls, columns: Dict[str, List[Any]]) -> "TrainingHistory":
        return cls(
            epochs=[int(e) for e in columns.get("epoch", [])],
            train_loss=[float(v) for v in columns.get("train_loss", [])],
            val_loss=[float(v) for v in columns.get("val_loss", [])],
            best_val_loss=[float(v) for v in columns.get("best_val_loss", [])],
            mean_log_det=[None if v is None else float(v) for v in columns.get("mean_log_det", [])],
        )


@dataclass
class Checkpoint:
    kind: CheckpointKind
    p: int
    q: int
    hidden: int
    blocks: int
    clamp: float
    parameters: Dict[str, np.ndarray]
    train_config: TrainConfig
    train_loss: float
    val_loss: float
    sigma2: Optional[np.ndarray] = None
    history: TrainingHistory = field(default_factory=TrainingHistory)
    header: Dict[str, Any] = field(default_factory=dict)

    def num_parameters(self) -> int:
        return sum(int(v.size) for v in self.parameters.values())

    def to_model(self) -> NisModel:
        if self.kind != CheckpointKind.NIS:
            raise ConfigurationError(f"checkpoint holds a {self.kind.value} model, not a squeezer")
        # parameters are overwritten right away; the stream only fixes shapes
        model = NisModel(
            self.p, self.q, rng=RandomStreams(0).stream("checkpoint"), hidden=self.hidden, blocks=self.blocks,
            clamp=self.clamp,
        )
        model.load_state_dict(self.parameters)
        return model

    def to_baseline(self) -> BaselineModel:
        if self.kind != CheckpointKind.BASELINE:
            raise ConfigurationError(f"checkpoint holds a {self.kind.value} model, not a baseline")
        model = BaselineModel(self.p, self.hidden, rng=RandomStreams(0).stream("checkpoint"))
        model.load_state_dict(self.parameters)
        return model

    def to_document(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind.value,
            "header": dict(self.header),
            "p": self.p,
            "q": self.q,
            "hidden": self.hidden,
            "blocks": self.blocks,
            "clamp": self.clamp,
            "train_config": to_document(self.train_config),
            "train_loss": self.train_loss,
            "val_loss": self.val_loss,
            "sigma2": None if self.sigma2 is None else [float(v) for v in self.sigma2],
            "history": self.history.to_columns(),
            "parameters": {
                name: {"shape": list(values.shape), "values": [float(v) for v in values.ravel()]}
                for name, values in self.parameters.items()
            },
        }

    @classmethod
    def from_document(cls, document: Dict[str, Any]) -> "Checkpoint":
        version = document.get("schema_version")
        if version != SCHEMA_VERSION:
            raise DatasetError(f"unsupported checkpoint schema version {version!r}, expected {SCHEMA_VERSION}")
        try:
            parameters = {
                name: np.array(entry["values"], dtype=np.float64).reshape(entry["shape"])
                for name, entry in document["parameters"].items()
            }
            sigma2 = document.get("sigma2")
            return cls(
                kind=CheckpointKind(document["kind"]),
                p=int(document["p"]),
                q=int(document["q"]),
                hidden=int(document["hidden"]),
                blocks=int(document["blocks"]),
                clamp=float(document["clamp"]),
                parameters=parameters,
                train_config=TrainConfig.from_document(document["train_config"]),
                train_loss=float(document["train_loss"]),
                val_loss=float(document["val_loss"]),
                sigma2=None if sigma2 is None else np.array(sigma2, dtype=np.float64),
                history=TrainingHistory.from_columns(document.get("history", {})),
                header=dict(document.get("header", {})),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DatasetError(f"malformed checkpoint: {e}") from e


def save_checkpoint(path: Union[str, Path], checkpoint: Checkpoint) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(checkpoint.to_document(), allow_nan=False) + "\n", encoding="utf-8")
    _logger.info("saved %s checkpoint (p=%d, q=%d) to %s", checkpoint.kind.value, checkpoint.p, checkpoint.q, path)
    return path


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise DatasetError(f"cannot read checkpoint {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise DatasetError(f"checkpoint {path} is not valid JSON: {e}") from e
    return Checkpoint.from_document(document)
