"""Transition-pair datasets and their on-disk form.

A dataset is a CSV with columns ``x0..x{p-1},xn0..xn{p-1}`` (one ``(x_t, x_{t+1})`` pair per row) preceded by
``#`` header comment lines, plus a JSON metadata sidecar next to it.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .config import artifact_header, header_lines, to_document
from .errors import DatasetError

_logger = logging.getLogger(__name__)

SIDECAR_SUFFIX = ".meta.json"


@dataclass(frozen=True)
class DatasetMetadata:
    p: int
    generator: str
    params: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    n_pairs: int = 0
    illustrative: bool = False


@dataclass(frozen=True)
class TransitionPairs:
    x: np.ndarray
    x_next: np.ndarray
    metadata: DatasetMetadata

    def __post_init__(self) -> None:
        if self.x.ndim != 2 or self.x.shape != self.x_next.shape:
            raise DatasetError(f"pair arrays must both be (n, p); got {self.x.shape} and {self.x_next.shape}")
        if self.x.shape[1] != self.metadata.p:
            raise DatasetError(f"metadata says p={self.metadata.p} but the pairs have {self.x.shape[1]} columns")

    @property
    def p(self) -> int:
        return self.metadata.p

    def __len__(self) -> int:
        return int(self.x.shape[0])

    def subset(self, index: np.ndarray) -> "TransitionPairs":
        return TransitionPairs(self.x[index], self.x_next[index], replace(self.metadata, n_pairs=len(index)))

    def split(
        self, validation_fraction: float, rng: np.random.Generator
    ) -> Tuple["TransitionPairs", "TransitionPairs"]:
        """Random train/validation split; both parts keep at least one pair."""
        n = len(self)
        if n < 2:
            raise DatasetError(f"need at least 2 pairs to split into train and validation, got {n}")
        n_val = min(max(1, int(round(n * validation_fraction))), n - 1)
        order = rng.permutation(n)
        return self.subset(np.sort(order[n_val:])), self.subset(np.sort(order[:n_val]))


def column_names(p: int) -> List[str]:
    return [f"x{i}" for i in range(p)] + [f"xn{i}" for i in range(p)]


def sidecar_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_name(path.stem + SIDECAR_SUFFIX)


def write_csv(path: Union[str, Path], frame: pd.DataFrame, header: Mapping[str, Any]) -> None:
    """Write `frame` as CSV preceded by ``# key: value`` lines."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        for line in header_lines(header):
            f.write(line + "\n")
        frame.to_csv(f, index=False, float_format="%.17g", lineterminator="\n")


def read_csv(path: Union[str, Path]) -> Tuple[pd.DataFrame, Dict[str, str]]:
    """Read a CSV written by `write_csv`; returns the frame and the parsed header comments."""
    path = Path(path)
    header: Dict[str, str] = {}
    try:
        with path.open("r", encoding="utf-8") as f:
            for line in f:
                if not line.startswith("#"):
                    break
                key, _, value = line[1:].partition(":")
                header[key.strip()] = value.strip()
        frame = pd.read_csv(path, comment="#", float_precision="round_trip")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DatasetError(f"cannot read {path}: {e}") from e
    return frame, header


def write_dataset(path: Union[str, Path], pairs: TransitionPairs) -> Tuple[Path, Path]:
    path = Path(path)
    meta = pairs.metadata
    header = artifact_header(meta.seed, meta)
    frame = pd.DataFrame(np.hstack([pairs.x, pairs.x_next]), columns=column_names(meta.p))
    write_csv(path, frame, header)

    sidecar = sidecar_path(path)
    document = {**to_document(meta), "header": header}
    sidecar.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _logger.info("wrote %d pairs (p=%d) to %s", len(pairs), meta.p, path)
    return path, sidecar


def read_dataset(path: Union[str, Path], metadata: Optional[DatasetMetadata] = None) -> TransitionPairs:
    path = Path(path)
    if metadata is None:
        sidecar = sidecar_path(path)
        try:
            document = json.loads(sidecar.read_text(encoding="utf-8"))
        except OSError as e:
            raise DatasetError(f"missing metadata sidecar {sidecar}: {e}") from e
        except json.JSONDecodeError as e:
            raise DatasetError(f"invalid metadata sidecar {sidecar}: {e}") from e
        try:
            metadata = DatasetMetadata(
                p=int(document["p"]),
                generator=str(document["generator"]),
                params=dict(document.get("params", {})),
                seed=int(document.get("seed", 0)),
                n_pairs=int(document.get("n_pairs", 0)),
                illustrative=bool(document.get("illustrative", False)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DatasetError(f"invalid metadata sidecar {sidecar}: {e}") from e

    frame, _ = read_csv(path)
    expected = column_names(metadata.p)
    if list(frame.columns) != expected:
        raise DatasetError(f"{path}: expected columns {','.join(expected)}, got {','.join(map(str, frame.columns))}")
    values = frame.to_numpy(dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise DatasetError(f"{path}: dataset contains non-finite values")
    if metadata.n_pairs and metadata.n_pairs != len(values):
        raise DatasetError(f"{path}: metadata announces {metadata.n_pairs} pairs, file has {len(values)}")

    p = metadata.p
    return TransitionPairs(values[:, :p].copy(), values[:, p:].copy(), replace(metadata, n_pairs=len(values)))
