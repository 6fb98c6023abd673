"""Plot data for trained squeezers: macro encodings, the learned drift field, rollouts and clusters.

Only CSV tables are produced; drawing them is left to whatever plotting tool is at hand.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd

from .checkpoint import Checkpoint
from .config import artifact_header
from .dataset import TransitionPairs, write_csv
from .datagen import rotate, spring_latent, state_bits
from .ei import Clustering, cluster_macro_codes
from .errors import ConfigurationError, DimensionMismatchError
from .model import BaselineModel, NisModel
from .rng import RandomStreams

_logger = logging.getLogger(__name__)

ENUMERABLE_GENERATORS = ("markov", "boolnet")


@dataclass(frozen=True)
class ReportOptions:
    steps: int = 400
    max_points: int = 1000
    deterministic: bool = True
    seed: int = 0

    def validate(self) -> "ReportOptions":
        if self.steps < 1 or self.max_points < 1:
            raise ConfigurationError(f"steps and max_points must be positive, got {self.steps}, {self.max_points}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be non-negative, got {self.seed}")
        return self


def _columns(prefix: str, n: int) -> List[str]:
    return [f"{prefix}{i}" for i in range(n)]


def _sample_rows(dataset: TransitionPairs, max_points: int) -> np.ndarray:
    return np.arange(min(len(dataset), max_points))


def enumerable_states(dataset: TransitionPairs) -> Optional[np.ndarray]:
    """All micro states of a one-hot system, or None for continuous data."""
    if dataset.metadata.generator in ENUMERABLE_GENERATORS:
        return np.eye(dataset.p)
    return None


def scatter_frame(model: NisModel, dataset: TransitionPairs, options: ReportOptions) -> pd.DataFrame:
    """Macro encoding per micro state.

    One-hot systems get one row per state (``state`` is its decimal code); continuous systems get one row per
    sampled x_t, and spring data also carries the true latent (z, v).
    """
    states = enumerable_states(dataset)
    if states is not None:
        codes = np.arange(dataset.p)
        frame = pd.DataFrame({"state": codes})
        if dataset.metadata.generator == "boolnet":
            n_nodes = int(np.log2(dataset.p))
            frame["bits"] = ["".join(str(b) for b in row) for row in state_bits(codes, n_nodes)]
        y = model.encode(states)
    else:
        x = dataset.x[_sample_rows(dataset, options.max_points)]
        frame = pd.DataFrame(x, columns=_columns("x", dataset.p))
        if dataset.metadata.generator == "spring":
            latent = spring_latent(x)
            frame["z"], frame["v"] = latent[:, 0], latent[:, 1]
        y = model.encode(x)
    for i, column in enumerate(_columns("y", model.q)):
        frame[column] = y[:, i]
    return frame


def dynamics_frame(model: NisModel, dataset: TransitionPairs, options: ReportOptions) -> pd.DataFrame:
    """Samples of the learned drift Δy = f(y) next to the observed macro change encode(x_{t+1}) - encode(x_t)."""
    rows = _sample_rows(dataset, options.max_points)
    y = model.encode(dataset.x[rows])
    learned = model.macro_step(y) - y
    observed = model.encode(dataset.x_next[rows]) - y
    return pd.DataFrame(
        np.hstack([y, learned, observed]),
        columns=_columns("y", model.q) + _columns("dy", model.q) + _columns("dy_obs", model.q),
    )


def rollout_frame(
    model: NisModel,
    dataset: TransitionPairs,
    options: ReportOptions,
    baseline: Optional[BaselineModel] = None,
    x0: Optional[np.ndarray] = None,
) -> pd.DataFrame:
    """Pure macro rollout from `x0` (default: the first pair of the dataset), decoded at every step."""
    start = dataset.x[0] if x0 is None else np.asarray(x0, dtype=np.float64)
    rng = None if options.deterministic else RandomStreams(options.seed).stream("report.rollout")
    trajectory = model.rollout(start, options.steps, rng=rng, deterministic=options.deterministic)

    frame = pd.DataFrame({"step": np.arange(options.steps + 1)})
    for i, column in enumerate(_columns("y", model.q)):
        frame[column] = trajectory.macro[:, i]
    for i, column in enumerate(_columns("xhat", model.p)):
        frame[column] = trajectory.micro[:, i]

    if dataset.metadata.generator == "spring":
        dt = float(dataset.metadata.params.get("dt", 1.0))
        latent0 = spring_latent(start)
        exact = np.stack([rotate(latent0, t * dt) for t in range(options.steps + 1)])
        frame["z"], frame["v"] = exact[:, 0], exact[:, 1]

    if baseline is not None:
        if baseline.p != model.p:
            raise DimensionMismatchError("baseline model", model.p, (baseline.p,))
        states = np.zeros((options.steps + 1, model.p))
        states[0] = start
        for t in range(1, options.steps + 1):
            states[t] = baseline.predict_micro(states[t - 1])
        for i, column in enumerate(_columns("baseline", model.p)):
            frame[column] = states[:, i]
    return frame


def cluster_frame(clustering: Clustering) -> pd.DataFrame:
    return pd.DataFrame({"state": np.arange(clustering.labels.size), "cluster": clustering.labels})


def write_report(
    directory: Union[str, Path],
    checkpoint: Checkpoint,
    dataset: TransitionPairs,
    options: ReportOptions = ReportOptions(),
    baseline: Optional[Checkpoint] = None,
) -> Dict[str, Path]:
    """Write ``scatter.csv``, ``dynamics.csv``, ``rollout.csv`` and, for one-hot systems, ``clusters.csv``."""
    options.validate()
    if dataset.p != checkpoint.p:
        raise DimensionMismatchError("dataset", checkpoint.p, (dataset.p,))
    model = checkpoint.to_model()
    baseline_model = baseline.to_baseline() if baseline is not None else None

    directory = Path(directory)
    header = artifact_header(options.seed, checkpoint.header.get("config_hash", ""), dataset.metadata, options)
    paths = {
        "scatter": directory / "scatter.csv",
        "dynamics": directory / "dynamics.csv",
        "rollout": directory / "rollout.csv",
    }
    write_csv(paths["scatter"], scatter_frame(model, dataset, options), header)
    write_csv(paths["dynamics"], dynamics_frame(model, dataset, options), header)
    write_csv(paths["rollout"], rollout_frame(model, dataset, options, baseline_model), header)

    states = enumerable_states(dataset)
    if states is not None:
        clustering = cluster_macro_codes(model, states)
        paths["clusters"] = directory / "clusters.csv"
        write_csv(paths["clusters"], cluster_frame(clustering), {**header, "clusters": clustering.count})
        _logger.info("macro encodings of %d states form %d clusters", len(states), clustering.count)
    return paths
