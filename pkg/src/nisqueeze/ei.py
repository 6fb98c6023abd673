"""Effective information of Gaussian-output dynamics, its normalization Eff, the macro-dimension line search and
the causal emergence verdict.

For a map μ: R^q → R^q with Gaussian output noise Σ = diag(σ²), intervened on the cube [-L, L]^q::

    EI = -(1 + q ln 2π + ln det Σ) / 2 + q ln 2L + E[ln |det ∂μ(X)|]

The expectation is a Monte-Carlo average over uniform draws. All quantities are in nats.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import pdist, squareform
from tapegrad import NonFiniteError, Tensor, batch_jacobian, no_grad

from .checkpoint import Checkpoint
from .config import TrainConfig
from .dataset import TransitionPairs, write_csv
from .errors import ConfigurationError, NisError, NumericRangeError
from .model import NisModel
from .rng import RandomStreams
from .training import build_model, train

_logger = logging.getLogger(__name__)

MacroMap = Callable[[Tensor], Tensor]

DEFAULT_NOISE_FLOOR = 0.05
LN_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class EiConfig:
    L: float = 100.0  # noqa: N815
    n_samples: int = 1000
    seed: int = 0
    det_clamp: float = 1e-12
    sigma_floor: float = 1e-6
    full_entropy: bool = False
    chunk_size: int = 250
    workers: int = 1

    def validate(self) -> "EiConfig":
        # Eff divides by q ln 2L
        if not self.L > 0.5:
            raise ConfigurationError(f"cube half-width L must exceed 0.5, got {self.L}")
        if self.n_samples < 1:
            raise ConfigurationError(f"n_samples must be >= 1, got {self.n_samples}")
        if not 0 < self.det_clamp < 1:
            raise ConfigurationError(f"det_clamp must lie in (0, 1), got {self.det_clamp}")
        if not self.sigma_floor > 0:
            raise ConfigurationError(f"sigma_floor must be positive, got {self.sigma_floor}")
        if self.chunk_size < 1 or self.workers < 1:
            raise ConfigurationError("chunk_size and workers must be positive")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be non-negative, got {self.seed}")
        return self


@dataclass(frozen=True)
class EiEstimate:
    ei: float
    mean_log_det: float
    stderr: float
    clamped: int
    n_samples: int
    degenerate: bool = False

    def __float__(self) -> float:
        return self.ei


@dataclass(frozen=True)
class EiReport:
    q: int
    ei: float
    eff: float
    sigma: np.ndarray
    L: float  # noqa: N815
    n_samples: int
    seed: int
    stderr: float
    clamped: int = 0

    @staticmethod
    def normalize(ei: float, q: int, L: float) -> float:  # noqa: N803
        if not L > 0.5:
            raise ConfigurationError(f"Eff is undefined for a cube half-width of {L}")
        return ei / (q * math.log(2.0 * L))


@dataclass(frozen=True)
class Verdict:
    q_star: int
    emergent: bool
    low_signal: bool


@dataclass
class SweepResult:
    p: int
    reports: List[EiReport]
    q_star: int
    emergent: bool
    low_signal: bool
    warnings: List[str] = field(default_factory=list)
    checkpoints: Dict[int, Checkpoint] = field(default_factory=dict)

    def report(self, q: int) -> Optional[EiReport]:
        return next((r for r in self.reports if r.q == q), None)


def _entropy_constant(q: int, full_entropy: bool) -> float:
    return q * (1.0 + LN_2PI) if full_entropy else 1.0 + q * LN_2PI


def _ei_value(q: int, sigma: np.ndarray, L: float, mean_log_det: float, full_entropy: bool) -> float:  # noqa: N803
    log_det_sigma = 2.0 * float(np.sum(np.log(sigma)))
    return -(_entropy_constant(q, full_entropy) + log_det_sigma) / 2.0 + q * math.log(2.0 * L) + mean_log_det


def _check_sigma(sigma: Union[Sequence[float], np.ndarray], cfg: EiConfig) -> np.ndarray:
    values = np.asarray(sigma, dtype=np.float64).reshape(-1)
    if values.size == 0 or not np.all(np.isfinite(values)):
        raise ConfigurationError(f"sigma must be a non-empty finite vector, got {values}")
    if np.any(values < cfg.sigma_floor):
        raise ConfigurationError(f"sigma entries must be >= {cfg.sigma_floor:g}, got {values}")
    return values


def _locate_non_finite(mu: MacroMap, points: np.ndarray, offset: int) -> NumericRangeError:
    with no_grad():
        for i, row in enumerate(points):
            try:
                out = mu(Tensor(row[None, :]))
            except NonFiniteError as e:
                return NumericRangeError(f"macro map is not finite inside the cube: {e}", sample=offset + i)
            if not np.all(np.isfinite(out.data)):
                return NumericRangeError("macro map is not finite inside the cube", sample=offset + i)
    return NumericRangeError("macro map is not finite inside the cube")


def _log_abs_det(mu: MacroMap, points: np.ndarray, offset: int) -> np.ndarray:
    try:
        jacobians = batch_jacobian(mu, points)
    except NonFiniteError:
        raise _locate_non_finite(mu, points, offset) from None
    _, log_abs = np.linalg.slogdet(jacobians)
    return log_abs


def ei_gaussian(
    mu: MacroMap, sigma: Union[Sequence[float], np.ndarray], cfg: EiConfig, *, stream: str = "ei"
) -> EiEstimate:
    """Monte-Carlo EI of `mu` (a row-wise map on ``(N, q)`` tensors) with output noise std `sigma`.

    Samples are drawn up front from one counter-based stream and evaluated in chunks, so the estimate does not
    depend on ``cfg.workers``. When every sample has |det ∂μ| below ``cfg.det_clamp`` the map carries no
    information and the estimate is exactly 0.
    """
    cfg.validate()
    sigma = _check_sigma(sigma, cfg)
    q = sigma.size
    points = RandomStreams(cfg.seed).stream(stream, q).uniform(-cfg.L, cfg.L, size=(cfg.n_samples, q))

    starts = list(range(0, cfg.n_samples, cfg.chunk_size))

    def evaluate(start: int) -> np.ndarray:
        return _log_abs_det(mu, points[start : start + cfg.chunk_size], start)

    if cfg.workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(evaluate, starts))
    else:
        parts = [evaluate(s) for s in starts]
    log_abs = np.concatenate(parts)

    floor = math.log(cfg.det_clamp)
    clamped_mask = ~(log_abs >= floor)
    clamped = int(np.count_nonzero(clamped_mask))
    if clamped == cfg.n_samples:
        _logger.info("|det J| <= %g on all %d samples, EI = 0", cfg.det_clamp, cfg.n_samples)
        return EiEstimate(0.0, floor, 0.0, clamped, cfg.n_samples, degenerate=True)
    if clamped:
        _logger.warning("clamped ln|det J| at ln(%g) for %d of %d samples", cfg.det_clamp, clamped, cfg.n_samples)

    values = np.where(clamped_mask, floor, log_abs)
    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    ei = _ei_value(q, sigma, cfg.L, mean, cfg.full_entropy)
    return EiEstimate(ei, mean, stderr, clamped, cfg.n_samples)


def ei_linear_closed_form(
    A: np.ndarray, sigma: Union[Sequence[float], np.ndarray], cfg: EiConfig  # noqa: N803
) -> float:
    """Exact EI of an affine map x -> Ax + b; the Jacobian is constant so no sampling is needed."""
    cfg.validate()
    sigma = _check_sigma(sigma, cfg)
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))  # noqa: N806
    if A.shape != (sigma.size, sigma.size):
        raise ConfigurationError(f"A must be {sigma.size}x{sigma.size}, got {A.shape}")
    _, log_abs = np.linalg.slogdet(A)
    if not log_abs >= math.log(cfg.det_clamp):
        return 0.0
    return _ei_value(sigma.size, sigma, cfg.L, float(log_abs), cfg.full_entropy)


def macro_sigma(checkpoint: Checkpoint, cfg: EiConfig) -> np.ndarray:
    if checkpoint.sigma2 is None:
        raise ConfigurationError("checkpoint carries no macro residual variances; retrain to record them")
    return np.maximum(np.sqrt(np.maximum(checkpoint.sigma2, 0.0)), cfg.sigma_floor)


def ei_of_macro(checkpoint: Checkpoint, cfg: EiConfig, *, model: Optional[NisModel] = None) -> EiReport:
    """EI and Eff of the learned macro transition y -> y + f(y) with the recorded residual noise."""
    sigma = macro_sigma(checkpoint, cfg)
    model = model if model is not None else checkpoint.to_model()
    estimate = ei_gaussian(model.macro_step_tensor, sigma, cfg)
    return EiReport(
        q=checkpoint.q,
        ei=estimate.ei,
        eff=EiReport.normalize(estimate.ei, checkpoint.q, cfg.L),
        sigma=sigma,
        L=cfg.L,
        n_samples=cfg.n_samples,
        seed=cfg.seed,
        stderr=estimate.stderr,
        clamped=estimate.clamped,
    )


def judge_emergence(reports: Sequence[EiReport], p: int, noise_floor: float = DEFAULT_NOISE_FLOOR) -> Verdict:
    """Pick q* = argmax Eff (ties toward smaller q) and compare it against the projection-free q = p model.

    The result is flagged low-signal when no q reaches an Eff of `noise_floor`.
    """
    if not reports:
        raise ConfigurationError("cannot judge emergence without any report")
    ordered = sorted(reports, key=lambda r: r.q)
    best = max(r.eff for r in ordered)
    q_star = next(r.q for r in ordered if r.eff == best)
    micro = next((r for r in ordered if r.q == p), None)
    emergent = micro is not None and best > micro.eff
    return Verdict(q_star=q_star, emergent=emergent, low_signal=best < noise_floor)


def _train_best_of(
    dataset: TransitionPairs, q: int, train_cfg: TrainConfig, seeds: Sequence[int]
) -> Tuple[Optional[Checkpoint], List[str]]:
    best: Optional[Checkpoint] = None
    warnings: List[str] = []
    for seed in seeds:
        cfg = replace(train_cfg, seed=seed)
        try:
            checkpoint = train(build_model(dataset.p, q, cfg), dataset, cfg)
        except NisError as e:
            warnings.append(f"q={q}, seed={seed}: training failed: {e}")
            continue
        if best is None or checkpoint.val_loss < best.val_loss:
            best = checkpoint
    return best, warnings


def _sweep_job(
    args: Tuple[TransitionPairs, int, TrainConfig, EiConfig, Tuple[int, ...]]
) -> Tuple[int, Optional[Checkpoint], Optional[EiReport], List[str]]:
    dataset, q, train_cfg, ei_cfg, seeds = args
    checkpoint, warnings = _train_best_of(dataset, q, train_cfg, seeds)
    if checkpoint is None:
        return q, None, None, warnings
    try:
        report = ei_of_macro(checkpoint, ei_cfg)
    except NisError as e:
        warnings.append(f"q={q}: EI evaluation failed: {e}")
        return q, checkpoint, None, warnings
    return q, checkpoint, report, warnings


def sweep_q(
    dataset: TransitionPairs,
    train_cfg: TrainConfig,
    ei_cfg: EiConfig,
    seeds: Sequence[int] = (0,),
    *,
    max_q: Optional[int] = None,
    workers: int = 1,
    noise_floor: float = DEFAULT_NOISE_FLOOR,
) -> SweepResult:
    """Train one squeezer per macro dimension (best of `seeds` by validation loss) and judge emergence.

    q runs over 1..min(p, max_q) and always includes p. With ``workers > 1`` the q values train in separate
    processes; the result does not depend on the worker count.
    """
    p = dataset.p
    if p < 2:
        raise ConfigurationError(f"the sweep needs p >= 2, got {p}")
    if not seeds:
        raise ConfigurationError("the sweep needs at least one seed")
    train_cfg.validate()
    ei_cfg.validate()
    top = p if max_q is None else max(1, min(p, max_q))
    qs = sorted(set(range(1, top + 1)) | {p})
    jobs = [(dataset, q, train_cfg, ei_cfg, tuple(seeds)) for q in qs]

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_job, jobs))
    else:
        outcomes = []
        for job in jobs:
            _logger.info("sweep: training q=%d of %s", job[1], qs)
            outcomes.append(_sweep_job(job))

    reports: List[EiReport] = []
    checkpoints: Dict[int, Checkpoint] = {}
    warnings: List[str] = []
    for q, checkpoint, report, job_warnings in outcomes:
        for message in job_warnings:
            _logger.warning("%s", message)
        warnings.extend(job_warnings)
        if checkpoint is not None:
            checkpoints[q] = checkpoint
        if report is None:
            warnings.append(f"q={q} excluded from the sweep")
            continue
        _logger.info("sweep: q=%d EI %.6g Eff %.6g (stderr %.3g)", q, report.ei, report.eff, report.stderr)
        reports.append(report)

    if not reports:
        raise NumericRangeError("every macro dimension failed to train; see the log for details")
    if all(r.q != p for r in reports):
        warnings.append(f"the q={p} reference model failed, emergence cannot be established")

    verdict = judge_emergence(reports, p, noise_floor)
    if verdict.low_signal:
        warnings.append(f"low signal: no macro dimension reaches Eff >= {noise_floor:g}")
    return SweepResult(p, reports, verdict.q_star, verdict.emergent, verdict.low_signal, warnings, checkpoints)


@dataclass(frozen=True)
class Clustering:
    labels: np.ndarray
    count: int
    threshold: float


def cluster_codes(codes: np.ndarray) -> Clustering:
    """Single-linkage clusters of macro codes, cut at 10x the median nearest-neighbour distance.

    Labels are numbered in order of first appearance.
    """
    codes = np.asarray(codes, dtype=np.float64)
    if codes.ndim == 1:
        codes = codes[:, None]
    n = codes.shape[0]
    if n < 2:
        return Clustering(np.zeros(n, dtype=np.int64), 1, 0.0)

    distances = squareform(pdist(codes))
    np.fill_diagonal(distances, np.inf)
    threshold = 10.0 * float(np.median(distances.min(axis=1)))
    raw = fcluster(linkage(codes, method="single"), t=threshold, criterion="distance")

    mapping: Dict[int, int] = {}
    labels = np.array([mapping.setdefault(int(c), len(mapping)) for c in raw], dtype=np.int64)
    return Clustering(labels, len(mapping), threshold)


def cluster_macro_codes(model: NisModel, states: np.ndarray) -> Clustering:
    return cluster_codes(model.encode(states))


def sweep_frame(result: SweepResult) -> pd.DataFrame:
    rows: List[Dict[str, Any]] = []
    for r in sorted(result.reports, key=lambda r: r.q):
        row: Dict[str, Any] = {
            "q": r.q,
            "EI": r.ei,
            "Eff": r.eff,
            "stderr": r.stderr,
            "clamped": r.clamped,
        }
        for i in range(result.p):
            row[f"sigma{i}"] = float(r.sigma[i]) if i < r.sigma.size else np.nan
        rows.append(row)
    columns = ["q", "EI", "Eff", "stderr", "clamped"] + [f"sigma{i}" for i in range(result.p)]
    return pd.DataFrame(rows, columns=columns)


def verdict_lines(result: SweepResult) -> List[str]:
    lines = [f"emergent: {'true' if result.emergent else 'false'}", f"q_star: {result.q_star}"]
    if result.low_signal:
        lines.append("low_signal: true")
    return lines


def sweep_document(result: SweepResult, header: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "header": header,
        "p": result.p,
        "q_star": result.q_star,
        "emergent": result.emergent,
        "low_signal": result.low_signal,
        "warnings": list(result.warnings),
        "reports": [
            {
                "q": r.q,
                "EI": r.ei,
                "Eff": r.eff,
                "stderr": r.stderr,
                "clamped": r.clamped,
                "sigma": [float(s) for s in r.sigma],
                "L": r.L,
                "n_samples": r.n_samples,
                "seed": r.seed,
            }
            for r in sorted(result.reports, key=lambda r: r.q)
        ],
    }


def write_sweep(directory: Union[str, Path], result: SweepResult, header: Dict[str, Any]) -> Dict[str, Path]:
    """Write ``sweep.csv``, ``verdict.txt`` and ``sweep.json`` into `directory`."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": directory / "sweep.csv",
        "verdict": directory / "verdict.txt",
        "json": directory / "sweep.json",
    }
    write_csv(paths["csv"], sweep_frame(result), header)
    paths["verdict"].write_text("\n".join(verdict_lines(result)) + "\n", encoding="utf-8")
    paths["json"].write_text(
        json.dumps(sweep_document(result, header), indent=2, sort_keys=True, allow_nan=False) + "\n", encoding="utf-8"
    )
    return paths
