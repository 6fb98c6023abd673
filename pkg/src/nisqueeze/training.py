"""Mini-batch training of the squeezer on the one-step micro prediction objective, plus the parameter-matched
baseline MLP predictor."""

from __future__ import annotations

import logging
import math
from typing import Callable, Optional, Tuple

import numpy as np
from tapegrad import NonFiniteError, Tensor, backward, no_grad, ops

from .checkpoint import Checkpoint, CheckpointKind, TrainingHistory
from .config import OptimizerKind, TrainConfig, artifact_header
from .dataset import TransitionPairs
from .errors import ConfigurationError, NumericRangeError, TrainingDivergedError
from .model import BaselineModel, NisModel
from .networks import Mlp, Module
from .optim import Adam, Optimizer, Sgd, clip_grad_norm
from .rng import RandomStreams

_logger = logging.getLogger(__name__)

BUDGET_TOLERANCE = 0.02


def baseline_hidden_for_budget(p: int, param_budget: int) -> int:
    """Hidden width h whose baseline parameter count h² + (2p + 2)h + p is closest to `param_budget`."""
    b = 2 * p + 2
    discriminant = b * b + 4 * (param_budget - p)
    if discriminant < 0:
        raise ConfigurationError(f"parameter budget {param_budget} is too small for p={p}")
    root = (-b + math.sqrt(discriminant)) / 2.0
    candidates = {max(1, math.floor(root)), max(1, math.ceil(root))}
    hidden = min(candidates, key=lambda h: abs(Mlp.parameter_count(p, p, h) - param_budget))
    count = Mlp.parameter_count(p, p, hidden)
    if abs(count - param_budget) > BUDGET_TOLERANCE * param_budget:
        raise ConfigurationError(
            f"no baseline width matches {param_budget} parameters within {BUDGET_TOLERANCE:.0%} "
            f"(closest: hidden={hidden} with {count})"
        )
    return hidden


def build_model(p: int, q: int, cfg: TrainConfig) -> NisModel:
    rng = RandomStreams(cfg.seed).stream("trainer.init", q)
    return NisModel(p, q, rng=rng, hidden=cfg.hidden, blocks=cfg.blocks, clamp=cfg.clamp)


def _distance(diff: Tensor, norm: int) -> Tensor:
    """Mean over the batch of the per-sample L1 or squared L2 distance."""
    per_entry = ops.square(diff) if norm == 2 else ops.abs(diff)
    return ops.scale(ops.sum(per_entry), 1.0 / diff.shape[0])


# (x, x_next, z) -> (loss, per-sample log|det J_ψ| or None)
LossFn = Callable[[np.ndarray, np.ndarray, Optional[np.ndarray]], Tuple[Tensor, Optional[Tensor]]]


def _nis_loss(model: NisModel, norm: int) -> LossFn:
    def loss(x: np.ndarray, x_next: np.ndarray, z: Optional[np.ndarray]) -> Tuple[Tensor, Optional[Tensor]]:
        predicted, log_det = model.predict_tensor(Tensor(x), z)
        return _distance(ops.sub(predicted, Tensor(x_next)), norm), log_det

    return loss


def _baseline_loss(model: BaselineModel, norm: int) -> LossFn:
    def loss(x: np.ndarray, x_next: np.ndarray, z: Optional[np.ndarray]) -> Tuple[Tensor, Optional[Tensor]]:
        return _distance(ops.sub(model.predict_tensor(Tensor(x)), Tensor(x_next)), norm), None

    return loss


def _make_optimizer(module: Module, cfg: TrainConfig) -> Optimizer:
    if cfg.optimizer == OptimizerKind.SGD:
        return Sgd(module.parameters(), cfg.learning_rate, momentum=0.9)
    return Adam(module.parameters(), cfg.learning_rate)


def _evaluate(loss_fn: LossFn, data: TransitionPairs, z: Optional[np.ndarray], batch_size: int) -> Tuple[float, float]:
    total, log_det_total = 0.0, 0.0
    with no_grad():
        for start in range(0, len(data), batch_size):
            stop = min(start + batch_size, len(data))
            loss, log_det = loss_fn(data.x[start:stop], data.x_next[start:stop], None if z is None else z[start:stop])
            total += loss.item() * (stop - start)
            if log_det is not None:
                log_det_total += float(np.sum(log_det.data))
    return total / len(data), log_det_total / len(data)


def _fit(
    module: Module,
    loss_fn: LossFn,
    data: TransitionPairs,
    cfg: TrainConfig,
    *,
    noise_dim: int,
    tracks_log_det: bool,
    label: str,
) -> Tuple[TrainingHistory, TransitionPairs]:
    streams = RandomStreams(cfg.seed)
    train_set, val_set = data.split(cfg.validation_fraction, streams.stream("trainer.split"))
    shuffle_rng = streams.stream("trainer.shuffle")
    noise_rng = streams.stream("trainer.noise")

    def draw(rng: np.random.Generator, n: int) -> Optional[np.ndarray]:
        return rng.standard_normal((n, noise_dim)) if noise_dim > 0 else None

    val_z = draw(streams.stream("trainer.validation_noise"), len(val_set))
    params = module.parameters()
    optimizer = _make_optimizer(module, cfg)
    history = TrainingHistory()

    def finite_or_raise(value: float, epoch: int, step: int) -> float:
        if not math.isfinite(value):
            raise TrainingDivergedError(epoch, step, cfg.learning_rate, cfg.clamp)
        return value

    try:
        train_loss, train_log_det = _evaluate(
            loss_fn, train_set, draw(streams.stream("trainer.initial_noise"), len(train_set)), cfg.batch_size
        )
        val_loss, _ = _evaluate(loss_fn, val_set, val_z, cfg.batch_size)
    except NonFiniteError as e:
        raise NumericRangeError(f"untrained {label} overflowed on the dataset: {e}") from e
    history.record(0, train_loss, finite_or_raise(val_loss, 0, 0), train_log_det if tracks_log_det else None)
    best_state = module.state_dict()
    _logger.info("%s epoch 0: train %.6g, validation %.6g", label, train_loss, val_loss)

    step = 0
    for epoch in range(1, cfg.epochs + 1):
        order = shuffle_rng.permutation(len(train_set))
        loss_sum, log_det_sum = 0.0, 0.0
        for start in range(0, len(order), cfg.batch_size):
            index = order[start : start + cfg.batch_size]
            step += 1
            try:
                loss, log_det = loss_fn(train_set.x[index], train_set.x_next[index], draw(noise_rng, len(index)))
            except NonFiniteError as e:
                raise TrainingDivergedError(epoch, step, cfg.learning_rate, cfg.clamp) from e
            loss_sum += finite_or_raise(loss.item(), epoch, step) * len(index)
            if log_det is not None:
                log_det_sum += float(np.sum(log_det.data))

            grads, _ = clip_grad_norm(backward(loss, params), cfg.grad_clip)
            optimizer.step(grads)

        try:
            val_loss, _ = _evaluate(loss_fn, val_set, val_z, cfg.batch_size)
        except NonFiniteError as e:
            raise TrainingDivergedError(epoch, step, cfg.learning_rate, cfg.clamp) from e
        finite_or_raise(val_loss, epoch, step)
        if val_loss < history.best_val_loss[-1]:
            best_state = module.state_dict()

        mean_log_det = log_det_sum / len(train_set) if tracks_log_det else None
        history.record(epoch, loss_sum / len(train_set), val_loss, mean_log_det)
        if epoch % cfg.log_every == 0 or epoch == cfg.epochs:
            _logger.info(
                "%s epoch %d: train %.6g, validation %.6g, best %.6g%s",
                label,
                epoch,
                history.train_loss[-1],
                val_loss,
                history.best_val_loss[-1],
                f", mean log|det J| {mean_log_det:.4g}" if mean_log_det is not None else "",
            )

    module.load_state_dict(best_state)
    return history, val_set


def macro_residual_variance(model: NisModel, data: TransitionPairs) -> np.ndarray:
    """Per-dimension mean squared error of the macro one-step prediction against encode(x_{t+1})."""
    residual = model.macro_step(model.encode(data.x)) - model.encode(data.x_next)
    return np.mean(residual * residual, axis=0)


def train(model: NisModel, dataset: TransitionPairs, cfg: TrainConfig) -> Checkpoint:
    cfg.validate()
    if dataset.p != model.p:
        raise ConfigurationError(f"model expects p={model.p}, dataset has p={dataset.p}")

    label = f"nis(q={model.q})"
    history, val_set = _fit(
        model,
        _nis_loss(model, cfg.norm),
        dataset,
        cfg,
        noise_dim=model.p - model.q,
        tracks_log_det=True,
        label=label,
    )
    sigma2 = macro_residual_variance(model, val_set)
    best = int(np.argmin(history.val_loss))
    _logger.info("%s done: best validation %.6g at epoch %d, sigma^2 %s", label, history.val_loss[best], best, sigma2)

    return Checkpoint(
        kind=CheckpointKind.NIS,
        p=model.p,
        q=model.q,
        hidden=model.hidden,
        blocks=model.blocks,
        clamp=model.clamp,
        parameters=model.state_dict(),
        train_config=cfg,
        train_loss=history.train_loss[best],
        val_loss=history.val_loss[best],
        sigma2=sigma2,
        history=history,
        header=artifact_header(cfg.seed, cfg, dataset.metadata),
    )


def baseline_train(dataset: TransitionPairs, cfg: TrainConfig, param_budget: int) -> Checkpoint:
    """Train a direct x_t → x_{t+1} MLP whose parameter count matches `param_budget` within 2%."""
    cfg.validate()
    hidden = baseline_hidden_for_budget(dataset.p, param_budget)
    model = BaselineModel(dataset.p, hidden, rng=RandomStreams(cfg.seed).stream("baseline.init"))
    _logger.info(
        "baseline hidden width %d gives %d parameters (budget %d)", hidden, model.num_parameters(), param_budget
    )

    history, _ = _fit(
        model,
        _baseline_loss(model, cfg.norm),
        dataset,
        cfg,
        noise_dim=0,
        tracks_log_det=False,
        label="baseline",
    )
    best = int(np.argmin(history.val_loss))
    return Checkpoint(
        kind=CheckpointKind.BASELINE,
        p=dataset.p,
        q=dataset.p,
        hidden=hidden,
        blocks=0,
        clamp=cfg.clamp,
        parameters=model.state_dict(),
        train_config=cfg,
        train_loss=history.train_loss[best],
        val_loss=history.val_loss[best],
        sigma2=None,
        history=history,
        header=artifact_header(cfg.seed, cfg, dataset.metadata, "baseline"),
    )
