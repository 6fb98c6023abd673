import os

import numpy as np
import pytest
from nisqueeze.config import TrainConfig
from nisqueeze.datagen import SpringParams, gen_spring
from nisqueeze.dataset import DatasetMetadata, TransitionPairs
from nisqueeze.networks import Module

requires_slow = pytest.mark.skipif(os.environ.get("NISQUEEZE_SLOW") != "1", reason="set NISQUEEZE_SLOW=1 to run")


def make_pairs(x: np.ndarray, x_next: np.ndarray, generator: str = "test") -> TransitionPairs:
    return TransitionPairs(x, x_next, DatasetMetadata(p=x.shape[1], generator=generator, n_pairs=len(x)))


def randomize(module: Module, rng: np.random.Generator, scale: float = 0.5) -> None:
    for param in module.parameters():
        param.assign(rng.normal(scale=scale, size=param.shape))


def zero(module: Module) -> None:
    for param in module.parameters():
        param.assign(np.zeros(param.shape))


@pytest.fixture()
def tiny_config() -> TrainConfig:
    return TrainConfig(epochs=3, batch_size=16, hidden=8, blocks=2, learning_rate=1e-2)


@pytest.fixture()
def linear_pairs() -> TransitionPairs:
    """Two-dimensional rotation with a little noise; 96 pairs."""
    rng = np.random.default_rng(5)
    x = rng.uniform(-1.0, 1.0, size=(96, 2))
    c, s = np.cos(0.3), np.sin(0.3)
    x_next = x @ np.array([[c, -s], [s, c]]) + 0.01 * rng.standard_normal((96, 2))
    return make_pairs(x, x_next)


@pytest.fixture()
def pairs_4d() -> TransitionPairs:
    return gen_spring(SpringParams(batches=1, per_batch=96, seed=3))
