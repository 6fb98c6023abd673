"""The squeezer: encoder φ = χ_q ∘ ψ, Euler macro dynamics and the stochastic decoder ψ⁻¹(y ⊕ z)."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, TypeVar

import numpy as np
from tapegrad import NonFiniteError, Tensor, no_grad, ops

from .errors import ConfigurationError, DimensionMismatchError, NumericRangeError
from .networks import DEFAULT_BLOCKS, DEFAULT_CLAMP, DEFAULT_HIDDEN, Bijector, Mlp, Module, as_rows

_logger = logging.getLogger(__name__)

ROLLOUT_LIMIT = 1e12

_T = TypeVar("_T")


def _guard(fn: Callable[[], _T]) -> _T:
    try:
        return fn()
    except NonFiniteError as e:
        raise NumericRangeError(f"model evaluation overflowed: {e}") from e


@dataclass(frozen=True)
class Rollout:
    macro: np.ndarray
    micro: np.ndarray


class NisModel(Module):
    """Bijector ψ on R^p, projection onto the first `q` latent coordinates and a drift net f: R^q → R^q."""

    def __init__(
        self,
        p: int,
        q: int,
        *,
        rng: np.random.Generator,
        hidden: int = DEFAULT_HIDDEN,
        blocks: int = DEFAULT_BLOCKS,
        clamp: float = DEFAULT_CLAMP,
    ) -> None:
        if p < 2:
            raise ConfigurationError(f"micro dimension p must be >= 2, got {p}")
        if not 1 <= q <= p:
            raise ConfigurationError(f"macro dimension q must satisfy 1 <= q <= {p}, got {q}")
        super().__init__("nis")
        self.p = p
        self.q = q
        self.hidden = hidden
        self.blocks = blocks
        self.clamp = clamp

        self.bijector = Bijector(p, rng=rng, blocks=blocks, hidden=hidden, clamp=clamp, name="bijector")
        self.add_child(self.bijector)
        self.dynamics = Mlp(q, q, name="dynamics", rng=rng, hidden=hidden)
        self.add_child(self.dynamics)

    def __repr__(self) -> str:
        return f"NisModel(p={self.p}, q={self.q}, parameters={self.num_parameters()})"

    # graph-building versions, used by training and Jacobian extraction

    def encode_tensor(self, x: Tensor) -> Tuple[Tensor, Tensor]:
        latent, log_det = self.bijector.forward(x)
        return ops.take(latent, 0, self.q), log_det

    def macro_step_tensor(self, y: Tensor) -> Tensor:
        return ops.add(y, self.dynamics(y))

    def decode_tensor(self, y: Tensor, z: Optional[np.ndarray]) -> Tensor:
        if self.q < self.p:
            assert z is not None
            y = ops.concat([y, Tensor(z)])
        x, _ = self.bijector.inverse(y)
        return x

    def predict_tensor(self, x: Tensor, z: Optional[np.ndarray]) -> Tuple[Tensor, Tensor]:
        y, log_det = self.encode_tensor(x)
        return self.decode_tensor(self.macro_step_tensor(y), z), log_det

    # array API

    def _noise(
        self, batch_shape: Tuple[int, ...], rng: Optional[np.random.Generator], deterministic: bool
    ) -> Optional[np.ndarray]:
        if self.q == self.p:
            return None
        shape = (*batch_shape, self.p - self.q)
        if deterministic:
            return np.zeros(shape)
        if rng is None:
            raise ConfigurationError("stochastic decoding needs a random generator; pass rng or deterministic=True")
        return rng.standard_normal(shape)

    def encode(self, x: np.ndarray) -> np.ndarray:
        values = as_rows(x, self.p, "micro state")
        with no_grad():
            y, _ = _guard(lambda: self.encode_tensor(Tensor(values)))
        return y.data

    def dropped(self, x: np.ndarray) -> np.ndarray:
        """The last p - q latent coordinates, which together with `encode(x)` reconstruct `x` exactly."""
        values = as_rows(x, self.p, "micro state")
        with no_grad():
            latent, _ = _guard(lambda: self.bijector.forward(Tensor(values)))
        return latent.data[..., self.q :]

    def macro_step(self, y: np.ndarray) -> np.ndarray:
        values = as_rows(y, self.q, "macro state")
        with no_grad():
            return _guard(lambda: self.macro_step_tensor(Tensor(values))).data

    def decode(
        self,
        y: np.ndarray,
        z: Optional[np.ndarray] = None,
        *,
        rng: Optional[np.random.Generator] = None,
        deterministic: bool = False,
    ) -> np.ndarray:
        values = as_rows(y, self.q, "macro state")
        if z is None:
            z = self._noise(values.shape[:-1], rng, deterministic)
        elif self.q < self.p:
            z = np.asarray(z, dtype=np.float64)
            if z.shape != (*values.shape[:-1], self.p - self.q):
                raise DimensionMismatchError("noise z", self.p - self.q, z.shape)
        with no_grad():
            return _guard(lambda: self.decode_tensor(Tensor(values), z)).data

    def predict_micro(
        self, x: np.ndarray, *, rng: Optional[np.random.Generator] = None, deterministic: bool = False
    ) -> np.ndarray:
        return self.decode(self.macro_step(self.encode(x)), rng=rng, deterministic=deterministic)

    def rollout(
        self,
        x0: np.ndarray,
        steps: int,
        *,
        rng: Optional[np.random.Generator] = None,
        deterministic: bool = False,
    ) -> Rollout:
        """Iterate the macro dynamics from `encode(x0)` and decode every step.

        Decoded micro states are never re-encoded. ``micro[0]`` is `x0` itself.
        """
        if steps < 1:
            raise ConfigurationError(f"rollout needs steps >= 1, got {steps}")
        x0 = as_rows(x0, self.p, "initial micro state")
        if x0.ndim != 1:
            raise DimensionMismatchError("initial micro state", self.p, x0.shape)

        macro = np.zeros((steps + 1, self.q))
        micro = np.zeros((steps + 1, self.p))
        macro[0] = self.encode(x0)
        micro[0] = x0
        for t in range(1, steps + 1):
            macro[t] = self.macro_step(macro[t - 1])
            if not np.all(np.abs(macro[t]) <= ROLLOUT_LIMIT):
                raise NumericRangeError(f"macro trajectory left the range ±{ROLLOUT_LIMIT:g} at step {t}")
            micro[t] = self.decode(macro[t], rng=rng, deterministic=deterministic)
        _logger.debug("rolled out %d steps from %s", steps, x0)
        return Rollout(macro, micro)


class BaselineModel(Module):
    """Plain MLP predicting x_{t+1} from x_t directly."""

    def __init__(self, p: int, hidden: int, *, rng: np.random.Generator) -> None:
        super().__init__("baseline")
        self.p = p
        self.hidden = hidden
        self.net = Mlp(p, p, name="baseline", rng=rng, hidden=hidden)
        self.add_child(self.net)

    def __repr__(self) -> str:
        return f"BaselineModel(p={self.p}, hidden={self.hidden}, parameters={self.num_parameters()})"

    def predict_tensor(self, x: Tensor) -> Tensor:
        return self.net(x)

    def predict_micro(self, x: np.ndarray) -> np.ndarray:
        values = as_rows(x, self.p, "micro state")
        with no_grad():
            return _guard(lambda: self.net(Tensor(values))).data
