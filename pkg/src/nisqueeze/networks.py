"""Parametric building blocks: the feed-forward MLP, the affine coupling block and the bijector ψ.

All networks operate on single vectors ``(n,)`` or row batches ``(N, n)`` of `tapegrad` tensors.
"""

from __future__ import annotations

import math
from typing import Dict, Iterator, List, Mapping, Optional, Tuple, Union

import numpy as np
from tapegrad import NonFiniteError, Parameter, Tensor, no_grad, ops

from .errors import ConfigurationError, DimensionMismatchError, NumericRangeError

DEFAULT_HIDDEN = 64
DEFAULT_BLOCKS = 3
DEFAULT_CLAMP = 5.0


class Module:
    def __init__(self, name: str) -> None:
        self.name = name
        self._parameters: Dict[str, Parameter] = {}
        self._children: List[Module] = []

    def add_parameter(self, local_name: str, data: np.ndarray) -> Parameter:
        param = Parameter(f"{self.name}.{local_name}", data)
        self._parameters[local_name] = param
        return param

    def add_child(self, module: "Module") -> "Module":
        self._children.append(module)
        return module

    def named_parameters(self) -> Iterator[Tuple[str, Parameter]]:
        for param in self._parameters.values():
            yield param.name, param
        for child in self._children:
            yield from child.named_parameters()

    def parameters(self) -> List[Parameter]:
        return [p for _, p in self.named_parameters()]

    def num_parameters(self) -> int:
        return sum(p.size for p in self.parameters())

    def state_dict(self) -> Dict[str, np.ndarray]:
        return {name: p.numpy() for name, p in self.named_parameters()}

    def load_state_dict(self, state: Mapping[str, np.ndarray]) -> None:
        own = dict(self.named_parameters())
        missing = sorted(set(own) - set(state))
        unexpected = sorted(set(state) - set(own))
        if missing or unexpected:
            raise ConfigurationError(f"parameter names do not match: missing {missing}, unexpected {unexpected}")
        for name, param in own.items():
            values = np.asarray(state[name], dtype=np.float64)
            if values.shape != param.shape:
                raise ConfigurationError(f"parameter {name}: expected shape {param.shape}, got {values.shape}")
            param.assign(values)


def _uniform(rng: np.random.Generator, fan_in: int, shape: Tuple[int, ...]) -> np.ndarray:
    bound = 1.0 / math.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


class Mlp(Module):
    """Three weight layers, ReLU on the hidden layers, identity on the output."""

    def __init__(
        self,
        in_dim: int,
        out_dim: int,
        *,
        name: str,
        rng: np.random.Generator,
        hidden: int = DEFAULT_HIDDEN,
        zero_last: bool = False,
    ) -> None:
        super().__init__(name)
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.hidden = hidden

        widths = [in_dim, hidden, hidden, out_dim]
        self.layers: List[Tuple[Parameter, Parameter]] = []
        for i, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
            last = i == len(widths) - 2
            if last and zero_last:
                w, b = np.zeros((fan_in, fan_out)), np.zeros(fan_out)
            else:
                w, b = _uniform(rng, fan_in, (fan_in, fan_out)), _uniform(rng, fan_in, (fan_out,))
            self.layers.append((self.add_parameter(f"w{i}", w), self.add_parameter(f"b{i}", b)))

    def __call__(self, x: Tensor) -> Tensor:
        h = x
        for i, (w, b) in enumerate(self.layers):
            h = ops.addrow(ops.matmul(h, w), b)
            if i < len(self.layers) - 1:
                h = ops.relu(h)
        return h

    @staticmethod
    def parameter_count(in_dim: int, out_dim: int, hidden: int) -> int:
        return in_dim * hidden + hidden + hidden * hidden + hidden + hidden * out_dim + out_dim


def soft_clamp(s: Tensor, bound: float = DEFAULT_CLAMP) -> Tensor:
    """Smoothly squash into (-bound, bound) before exponentiation."""
    return ops.scale(ops.tanh(ops.scale(s, 1.0 / bound)), bound)


class CouplingBlock(Module):
    """Affine coupling block with both half-steps.

    With ``(u, v)`` the conditioning and transformed halves::

        v' = v * exp(s1(u)) + t1(u)
        u' = u * exp(s2(v')) + t2(v')

    ``u`` is the first ``split`` coordinates, or the remaining ones when ``flip`` is set.
    log|det J| is the sum of the (clamped) s outputs.
    """

    def __init__(
        self,
        dim: int,
        split: int,
        *,
        flip: bool,
        name: str,
        rng: np.random.Generator,
        hidden: int = DEFAULT_HIDDEN,
        clamp: float = DEFAULT_CLAMP,
    ) -> None:
        if not 1 <= split < dim:
            raise ConfigurationError(f"coupling split must satisfy 1 <= k < {dim}, got {split}")
        super().__init__(name)
        self.dim = dim
        self.split = split
        self.flip = flip
        self.clamp = clamp

        u_dim, v_dim = (dim - split, split) if flip else (split, dim - split)
        self.u_dim, self.v_dim = u_dim, v_dim

        def net(local: str, n_in: int, n_out: int) -> Mlp:
            mlp = Mlp(n_in, n_out, name=f"{name}.{local}", rng=rng, hidden=hidden, zero_last=True)
            self.add_child(mlp)
            return mlp

        # four independent nets per block
        self.s1 = net("s1", u_dim, v_dim)
        self.t1 = net("t1", u_dim, v_dim)
        self.s2 = net("s2", v_dim, u_dim)
        self.t2 = net("t2", v_dim, u_dim)

    def _halves(self, x: Tensor) -> Tuple[Tensor, Tensor]:
        head, tail = ops.take(x, 0, self.split), ops.take(x, self.split, self.dim)
        return (tail, head) if self.flip else (head, tail)

    def _join(self, u: Tensor, v: Tensor) -> Tensor:
        return ops.concat([v, u] if self.flip else [u, v])

    def forward(self, x: Tensor) -> Tuple[Tensor, Tensor]:
        u, v = self._halves(x)
        s1 = soft_clamp(self.s1(u), self.clamp)
        v = ops.add(ops.mul(v, ops.exp(s1)), self.t1(u))
        s2 = soft_clamp(self.s2(v), self.clamp)
        u = ops.add(ops.mul(u, ops.exp(s2)), self.t2(v))
        return self._join(u, v), ops.add(ops.sum(s1, axis=-1), ops.sum(s2, axis=-1))

    def inverse(self, y: Tensor) -> Tuple[Tensor, Tensor]:
        u, v = self._halves(y)
        s2 = soft_clamp(self.s2(v), self.clamp)
        u = ops.mul(ops.sub(u, self.t2(v)), ops.exp(ops.neg(s2)))
        s1 = soft_clamp(self.s1(u), self.clamp)
        v = ops.mul(ops.sub(v, self.t1(u)), ops.exp(ops.neg(s1)))
        return self._join(u, v), ops.neg(ops.add(ops.sum(s1, axis=-1), ops.sum(s2, axis=-1)))


class Bijector(Module):
    """ψ: a stack of coupling blocks alternating which half conditions the other."""

    def __init__(
        self,
        dim: int,
        *,
        rng: np.random.Generator,
        blocks: int = DEFAULT_BLOCKS,
        hidden: int = DEFAULT_HIDDEN,
        clamp: float = DEFAULT_CLAMP,
        name: str = "bijector",
    ) -> None:
        if dim < 2:
            raise ConfigurationError(f"the bijector needs dimension >= 2, got {dim}")
        if blocks < 1:
            raise ConfigurationError(f"the bijector needs at least one coupling block, got {blocks}")
        super().__init__(name)
        self.dim = dim
        self.clamp = clamp
        split = math.ceil(dim / 2)
        self.blocks: List[CouplingBlock] = []
        for i in range(blocks):
            block = CouplingBlock(
                dim, split, flip=i % 2 == 1, name=f"{name}.{i}", rng=rng, hidden=hidden, clamp=clamp
            )
            self.blocks.append(block)
            self.add_child(block)

    def forward(self, x: Tensor) -> Tuple[Tensor, Tensor]:
        log_det: Optional[Tensor] = None
        for block in self.blocks:
            x, block_log_det = block.forward(x)
            log_det = block_log_det if log_det is None else ops.add(log_det, block_log_det)
        assert log_det is not None
        return x, log_det

    def inverse(self, y: Tensor) -> Tuple[Tensor, Tensor]:
        log_det: Optional[Tensor] = None
        for block in reversed(self.blocks):
            y, block_log_det = block.inverse(y)
            log_det = block_log_det if log_det is None else ops.add(log_det, block_log_det)
        assert log_det is not None
        return y, log_det


def as_rows(x: Union[np.ndarray, Tensor, List[float]], dim: int, what: str) -> np.ndarray:
    """Validate that the last axis of `x` has length `dim`; accepts one vector or a row batch."""
    values = x.data if isinstance(x, Tensor) else np.asarray(x, dtype=np.float64)
    if values.ndim not in (1, 2) or values.shape[-1] != dim:
        raise DimensionMismatchError(what, dim, values.shape)
    return values


def mlp_forward(net: Mlp, x: Union[np.ndarray, List[float]]) -> np.ndarray:
    values = as_rows(x, net.in_dim, "mlp input")
    with no_grad():
        return net(Tensor(values)).data


def bijector_forward(bijector: Bijector, x: Union[np.ndarray, List[float]]) -> Tuple[np.ndarray, np.ndarray]:
    values = as_rows(x, bijector.dim, "bijector input")
    try:
        with no_grad():
            y, log_det = bijector.forward(Tensor(values))
    except NonFiniteError as e:
        raise NumericRangeError(f"bijector forward overflowed: {e}") from e
    return y.data, log_det.data


def bijector_inverse(bijector: Bijector, y: Union[np.ndarray, List[float]]) -> np.ndarray:
    values = as_rows(y, bijector.dim, "bijector input")
    try:
        with no_grad():
            x, _ = bijector.inverse(Tensor(values))
    except NonFiniteError as e:
        raise NumericRangeError(f"bijector inverse overflowed, training is likely unstable: {e}") from e
    return x.data
