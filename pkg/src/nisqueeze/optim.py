from __future__ import annotations

import math
from typing import Dict, Mapping, Sequence, Tuple

import numpy as np
from tapegrad import Parameter, Tensor

Gradients = Mapping[str, Tensor]


def clip_grad_norm(grads: Gradients, max_norm: float) -> Tuple[Dict[str, Tensor], float]:
    """Rescale all gradients together so their global L2 norm is at most `max_norm`.

    Returns the (possibly) rescaled gradients and the norm before clipping.
    """
    total = math.sqrt(sum(float(np.sum(g.data * g.data)) for g in grads.values()))
    if total <= max_norm or total == 0.0:
        return dict(grads), total
    factor = max_norm / total
    return {name: Tensor(g.data * factor) for name, g in grads.items()}, total


class Optimizer:
    def __init__(self, params: Sequence[Parameter], learning_rate: float) -> None:
        self.params = list(params)
        self.learning_rate = learning_rate
        self.steps = 0

    def step(self, grads: Gradients) -> None:
        self.steps += 1
        for param in self.params:
            grad = grads.get(param.name)
            if grad is not None:
                self._update(param, grad.data)

    def _update(self, param: Parameter, grad: np.ndarray) -> None:
        raise NotImplementedError


class Sgd(Optimizer):
    def __init__(self, params: Sequence[Parameter], learning_rate: float, momentum: float = 0.0) -> None:
        super().__init__(params, learning_rate)
        self.momentum = momentum
        self._velocity: Dict[str, np.ndarray] = {p.name: np.zeros(p.shape) for p in self.params}

    def _update(self, param: Parameter, grad: np.ndarray) -> None:
        velocity = self._velocity[param.name]
        velocity *= self.momentum
        velocity += grad
        param.data -= self.learning_rate * velocity


class Adam(Optimizer):
    """Adaptive moment estimation with bias correction."""

    def __init__(
        self,
        params: Sequence[Parameter],
        learning_rate: float = 1e-3,
        betas: Tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
    ) -> None:
        super().__init__(params, learning_rate)
        self.betas = betas
        self.eps = eps
        self._m: Dict[str, np.ndarray] = {p.name: np.zeros(p.shape) for p in self.params}
        self._v: Dict[str, np.ndarray] = {p.name: np.zeros(p.shape) for p in self.params}

    def _update(self, param: Parameter, grad: np.ndarray) -> None:
        beta1, beta2 = self.betas
        m, v = self._m[param.name], self._v[param.name]
        m *= beta1
        m += (1.0 - beta1) * grad
        v *= beta2
        v += (1.0 - beta2) * grad * grad
        m_hat = m / (1.0 - beta1**self.steps)
        v_hat = v / (1.0 - beta2**self.steps)
        param.data -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)
