from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import ShapeMismatchError
from .graph import propagate, topological_order
from .tensor import ArrayLike, Tensor

TensorFn = Callable[[Tensor], Tensor]


def jacobian(f: TensorFn, x: ArrayLike) -> Tensor:
    """Jacobian (m x n) of `f: R^n -> R^m` at the vector `x`, one backward pass per output row."""
    point = Tensor(x.data if isinstance(x, Tensor) else x, requires_grad=True)
    if point.ndim != 1:
        raise ShapeMismatchError("jacobian", point.shape)

    y = f(point)
    if y.ndim != 1:
        raise ShapeMismatchError("jacobian", point.shape, y.shape)

    m, n = y.shape[0], point.shape[0]
    rows = np.zeros((m, n))
    order = topological_order(y)
    for i in range(m):
        seed = np.zeros(m)
        seed[i] = 1.0
        grad = propagate(y, seed, order).get(point.uid)
        if grad is not None:
            rows[i] = grad
    return Tensor(rows)


def batch_jacobian(f: TensorFn, xs: ArrayLike) -> np.ndarray:
    """Per-row Jacobians (N x m x n) of a row-wise map evaluated on the batch `xs` (N x n).

    `f` must treat rows independently (no op mixing samples), which holds for every
    network built from matmul/addrow/elementwise ops.
    """
    points = Tensor(xs.data if isinstance(xs, Tensor) else xs, requires_grad=True)
    if points.ndim != 2:
        raise ShapeMismatchError("batch_jacobian", points.shape)

    y = f(points)
    if y.ndim != 2 or y.shape[0] != points.shape[0]:
        raise ShapeMismatchError("batch_jacobian", points.shape, y.shape)

    count, m = y.shape
    result = np.zeros((count, m, points.shape[1]))
    order = topological_order(y)
    for i in range(m):
        seed = np.zeros((count, m))
        seed[:, i] = 1.0
        grad = propagate(y, seed, order).get(points.uid)
        if grad is not None:
            result[:, i, :] = grad
    return result


def numeric_gradient(f: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central finite-difference gradient of a scalar function."""
    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for index in np.ndindex(*x.shape):
        original = x[index]
        x[index] = original + h
        upper = f(x)
        x[index] = original - h
        lower = f(x)
        x[index] = original
        grad[index] = (upper - lower) / (2.0 * h)
    return grad


def numeric_jacobian(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central finite-difference Jacobian (m x n) of a vector function at the vector `x`."""
    x = np.array(x, dtype=np.float64)
    columns = []
    for j in range(x.shape[0]):
        step = np.zeros_like(x)
        step[j] = h
        columns.append((np.asarray(f(x + step)) - np.asarray(f(x - step))) / (2.0 * h))
    return np.stack(columns, axis=1)
