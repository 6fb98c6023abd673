"""Forward operations. Every op checks shape conformance explicitly and records a graph node
when any operand is tracked and recording is enabled."""

from __future__ import annotations

from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import NonFiniteError, ShapeMismatchError
from .tensor import ArrayLike, Edge, Node, Op, Tensor, Vjp, as_tensor, is_grad_enabled


def _make(op: Op, value: np.ndarray, parents: Sequence[Tuple[Tensor, Vjp]]) -> Tensor:
    if not np.all(np.isfinite(value)) and all(np.all(np.isfinite(p.data)) for p, _ in parents):
        raise NonFiniteError(op.value, int(np.count_nonzero(~np.isfinite(value))))

    tracked = [(p, vjp) for p, vjp in parents if p.tracked]
    if not tracked or not is_grad_enabled():
        return Tensor(value)

    return Tensor(value, node=Node(op, tuple(Edge(p, vjp) for p, vjp in tracked)))


def _same_shape(op: Op, a: Tensor, b: Tensor) -> None:
    if a.shape != b.shape:
        raise ShapeMismatchError(op.value, a.shape, b.shape)


def matmul(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim not in (1, 2) or b.ndim not in (1, 2) or a.shape[-1] != b.shape[0]:
        raise ShapeMismatchError(Op.MATMUL.value, a.shape, b.shape)

    av, bv = a.data, b.data
    value = av @ bv

    if av.ndim == 2 and bv.ndim == 2:
        return _make(Op.MATMUL, value, [(a, lambda g: g @ bv.T), (b, lambda g: av.T @ g)])
    if av.ndim == 2:
        return _make(Op.MATMUL, value, [(a, lambda g: np.outer(g, bv)), (b, lambda g: av.T @ g)])
    if bv.ndim == 2:
        return _make(Op.MATMUL, value, [(a, lambda g: bv @ g), (b, lambda g: np.outer(av, g))])
    return _make(Op.MATMUL, np.asarray(value), [(a, lambda g: g * bv), (b, lambda g: g * av)])


def add(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _same_shape(Op.ADD, a, b)
    return _make(Op.ADD, a.data + b.data, [(a, lambda g: g), (b, lambda g: g)])


def sub(a: ArrayLike, b: ArrayLike) -> Tensor:
    return add(a, neg(b))


def addrow(x: ArrayLike, row: ArrayLike) -> Tensor:
    """Add the vector `row` to every row of `x` (the one explicit row-wise op, used for biases)."""
    x, row = as_tensor(x), as_tensor(row)
    if row.ndim != 1 or x.ndim not in (1, 2) or x.shape[-1] != row.shape[0]:
        raise ShapeMismatchError(Op.ADDROW.value, x.shape, row.shape)

    if x.ndim == 1:
        return _make(Op.ADDROW, x.data + row.data, [(x, lambda g: g), (row, lambda g: g)])
    return _make(Op.ADDROW, x.data + row.data, [(x, lambda g: g), (row, lambda g: g.sum(axis=0))])


def mul(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _same_shape(Op.MUL, a, b)
    av, bv = a.data, b.data
    return _make(Op.MUL, av * bv, [(a, lambda g: g * bv), (b, lambda g: g * av)])


def scale(a: ArrayLike, factor: float) -> Tensor:
    a = as_tensor(a)
    factor = float(factor)
    return _make(Op.SCALE, a.data * factor, [(a, lambda g: g * factor)])


def neg(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    return _make(Op.NEG, -a.data, [(a, lambda g: -g)])


def relu(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    active = a.data > 0.0
    return _make(Op.RELU, np.where(active, a.data, 0.0), [(a, lambda g: g * active)])


def exp(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    with np.errstate(over="ignore"):
        value = np.exp(a.data)
    return _make(Op.EXP, value, [(a, lambda g: g * value)])


def tanh(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    value = np.tanh(a.data)
    return _make(Op.TANH, value, [(a, lambda g: g * (1.0 - value * value))])


def abs(a: ArrayLike) -> Tensor:  # noqa: A001
    a = as_tensor(a)
    sign = np.sign(a.data)
    return _make(Op.ABS, np.abs(a.data), [(a, lambda g: g * sign)])


def concat(tensors: Sequence[ArrayLike]) -> Tensor:
    """Concatenate along the last axis: vectors end to end, batches feature-wise."""
    parts = [as_tensor(t) for t in tensors]
    if not parts:
        raise ShapeMismatchError(Op.CONCAT.value, ())
    lead = parts[0].shape[:-1]
    if any(p.ndim == 0 or p.shape[:-1] != lead for p in parts):
        raise ShapeMismatchError(Op.CONCAT.value, *(p.shape for p in parts))

    bounds = np.cumsum([p.shape[-1] for p in parts])[:-1]
    value = np.concatenate([p.data for p in parts], axis=-1)

    def piece(i: int) -> Vjp:
        return lambda g: np.split(g, bounds, axis=-1)[i]

    return _make(Op.CONCAT, value, [(p, piece(i)) for i, p in enumerate(parts)])


def take(a: ArrayLike, start: int, stop: int) -> Tensor:
    """Slice `[start, stop)` of the last axis."""
    a = as_tensor(a)
    if a.ndim == 0 or not 0 <= start <= stop <= a.shape[-1]:
        raise ShapeMismatchError(Op.SLICE.value, a.shape, (start, stop))

    shape = a.shape

    def vjp(g: np.ndarray) -> np.ndarray:
        out = np.zeros(shape)
        out[..., start:stop] = g
        return out

    return _make(Op.SLICE, a.data[..., start:stop].copy(), [(a, vjp)])


def sum(a: ArrayLike, axis: Optional[int] = None) -> Tensor:  # noqa: A001
    """Sum of all entries (scalar) or, with `axis=-1`, of each row."""
    a = as_tensor(a)
    shape = a.shape
    if axis is None:
        return _make(Op.SUM, np.asarray(a.data.sum()), [(a, lambda g: np.full(shape, float(g)))])
    if axis != -1 or a.ndim == 0:
        raise ShapeMismatchError(Op.SUM.value, shape, (axis,))
    return _make(Op.SUM, a.data.sum(axis=-1), [(a, lambda g: np.repeat(g[..., None], shape[-1], axis=-1))])


def mean(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    return scale(sum(a), 1.0 / max(a.size, 1))


def square(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    return mul(a, a)
