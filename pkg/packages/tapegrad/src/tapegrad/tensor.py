from __future__ import annotations

import contextvars
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Iterator, Optional, Tuple, Union

import numpy as np

from .errors import ShapeMismatchError
from .ids import TENSOR_IDS

ArrayLike = Union["Tensor", np.ndarray, float, int, Any]
Vjp = Callable[[np.ndarray], np.ndarray]

_GRAD_ENABLED: contextvars.ContextVar[bool] = contextvars.ContextVar("tapegrad_grad_enabled", default=True)


class Op(str, Enum):
    LEAF = "leaf"
    MATMUL = "matmul"
    ADD = "add"
    ADDROW = "addrow"
    MUL = "mul"
    SCALE = "scale"
    NEG = "neg"
    RELU = "relu"
    EXP = "exp"
    TANH = "tanh"
    ABS = "abs"
    CONCAT = "concat"
    SLICE = "slice"
    SUM = "sum"


@dataclass(frozen=True)
class Edge:
    parent: Tensor
    vjp: Vjp


@dataclass(frozen=True)
class Node:
    op: Op
    edges: Tuple[Edge, ...]


def is_grad_enabled() -> bool:
    return _GRAD_ENABLED.get()


@contextmanager
def no_grad() -> Iterator[None]:
    """Evaluate without recording graph nodes (context-local, safe across threads)."""
    token = _GRAD_ENABLED.set(False)
    try:
        yield
    finally:
        _GRAD_ENABLED.reset(token)


class Tensor:
    __slots__ = ("data", "node", "requires_grad", "uid")

    def __init__(self, data: ArrayLike, *, requires_grad: bool = False, node: Optional[Node] = None) -> None:
        if isinstance(data, Tensor):
            data = data.data
        self.data: np.ndarray = np.array(data, dtype=np.float64, copy=True) if node is None else data
        self.requires_grad = requires_grad
        self.node = node
        self.uid = TENSOR_IDS.get_next_id()

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        return int(self.data.ndim)

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def tracked(self) -> bool:
        return self.requires_grad or self.node is not None

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def item(self) -> float:
        if self.size != 1:
            raise ShapeMismatchError("item", self.shape, ())
        return float(self.data.reshape(()))

    def __repr__(self) -> str:
        op = self.node.op.value if self.node is not None else Op.LEAF.value
        return f"Tensor(shape={self.shape}, op={op})"

    def __add__(self, other: Tensor) -> Tensor:
        from . import ops

        return ops.add(self, other)

    def __sub__(self, other: Tensor) -> Tensor:
        from . import ops

        return ops.sub(self, other)

    def __mul__(self, other: Union[Tensor, float]) -> Tensor:
        from . import ops

        if isinstance(other, Tensor):
            return ops.mul(self, other)
        return ops.scale(self, float(other))

    __rmul__ = __mul__

    def __neg__(self) -> Tensor:
        from . import ops

        return ops.neg(self)

    def __matmul__(self, other: Tensor) -> Tensor:
        from . import ops

        return ops.matmul(self, other)


class Parameter(Tensor):
    """A named leaf whose gradient is reported by `backward`."""

    __slots__ = ("name",)

    def __init__(self, name: str, data: ArrayLike) -> None:
        super().__init__(data, requires_grad=True)
        self.name = name

    def assign(self, values: ArrayLike) -> None:
        values = np.asarray(values, dtype=np.float64)
        if values.shape != self.data.shape:
            raise ShapeMismatchError("assign", self.shape, tuple(values.shape))
        self.data[...] = values

    def __repr__(self) -> str:
        return f"Parameter({self.name!r}, shape={self.shape})"


def as_tensor(value: ArrayLike) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)
