from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .errors import NonScalarRootError, ShapeMismatchError
from .tensor import Parameter, Tensor


def topological_order(root: Tensor) -> List[Tensor]:
    """Post-order of the graph under `root`; every node appears exactly once, parents first."""
    order: List[Tensor] = []
    visited = set()
    stack = [(root, False)]
    while stack:
        tensor, expanded = stack.pop()
        if expanded:
            order.append(tensor)
            continue
        if tensor.uid in visited:
            continue
        visited.add(tensor.uid)
        stack.append((tensor, True))
        if tensor.node is not None:
            for edge in tensor.node.edges:
                if edge.parent.uid not in visited:
                    stack.append((edge.parent, False))
    return order


def propagate(root: Tensor, seed: np.ndarray, order: Optional[List[Tensor]] = None) -> Dict[int, np.ndarray]:
    """Push the cotangent `seed` from `root` back through the graph.

    Returns the accumulated gradient of every leaf reached, keyed by tensor uid.
    """
    seed = np.asarray(seed, dtype=np.float64)
    if seed.shape != root.shape:
        raise ShapeMismatchError("backward", root.shape, seed.shape)
    if order is None:
        order = topological_order(root)

    grads: Dict[int, np.ndarray] = {root.uid: seed}
    leaves: Dict[int, np.ndarray] = {}
    for tensor in reversed(order):
        g = grads.pop(tensor.uid, None)
        if g is None:
            continue
        if tensor.node is None:
            leaves[tensor.uid] = g
            continue
        for edge in tensor.node.edges:
            contribution = edge.vjp(g)
            previous = grads.get(edge.parent.uid)
            grads[edge.parent.uid] = contribution if previous is None else previous + contribution
    return leaves


def backward(root: Tensor, params: Optional[Iterable[Parameter]] = None) -> Dict[str, Tensor]:
    """Gradient of a scalar `root` with respect to every `Parameter` it depends on.

    Parameters listed in `params` but not reachable from `root` get a zero gradient.
    """
    if root.size != 1:
        raise NonScalarRootError(root.shape)

    order = topological_order(root)
    leaves = propagate(root, np.ones(root.shape), order)

    result: Dict[str, Tensor] = {}
    for tensor in order:
        if isinstance(tensor, Parameter) and tensor.uid in leaves:
            result[tensor.name] = Tensor(leaves[tensor.uid])
    for param in params or ():
        if param.name not in result:
            result[param.name] = Tensor(np.zeros(param.shape))
    return result


def vjp(output: Tensor, seed: np.ndarray, wrt: Sequence[Tensor]) -> List[np.ndarray]:
    """Vector-Jacobian products of `output` against each tensor in `wrt` (zeros when unreachable)."""
    leaves = propagate(output, seed)
    return [leaves.get(t.uid, np.zeros(t.shape)) for t in wrt]
