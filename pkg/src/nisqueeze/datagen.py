"""Seeded generators for the three benchmark systems.

Every batch draws from its own stream ``generator.<system>[batch]``, so the output is independent of how
batches are scheduled across workers and is fixed by the root seed alone.
"""

from __future__ import annotations

import itertools
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Tuple, Union

import numpy as np

from .config import to_document
from .dataset import DatasetMetadata, TransitionPairs
from .errors import ConfigurationError, DatasetError
from .rng import RandomStreams

_logger = logging.getLogger(__name__)

Batch = Tuple[np.ndarray, np.ndarray]


def _markov_default() -> np.ndarray:
    matrix = np.zeros((8, 8))
    matrix[:7, :7] = 1.0 / 7.0
    matrix[7, 7] = 1.0
    return matrix


@dataclass(frozen=True)
class SpringParams:
    sigma: Tuple[float, float] = (0.1, 0.1)
    dt: float = 1.0
    batches: int = 1000
    per_batch: int = 100
    seed: int = 0

    def validate(self) -> "SpringParams":
        if len(self.sigma) != 2 or any(s < 0 for s in self.sigma):
            raise ConfigurationError(f"spring noise sigma must be two non-negative values, got {self.sigma}")
        _check_counts(self.batches, self.per_batch, self.seed)
        return self


@dataclass(frozen=True)
class MarkovParams:
    matrix: np.ndarray = field(default_factory=_markov_default)
    batches: int = 5000
    per_batch: int = 1
    seed: int = 0

    def validate(self) -> "MarkovParams":
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 2:
            raise ConfigurationError(f"transition matrix must be square with at least 2 states, got {matrix.shape}")
        if np.any(matrix < 0):
            raise ConfigurationError("transition matrix has negative entries")
        row_error = np.max(np.abs(matrix.sum(axis=1) - 1.0))
        if row_error > 1e-12:
            raise ConfigurationError(f"transition matrix rows must sum to 1 (max deviation {row_error:.3g})")
        _check_counts(self.batches, self.per_batch, self.seed)
        return self


BOOLNET_NODES: Tuple[str, ...] = ("A", "B", "C", "D")
BOOLNET_INPUTS: Dict[str, Tuple[str, ...]] = {"A": ("C", "D"), "B": ("C", "D"), "C": ("A", "B"), "D": ("A", "B")}
# Pr(node = 0 | input bits); only the first entry is known, the rest is illustrative
BOOLNET_TABLE: Dict[str, Dict[str, float]] = {
    node: {"00": 0.7, "01": 0.7, "10": 0.7, "11": 0.0} for node in BOOLNET_NODES
}


@dataclass(frozen=True)
class BoolNetParams:
    nodes: Tuple[str, ...] = BOOLNET_NODES
    inputs: Mapping[str, Tuple[str, ...]] = field(default_factory=lambda: dict(BOOLNET_INPUTS))
    table: Mapping[str, Mapping[str, float]] = field(
        default_factory=lambda: {k: dict(v) for k, v in BOOLNET_TABLE.items()}
    )
    in_degree: int = 2
    batches: int = 50
    per_batch: int = 100
    seed: int = 0
    illustrative: bool = True

    @property
    def n_states(self) -> int:
        return 2 ** len(self.nodes)

    def validate(self) -> "BoolNetParams":
        if len(set(self.nodes)) != len(self.nodes) or not self.nodes:
            raise ConfigurationError(f"node names must be unique and non-empty, got {self.nodes}")
        patterns = ["".join(bits) for bits in itertools.product("01", repeat=self.in_degree)]
        for node in self.nodes:
            sources = self.inputs.get(node)
            if sources is None or len(sources) != self.in_degree:
                raise ConfigurationError(f"node {node} must have exactly {self.in_degree} inputs, got {sources}")
            unknown = [s for s in sources if s not in self.nodes]
            if unknown:
                raise ConfigurationError(f"node {node} is driven by unknown nodes {unknown}")
            entries = self.table.get(node, {})
            for pattern in patterns:
                if pattern not in entries:
                    raise ConfigurationError(f"mechanism of node {node} lacks an entry for inputs {pattern}")
                if not 0.0 <= entries[pattern] <= 1.0:
                    raise ConfigurationError(
                        f"mechanism of node {node}, inputs {pattern}: probability {entries[pattern]} not in [0, 1]"
                    )
        _check_counts(self.batches, self.per_batch, self.seed)
        return self


def _check_counts(batches: int, per_batch: int, seed: int) -> None:
    if batches < 1 or per_batch < 1:
        raise ConfigurationError(f"batches and samples per batch must be positive, got {batches} x {per_batch}")
    if seed < 0:
        raise ConfigurationError(f"seed must be non-negative, got {seed}")


def _generate(
    name: str, batches: int, seed: int, make_batch: Callable[[np.random.Generator], Batch], workers: int
) -> Batch:
    streams = RandomStreams(seed)

    def run(index: int) -> Batch:
        return make_batch(streams.stream(f"generator.{name}", index))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(batches)))
    else:
        parts = [run(i) for i in range(batches)]
    return np.vstack([x for x, _ in parts]), np.vstack([y for _, y in parts])


def one_hot(states: np.ndarray, n: int) -> np.ndarray:
    return np.eye(n)[np.asarray(states, dtype=np.int64)]


def rotate(latent: np.ndarray, angle: float) -> np.ndarray:
    """Exact flow of dz/dt = v, dv/dt = -z over time `angle`."""
    c, s = np.cos(angle), np.sin(angle)
    z, v = latent[..., 0], latent[..., 1]
    return np.stack([z * c + v * s, -z * s + v * c], axis=-1)


def spring_latent(x: np.ndarray) -> np.ndarray:
    """The latent (z, v) behind spring observations: the sensor noise cancels in the mean of both readings."""
    return (x[..., :2] + x[..., 2:]) / 2.0


def gen_spring(params: SpringParams, *, workers: int = 1) -> TransitionPairs:
    params.validate()
    sigma = np.asarray(params.sigma, dtype=np.float64)

    def observe(latent: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        xi = rng.standard_normal(latent.shape) * sigma
        return np.hstack([latent + xi, latent - xi])

    def batch(rng: np.random.Generator) -> Batch:
        latent = rng.uniform(-1.0, 1.0, size=(params.per_batch, 2))
        x = observe(latent, rng)
        return x, observe(rotate(latent, params.dt), rng)

    x, x_next = _generate("spring", params.batches, params.seed, batch, workers)
    meta = DatasetMetadata(p=4, generator="spring", params=to_document(params), seed=params.seed, n_pairs=len(x))
    return TransitionPairs(x, x_next, meta)


def gen_markov(params: MarkovParams, *, workers: int = 1) -> TransitionPairs:
    params.validate()
    matrix = np.asarray(params.matrix, dtype=np.float64)
    n = matrix.shape[0]

    def batch(rng: np.random.Generator) -> Batch:
        states = rng.integers(0, n, size=params.per_batch)
        successors = np.zeros_like(states)
        for state in np.unique(states):
            mask = states == state
            successors[mask] = rng.choice(n, size=int(mask.sum()), p=matrix[state])
        return one_hot(states, n), one_hot(successors, n)

    x, x_next = _generate("markov", params.batches, params.seed, batch, workers)
    meta = DatasetMetadata(p=n, generator="markov", params=to_document(params), seed=params.seed, n_pairs=len(x))
    return TransitionPairs(x, x_next, meta)


def state_bits(codes: np.ndarray, n_nodes: int) -> np.ndarray:
    """Bits of joint state codes, first node as most significant bit."""
    codes = np.asarray(codes, dtype=np.int64)
    shifts = np.arange(n_nodes - 1, -1, -1)
    return (codes[..., None] >> shifts) & 1


def state_codes(bits: np.ndarray) -> np.ndarray:
    n_nodes = bits.shape[-1]
    return (bits * (1 << np.arange(n_nodes - 1, -1, -1))).sum(axis=-1)


def _probability_of_zero(params: BoolNetParams, bits: np.ndarray) -> np.ndarray:
    """Pr(node' = 0) for every node (columns) given current joint bits (rows)."""
    index = {node: i for i, node in enumerate(params.nodes)}
    result = np.zeros(bits.shape[:-1] + (len(params.nodes),))
    for i, node in enumerate(params.nodes):
        sources = [index[s] for s in params.inputs[node]]
        patterns = ["".join(str(int(b)) for b in row) for row in bits[..., sources].reshape(-1, len(sources))]
        result[..., i] = np.array([params.table[node][p] for p in patterns]).reshape(bits.shape[:-1])
    return result


def gen_boolnet(params: BoolNetParams, *, workers: int = 1) -> TransitionPairs:
    params.validate()
    n_nodes, n_states = len(params.nodes), params.n_states

    def batch(rng: np.random.Generator) -> Batch:
        codes = rng.integers(0, n_states, size=params.per_batch)
        bits = state_bits(codes, n_nodes)
        pr_zero = _probability_of_zero(params, bits)
        next_bits = (rng.random(bits.shape) >= pr_zero).astype(np.int64)
        return one_hot(codes, n_states), one_hot(state_codes(next_bits), n_states)

    x, x_next = _generate("boolnet", params.batches, params.seed, batch, workers)
    meta = DatasetMetadata(
        p=n_states,
        generator="boolnet",
        params=to_document(params),
        seed=params.seed,
        n_pairs=len(x),
        illustrative=params.illustrative,
    )
    return TransitionPairs(x, x_next, meta)


def boolnet_transition_matrix(params: BoolNetParams) -> np.ndarray:
    """The joint-state transition matrix implied by independent node mechanisms."""
    params.validate()
    n_nodes, n_states = len(params.nodes), params.n_states
    bits = state_bits(np.arange(n_states), n_nodes)
    pr_zero = _probability_of_zero(params, bits)
    # T[s, s'] = prod_i Pr(node_i' = bit_i(s') | s)
    per_node = np.where(bits[None, :, :] == 0, pr_zero[:, None, :], 1.0 - pr_zero[:, None, :])
    return np.prod(per_node, axis=-1)


def load_mechanism_table(path: Union[str, Path], base: BoolNetParams = BoolNetParams()) -> BoolNetParams:
    """Read node mechanisms from JSON::

        {"A": {"inputs": ["C", "D"], "table": {"00": 0.7, "01": 0.7, "10": 0.7, "11": 0.0}}, ...}

    ``inputs`` may be omitted to keep the wiring of `base`.
    """
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise DatasetError(f"cannot read mechanism table {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"mechanism table {path} is not valid JSON: {e}") from e
    if not isinstance(document, dict) or not document:
        raise ConfigurationError(f"mechanism table {path} must map node names to mechanisms")

    nodes: List[str] = list(document)
    inputs: Dict[str, Tuple[str, ...]] = {}
    table: Dict[str, Dict[str, float]] = {}
    for node, entry in document.items():
        if not isinstance(entry, dict) or "table" not in entry:
            raise ConfigurationError(f"mechanism table {path}: node {node} needs a 'table' entry")
        sources = entry.get("inputs", base.inputs.get(node))
        if sources is None:
            raise ConfigurationError(f"mechanism table {path}: node {node} has no inputs")
        inputs[node] = tuple(sources)
        table[node] = {str(k): float(v) for k, v in entry["table"].items()}

    params = replace(base, nodes=tuple(nodes), inputs=inputs, table=table, illustrative=False)
    _logger.info("loaded mechanisms of %d nodes from %s", len(nodes), path)
    return params.validate()
