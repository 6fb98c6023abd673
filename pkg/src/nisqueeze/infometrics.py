"""Exact mutual information on Gaussian and discrete instances, and checks of the information-channel properties
of the squeezer on instances where every quantity has a closed form.

Every ``check_*`` function returns a `CheckResult`, which is truthy when the property holds.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, special, stats
from scipy.linalg import block_diag
from tapegrad import Tensor, ops

from .ei import EiConfig, ei_gaussian
from .errors import ConfigurationError, IllConditionedWarning

_logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12
PROBABILITY_TOLERANCE = 1e-12

Block = Union[int, Sequence[int]]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    lhs: Any
    rhs: Any
    tolerance: float
    detail: str = ""

    def __bool__(self) -> bool:
        return bool(self.passed)

    def __str__(self) -> str:
        status = "passed" if self.passed else "FAILED"
        text = f"{self.name} {status}: {self.lhs} vs {self.rhs} (tolerance {self.tolerance:g})"
        return f"{text} {self.detail}" if self.detail else text


def _close(lhs: float, rhs: float, tol: float) -> bool:
    return abs(lhs - rhs) <= tol * max(1.0, abs(lhs), abs(rhs))


@dataclass(frozen=True)
class GaussianJoint:
    """Jointly Gaussian vector partitioned into consecutive blocks of the given sizes."""

    mean: np.ndarray
    cov: np.ndarray
    blocks: Tuple[int, ...]

    def __post_init__(self) -> None:
        cov = np.asarray(self.cov, dtype=np.float64)
        n = cov.shape[0] if cov.ndim == 2 else -1
        if cov.ndim != 2 or cov.shape != (n, n) or np.asarray(self.mean).shape != (n,):
            raise ConfigurationError(f"mean {np.shape(self.mean)} and covariance {cov.shape} do not conform")
        if sum(self.blocks) != n or any(b < 1 for b in self.blocks):
            raise ConfigurationError(f"block sizes {self.blocks} do not partition dimension {n}")
        if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.max(np.abs(cov))))):
            raise ConfigurationError("covariance is not symmetric")
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as e:
            raise ConfigurationError(f"covariance is not positive definite: {e}") from e

    @classmethod
    def centered(cls, cov: np.ndarray, blocks: Sequence[int]) -> "GaussianJoint":
        cov = np.asarray(cov, dtype=np.float64)
        return cls(np.zeros(cov.shape[0]), (cov + cov.T) / 2.0, tuple(blocks))

    @property
    def dim(self) -> int:
        return int(self.cov.shape[0])

    def indices(self, block: Block) -> List[int]:
        if isinstance(block, (int, np.integer)):
            start = sum(self.blocks[:block])
            return list(range(start, start + self.blocks[block]))
        return [int(i) for i in block]

    def transformed(self, matrix: np.ndarray, offset: Optional[np.ndarray] = None) -> "GaussianJoint":
        """Distribution of ``matrix @ w + offset`` for w from this joint; block sizes are kept."""
        mean = matrix @ self.mean + (0.0 if offset is None else offset)
        return GaussianJoint(mean, _symmetrize(matrix @ self.cov @ matrix.T), self.blocks)


def _symmetrize(cov: np.ndarray) -> np.ndarray:
    return (cov + cov.T) / 2.0


def gaussian_entropy(cov: np.ndarray) -> float:
    """Differential entropy in nats of a Gaussian with covariance `cov`."""
    cov = np.atleast_2d(np.asarray(cov, dtype=np.float64))
    sign, log_det = np.linalg.slogdet(cov)
    if sign <= 0:
        raise ConfigurationError("covariance is not positive definite")
    return 0.5 * (cov.shape[0] * (1.0 + math.log(2.0 * math.pi)) + log_det)


def gaussian_mi(joint: GaussianJoint, block_a: Block, block_b: Block) -> float:
    """I(A; B) = ½ ln(det Σ_A det Σ_B / det Σ_AB); +inf with a warning when Σ_AB is numerically singular."""
    a, b = joint.indices(block_a), joint.indices(block_b)
    if set(a) & set(b):
        raise ConfigurationError(f"blocks overlap: {a} and {b}")
    ab = a + b
    cov = joint.cov
    sigma_ab = cov[np.ix_(ab, ab)]
    if np.linalg.cond(sigma_ab) > CONDITION_LIMIT:
        warnings.warn(
            f"joint covariance is ill-conditioned (condition number above {CONDITION_LIMIT:g}), "
            "mutual information diverges",
            IllConditionedWarning,
            stacklevel=2,
        )
        return math.inf
    _, log_a = np.linalg.slogdet(cov[np.ix_(a, a)])
    _, log_b = np.linalg.slogdet(cov[np.ix_(b, b)])
    _, log_ab = np.linalg.slogdet(sigma_ab)
    return 0.5 * (log_a + log_b - log_ab)


@dataclass(frozen=True)
class DiscreteChannel:
    """Input distribution p(x) and conditional matrix P(y | x) with rows indexed by x."""

    input: np.ndarray
    matrix: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.input, dtype=np.float64)
        m = np.asarray(self.matrix, dtype=np.float64)
        if p.ndim != 1 or m.ndim != 2 or m.shape[0] != p.shape[0]:
            raise ConfigurationError(f"input {p.shape} and channel matrix {m.shape} do not conform")
        if np.any(p < 0) or abs(p.sum() - 1.0) > PROBABILITY_TOLERANCE:
            raise ConfigurationError("input distribution must be non-negative and sum to 1")
        if np.any(m < 0) or np.max(np.abs(m.sum(axis=1) - 1.0)) > PROBABILITY_TOLERANCE:
            raise ConfigurationError("channel rows must be non-negative and sum to 1")

    @property
    def joint(self) -> np.ndarray:
        return np.asarray(self.input)[:, None] * np.asarray(self.matrix)

    @property
    def output(self) -> np.ndarray:
        return np.asarray(self.input) @ np.asarray(self.matrix)


def discrete_entropy(distribution: np.ndarray) -> float:
    return float(stats.entropy(np.asarray(distribution, dtype=np.float64).ravel()))


def discrete_mi(channel: DiscreteChannel) -> float:
    joint = channel.joint
    independent = np.outer(channel.input, channel.output)
    return float(np.sum(special.rel_entr(joint, np.where(joint > 0, independent, 1.0))))


def deterministic_channel(input_distribution: np.ndarray, mapping: Sequence[int], n_out: int) -> DiscreteChannel:
    """Channel sending state i to ``mapping[i]`` with probability one."""
    matrix = np.zeros((len(mapping), n_out))
    matrix[np.arange(len(mapping)), np.asarray(mapping)] = 1.0
    return DiscreteChannel(np.asarray(input_distribution, dtype=np.float64), matrix)


@dataclass(frozen=True)
class AffineMap:
    A: np.ndarray  # noqa: N815
    b: np.ndarray

    @classmethod
    def linear(cls, A: np.ndarray) -> "AffineMap":  # noqa: N803
        A = np.atleast_2d(np.asarray(A, dtype=np.float64))  # noqa: N806
        return cls(A, np.zeros(A.shape[0]))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x) @ self.A.T + self.b

    @property
    def invertible(self) -> bool:
        return self.A.shape[0] == self.A.shape[1] and np.linalg.cond(self.A) < CONDITION_LIMIT


def random_spd(n: int, rng: np.random.Generator, jitter: float = 0.5) -> np.ndarray:
    m = rng.standard_normal((n, n))
    return m @ m.T / n + jitter * np.eye(n)


def random_invertible(n: int, rng: np.random.Generator, max_condition: float = 50.0) -> np.ndarray:
    while True:
        m = rng.standard_normal((n, n)) + 0.5 * np.eye(n)
        if np.linalg.cond(m) < max_condition:
            return m


def check_lemma1(
    bijection: AffineMap, joint: GaussianJoint, x_block: int = 0, z_block: int = 1, tol: float = 1e-9
) -> CheckResult:
    """An invertible affine map applied to X leaves I(X; Z) unchanged."""
    if not bijection.invertible:
        raise ConfigurationError("the map applied to X must be invertible")
    x = joint.indices(x_block)
    if bijection.A.shape != (len(x), len(x)):
        raise ConfigurationError(f"map of shape {bijection.A.shape} does not act on a block of size {len(x)}")
    transform = np.eye(joint.dim)
    transform[np.ix_(x, x)] = bijection.A
    offset = np.zeros(joint.dim)
    offset[x] = bijection.b

    before = gaussian_mi(joint, x_block, z_block)
    after = gaussian_mi(joint.transformed(transform, offset), x_block, z_block)
    return CheckResult("bijection invariance", _close(before, after, tol), before, after, tol)


def markov_gaussian_joint(
    u_dim: int, v_dim: int, y_dim: int, z_dim: int, rng: np.random.Generator
) -> GaussianJoint:
    """Blocks (U, V, Y, Z) with V = GU + noise, Y = HU + noise and Z independent, so Y depends on (U, V) only
    through U."""
    su = random_spd(u_dim, rng)
    g = rng.standard_normal((v_dim, u_dim))
    h = rng.standard_normal((y_dim, u_dim))
    nv, ny, sz = random_spd(v_dim, rng), random_spd(y_dim, rng), random_spd(z_dim, rng)

    # W = (U, noise_v, noise_y, Z) is block independent; the joint is a linear image of it
    base = block_diag(su, nv, ny, sz)
    n = u_dim + v_dim + y_dim + z_dim
    k = np.zeros((n, n))
    u, v, y, z = (slice(0, u_dim), slice(u_dim, u_dim + v_dim), slice(u_dim + v_dim, n - z_dim), slice(n - z_dim, n))
    k[u, u] = np.eye(u_dim)
    k[v, u], k[v, v] = g, np.eye(v_dim)
    k[y, u], k[y, y] = h, np.eye(y_dim)
    k[z, z] = np.eye(z_dim)
    return GaussianJoint.centered(k @ base @ k.T, (u_dim, v_dim, y_dim, z_dim))


def check_lemma2_lemma3(joint: GaussianJoint, tol: float = 1e-9) -> CheckResult:
    """On blocks (U, V, Y, Z) with Y depending on X = (U, V) only through U and Z independent:
    I(X; Y) = I(U; Y), and appending Z to Y changes nothing."""
    if len(joint.blocks) != 4:
        raise ConfigurationError(f"expected blocks (U, V, Y, Z), got {len(joint.blocks)} blocks")
    x = joint.indices(0) + joint.indices(1)
    y, z = joint.indices(2), joint.indices(3)

    i_xy = gaussian_mi(joint, x, y)
    i_uy = gaussian_mi(joint, 0, y)
    i_xyz = gaussian_mi(joint, x, y + z)
    projection = _close(i_xy, i_uy, tol)
    concatenation = _close(i_xy, i_xyz, tol)
    return CheckResult(
        "projection and concatenation",
        projection and concatenation,
        i_xy,
        (i_uy, i_xyz),
        tol,
        f"I(U;Y) {'matches' if projection else 'differs'}, I(X;Y+Z) {'matches' if concatenation else 'differs'}",
    )


@dataclass(frozen=True)
class AffineSqueezer:
    """Fully affine squeezer with Gaussian inputs.

    Base noise ``W = (x, ξ, z)`` with x ~ N(0, x_cov), ξ ~ N(0, noise_cov) and z ~ N(0, I_{p-q}); then::

        y  = P B x            (encoder, P keeps the first q coordinates)
        y' = M y + ξ          (macro dynamics with Gaussian noise)
        x̂ = B⁻¹ [y'; z]      (decoder)
    """

    B: np.ndarray  # noqa: N815
    M: np.ndarray  # noqa: N815
    x_cov: np.ndarray
    noise_cov: np.ndarray

    @property
    def p(self) -> int:
        return int(self.B.shape[0])

    @property
    def q(self) -> int:
        return int(self.M.shape[0])

    def _maps(self) -> Dict[str, np.ndarray]:
        p, q = self.p, self.q
        n = 2 * p
        projection = np.eye(q, p)
        encoder = projection @ self.B
        maps = {"x": np.hstack([np.eye(p), np.zeros((p, n - p))])}
        maps["y"] = np.hstack([encoder, np.zeros((q, n - p))])
        maps["y_next"] = np.hstack([self.M @ encoder, np.eye(q), np.zeros((q, p - q))])
        latent = np.vstack([maps["y_next"], np.hstack([np.zeros((p - q, p + q)), np.eye(p - q)])])
        maps["x_hat"] = np.linalg.solve(self.B, latent)
        return maps

    def joint(self, *names: str) -> GaussianJoint:
        """Joint distribution of the named variables (``x``, ``y``, ``y_next``, ``x_hat``) in the given order."""
        maps = self._maps()
        base = block_diag(self.x_cov, self.noise_cov, np.eye(self.p - self.q))
        k = np.vstack([maps[name] for name in names])
        return GaussianJoint.centered(k @ base @ k.T, tuple(maps[name].shape[0] for name in names))


def random_affine_squeezer(p: int, q: int, rng: np.random.Generator) -> AffineSqueezer:
    return AffineSqueezer(
        B=random_invertible(p, rng),
        M=rng.standard_normal((q, q)),
        x_cov=random_spd(p, rng),
        noise_cov=random_spd(q, rng),
    )


def check_theorem2_affine(squeezer: AffineSqueezer, tol: float = 1e-9) -> CheckResult:
    """The macro dynamics is the bottleneck: I(y; y') = I(x; x̂)."""
    macro = gaussian_mi(squeezer.joint("y", "y_next"), 0, 1)
    channel = gaussian_mi(squeezer.joint("x", "x_hat"), 0, 1)
    return CheckResult("information bottleneck", _close(macro, channel, tol), macro, channel, tol)


def check_theorem6_affine(
    B: np.ndarray, x_cov: np.ndarray, readout_cov: np.ndarray, tol: float = 1e-12  # noqa: N803
) -> CheckResult:
    """With a noisy encoder y = P_q(Bx + η), I(x; y^q) never decreases as q grows."""
    p = B.shape[0]
    # base (x, η); rows: x then the full readout Bx + η
    k = np.block([[np.eye(p), np.zeros((p, p))], [B, np.eye(p)]])
    full = k @ block_diag(x_cov, readout_cov) @ k.T
    values = []
    for q in range(1, p + 1):
        keep = list(range(p)) + list(range(p, p + q))
        joint = GaussianJoint.centered(full[np.ix_(keep, keep)], (p, q))
        values.append(gaussian_mi(joint, 0, 1))
    monotone = all(b >= a - tol * max(1.0, abs(a)) for a, b in zip(values, values[1:]))
    return CheckResult("narrower is harder", monotone, values, sorted(values), tol)


def check_corollary1_affine(
    B: np.ndarray,  # noqa: N803
    M: np.ndarray,  # noqa: N803
    x_cov: np.ndarray,
    noise_cov: np.ndarray,
    tol: float = 1e-9,
) -> CheckResult:
    """Data generated in the latent space of ψ = B with an r-dimensional driven part M (r x r) and independent
    standard normal remainder. An exact squeezer with any q >= r has macro MI equal to I(x_t; x_{t+1})."""
    p, r = B.shape[0], M.shape[0]
    # x_{t+1} = B⁻¹ [M (Bx)_r + ξ; n], base (x, ξ, n)
    k_next = np.linalg.solve(
        B,
        np.block([[M @ np.eye(r, p) @ B, np.eye(r), np.zeros((r, p - r))], [np.zeros((p - r, p + r)), np.eye(p - r)]]),
    )
    k = np.vstack([np.hstack([np.eye(p), np.zeros((p, p))]), k_next])
    data = gaussian_mi(GaussianJoint.centered(k @ block_diag(x_cov, noise_cov, np.eye(p - r)) @ k.T, (p, p)), 0, 1)

    macro = []
    for q in range(r, p + 1):
        squeezer = AffineSqueezer(
            B=B,
            M=block_diag(M, np.zeros((q - r, q - r))),
            x_cov=x_cov,
            noise_cov=block_diag(noise_cov, np.eye(q - r)),
        )
        macro.append(gaussian_mi(squeezer.joint("y", "y_next"), 0, 1))
    passed = all(_close(m, data, tol) for m in macro)
    return CheckResult("scale independence of macro information", passed, macro, data, tol)


def _grouping(groups: Sequence[int]) -> Tuple[np.ndarray, int]:
    labels = np.asarray(groups, dtype=np.int64)
    n_groups = int(labels.max()) + 1
    matrix = np.zeros((labels.size, n_groups))
    matrix[np.arange(labels.size), labels] = 1.0
    return matrix, n_groups


def lumped_transition(matrix: np.ndarray, groups: Sequence[int], weights: np.ndarray) -> np.ndarray:
    """Macro transition between groups, averaging member rows by `weights`."""
    grouping, n_groups = _grouping(groups)
    flows = (np.asarray(weights)[:, None] * matrix) @ grouping
    mass = grouping.T @ np.asarray(weights)
    result = np.zeros((n_groups, n_groups))
    for g in range(n_groups):
        members = grouping[:, g] > 0
        result[g] = flows[members].sum(axis=0) / mass[g] if mass[g] > 0 else np.eye(n_groups)[g]
    return result


def check_data_processing(
    matrix: np.ndarray, groups: Sequence[int], input_distribution: Optional[np.ndarray] = None, tol: float = 1e-12
) -> CheckResult:
    """On the chain X → X' → U → V (successor, grouping, lumped macro step): I(X;V) <= I(X;U) <= I(X;X')."""
    matrix = np.asarray(matrix, dtype=np.float64)
    n = matrix.shape[0]
    p_x = np.full(n, 1.0 / n) if input_distribution is None else np.asarray(input_distribution, dtype=np.float64)
    grouping, _ = _grouping(groups)
    p_next = p_x @ matrix
    macro = lumped_transition(matrix, groups, p_next)

    i_xx = discrete_mi(DiscreteChannel(p_x, matrix))
    i_xu = discrete_mi(DiscreteChannel(p_x, matrix @ grouping))
    i_xv = discrete_mi(DiscreteChannel(p_x, matrix @ grouping @ macro))
    passed = i_xv <= i_xu + tol and i_xu <= i_xx + tol
    return CheckResult("data processing", passed, (i_xv, i_xu), (i_xu, i_xx), tol)


def check_lemma4_discrete(joint: np.ndarray, tol: float = 1e-12) -> CheckResult:
    """X = (U, U') with joint pmf ``joint[u, u']``: I(X; U) = H(U), and a bijection X' loses
    I(X;X') - I(X;U) = H(U') - I(U;U')."""
    joint = np.asarray(joint, dtype=np.float64)
    if joint.ndim != 2 or abs(joint.sum() - 1.0) > PROBABILITY_TOLERANCE or np.any(joint < 0):
        raise ConfigurationError("joint must be a non-negative matrix summing to 1")
    n_u, n_rest = joint.shape
    p_x = joint.ravel()
    p_u, p_rest = joint.sum(axis=1), joint.sum(axis=0)

    i_xu = discrete_mi(deterministic_channel(p_x, [i // n_rest for i in range(p_x.size)], n_u))
    i_xx = discrete_mi(deterministic_channel(p_x, list(range(p_x.size)), p_x.size))
    conditional = np.divide(joint, p_u[:, None], out=np.tile(p_rest, (n_u, 1)), where=p_u[:, None] > 0)
    i_uu = discrete_mi(DiscreteChannel(p_u, conditional))

    projection = abs(i_xu - discrete_entropy(p_u)) <= tol
    loss = abs((i_xx - i_xu) - (discrete_entropy(p_rest) - i_uu)) <= tol
    return CheckResult(
        "information loss by projection",
        projection and loss,
        (i_xu, i_xx - i_xu),
        (discrete_entropy(p_u), discrete_entropy(p_rest) - i_uu),
        tol,
    )


def check_theorem4_discrete(
    matrix: np.ndarray,
    permutation: Sequence[int],
    groups: Sequence[int],
    input_distribution: Optional[np.ndarray] = None,
    tol: float = 1e-12,
) -> CheckResult:
    """Discrete squeezed channel X → X' = π(X) → U = group(X') → V (lumped macro step):
    I(U;V) <= I(X;U) = H(U) <= I(X;X') = H(X)."""
    matrix = np.asarray(matrix, dtype=np.float64)
    n = matrix.shape[0]
    if sorted(permutation) != list(range(n)):
        raise ConfigurationError(f"{permutation} is not a permutation of {n} states")
    p_x = np.full(n, 1.0 / n) if input_distribution is None else np.asarray(input_distribution, dtype=np.float64)
    labels = np.asarray(groups, dtype=np.int64)
    n_groups = int(labels.max()) + 1
    moved = np.asarray(permutation)

    # groups are defined on X' states, U = group(π(x))
    u_of_x = labels[moved]
    p_u = deterministic_channel(p_x, u_of_x, n_groups).output
    # macro dynamics: the lumped chain expressed on X' coordinates
    relabelled = np.zeros_like(matrix)
    relabelled[np.ix_(moved, moved)] = matrix
    macro = lumped_transition(relabelled, groups, deterministic_channel(p_x, moved, n).output)

    i_uv = discrete_mi(DiscreteChannel(p_u, macro))
    i_xu = discrete_mi(deterministic_channel(p_x, u_of_x, n_groups))
    i_xx = discrete_mi(deterministic_channel(p_x, moved, n))
    h_u, h_x = discrete_entropy(p_u), discrete_entropy(p_x)
    passed = i_uv <= i_xu + tol and abs(i_xu - h_u) <= tol and h_u <= i_xx + tol and abs(i_xx - h_x) <= tol
    return CheckResult("bottleneck bounds the encoder", passed, (i_uv, i_xu, h_u), (i_xu, i_xx, h_x), tol)


def _integral_term(a: float, b: float, s: float, c: float, L: float) -> float:  # noqa: N803
    """One coordinate of the intervened channel integral for x_{t+1} ~ N(a x + c, s²) under ψ(x) = b x."""
    if a == 0.0:
        return 0.0
    k = a / b
    ends = sorted((-k * L + c, k * L + c))
    lo, hi = ends
    scale = abs(b / a)

    def inner(y: float) -> float:
        return scale * (special.ndtr((hi - y) / s) - special.ndtr((lo - y) / s))

    def integrand(y: float) -> float:
        value = inner(y)
        return float(special.xlogy(value, value))

    margin = 12.0 * s
    total, _ = integrate.quad(integrand, lo - margin, hi + margin, points=[lo, hi], limit=400)
    return math.log(2.0 * L) - 0.5 * math.log(2.0 * math.pi * math.e * s * s) - total / (2.0 * L)


def check_theorem5_linear_gaussian(
    a: Sequence[float],
    b: Sequence[float],
    s: float,
    c: Optional[Sequence[float]] = None,
    L: float = 50.0,  # noqa: N803
    tol: float = 0.05,
) -> CheckResult:
    """Compare the intervened-channel integral of a diagonal linear-Gaussian generator seen through ψ(x) = b x
    against `ei_gaussian` of the corresponding macro map y -> a y + b c with noise |b| s.

    Both sides factorize over coordinates; the integral is evaluated with adaptive quadrature.
    """
    a_vec, b_vec = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    c_vec = np.zeros_like(a_vec) if c is None else np.asarray(c, dtype=np.float64)
    if a_vec.shape != b_vec.shape or a_vec.shape != c_vec.shape or a_vec.ndim != 1:
        raise ConfigurationError("a, b and c must be vectors of equal length")
    if np.any(b_vec == 0) or not s > 0:
        raise ConfigurationError("ψ must be invertible (b != 0) and the noise scale positive")

    integral = sum(_integral_term(ai, bi, s, ci, L) for ai, bi, ci in zip(a_vec, b_vec, c_vec))

    q = a_vec.size
    weights, offset = np.diag(a_vec), b_vec * c_vec

    def macro(y: Tensor) -> Tensor:
        return ops.addrow(ops.matmul(y, Tensor(weights)), Tensor(offset))

    cfg = EiConfig(L=L, n_samples=64, full_entropy=True)
    estimate = ei_gaussian(macro, np.abs(b_vec) * s, cfg).ei

    scale = max(abs(integral), abs(estimate))
    passed = abs(integral - estimate) <= (tol * scale if scale > 1e-6 else 1e-6)
    _logger.debug("channel integral %.6g vs macro EI %.6g over %d coordinates", integral, estimate, q)
    return CheckResult("effective information from the data kernel", passed, integral, estimate, tol)
