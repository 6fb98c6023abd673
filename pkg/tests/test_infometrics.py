import math

import numpy as np
import pytest
from nisqueeze.datagen import MarkovParams
from nisqueeze.errors import ConfigurationError, IllConditionedWarning
from nisqueeze.infometrics import (
    AffineMap,
    AffineSqueezer,
    DiscreteChannel,
    GaussianJoint,
    check_corollary1_affine,
    check_data_processing,
    check_lemma1,
    check_lemma2_lemma3,
    check_lemma4_discrete,
    check_theorem2_affine,
    check_theorem4_discrete,
    check_theorem5_linear_gaussian,
    check_theorem6_affine,
    deterministic_channel,
    discrete_entropy,
    discrete_mi,
    gaussian_entropy,
    gaussian_mi,
    lumped_transition,
    markov_gaussian_joint,
    random_affine_squeezer,
    random_invertible,
    random_spd,
)

# I(X; X') of the 8-state chain with 7 mixing states and one absorbing state, uniform input
CHAIN_MI = math.log(8.0) - 7.0 / 8.0 * math.log(7.0)


def correlated(rho: float) -> GaussianJoint:
    return GaussianJoint.centered(np.array([[1.0, rho], [rho, 1.0]]), (1, 1))


def test_gaussian_mi_of_correlated_pair() -> None:
    assert pytest.approx(-0.5 * math.log(0.75), abs=1e-12) == gaussian_mi(correlated(0.5), 0, 1)
    assert pytest.approx(0.1438, abs=1e-4) == gaussian_mi(correlated(0.5), 0, 1)
    assert 0.0 == gaussian_mi(correlated(0.0), 0, 1)


def test_gaussian_mi_diverges_for_near_singular_joints() -> None:
    with pytest.warns(IllConditionedWarning):
        assert math.inf == gaussian_mi(correlated(1.0 - 1e-13), 0, 1)


def test_gaussian_mi_rejects_overlapping_blocks() -> None:
    joint = GaussianJoint.centered(random_spd(3, np.random.default_rng(0)), (2, 1))

    with pytest.raises(ConfigurationError, match="overlap"):
        gaussian_mi(joint, [0, 1], [1, 2])


@pytest.mark.parametrize(
    ("cov", "blocks"),
    [
        (np.array([[1.0, 2.0], [2.0, 1.0]]), (1, 1)),
        (np.array([[1.0, 0.5], [0.0, 1.0]]), (1, 1)),
        (np.eye(3), (1, 1)),
        (np.eye(2), (2, 0)),
    ],
)
def test_invalid_gaussian_joints(cov: np.ndarray, blocks: tuple) -> None:
    with pytest.raises(ConfigurationError):
        GaussianJoint(np.zeros(cov.shape[0]), cov, blocks)


def test_gaussian_entropy() -> None:
    assert pytest.approx(0.5 * (1.0 + math.log(2.0 * math.pi))) == gaussian_entropy(np.eye(1))
    assert pytest.approx(gaussian_entropy(np.eye(2)) + math.log(6.0)) == gaussian_entropy(np.diag([4.0, 9.0]))
    with pytest.raises(ConfigurationError):
        gaussian_entropy(np.array([[-1.0]]))


def test_discrete_information() -> None:
    uniform = np.full(8, 1.0 / 8.0)

    assert pytest.approx(math.log(8.0)) == discrete_entropy(uniform)
    assert pytest.approx(math.log(8.0)) == discrete_mi(deterministic_channel(uniform, list(range(8)), 8))
    assert 0.0 == discrete_mi(deterministic_channel(uniform, [0] * 8, 1))
    assert pytest.approx(CHAIN_MI, abs=1e-12) == discrete_mi(DiscreteChannel(uniform, MarkovParams().matrix))
    assert pytest.approx(0.3768, abs=1e-4) == CHAIN_MI


def test_discrete_channel_validation() -> None:
    with pytest.raises(ConfigurationError, match="sum to 1"):
        DiscreteChannel(np.array([0.5, 0.6]), np.eye(2))
    with pytest.raises(ConfigurationError, match="rows"):
        DiscreteChannel(np.array([0.5, 0.5]), np.array([[0.5, 0.4], [0.0, 1.0]]))
    with pytest.raises(ConfigurationError, match="conform"):
        DiscreteChannel(np.array([0.5, 0.5]), np.eye(3))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_bijections_keep_mutual_information(seed: int) -> None:
    rng = np.random.default_rng(seed)
    joint = GaussianJoint.centered(random_spd(5, rng), (3, 2))

    result = check_lemma1(AffineMap(random_invertible(3, rng), rng.normal(size=3)), joint)

    assert result, str(result)
    assert check_lemma1(AffineMap.linear(np.eye(3)[[2, 0, 1]]), joint)


def test_non_invertible_map_is_rejected() -> None:
    joint = GaussianJoint.centered(np.eye(4), (2, 2))

    with pytest.raises(ConfigurationError, match="invertible"):
        check_lemma1(AffineMap.linear(np.ones((2, 2))), joint)


@pytest.mark.parametrize("dims", [(1, 1, 1, 1), (2, 3, 2, 1), (3, 1, 2, 2)])
def test_projection_and_concatenation(dims: tuple) -> None:
    joint = markov_gaussian_joint(*dims, rng=np.random.default_rng(sum(dims)))

    result = check_lemma2_lemma3(joint)

    assert result, str(result)


@pytest.mark.parametrize(("p", "q"), [(2, 1), (3, 2), (4, 1), (3, 3)])
def test_macro_dynamics_is_the_bottleneck(p: int, q: int) -> None:
    squeezer = random_affine_squeezer(p, q, np.random.default_rng(10 * p + q))

    result = check_theorem2_affine(squeezer)

    assert result, str(result)


def test_identity_squeezer_bottleneck() -> None:
    squeezer = AffineSqueezer(B=np.eye(2), M=np.array([[0.5]]), x_cov=np.eye(2), noise_cov=np.eye(1))

    assert pytest.approx(-0.5 * math.log(1.0 - 0.25 / 1.25)) == gaussian_mi(squeezer.joint("y", "y_next"), 0, 1)
    assert check_theorem2_affine(squeezer)


@pytest.mark.parametrize("seed", [0, 1])
def test_narrower_encoders_carry_less(seed: int) -> None:
    rng = np.random.default_rng(seed)

    result = check_theorem6_affine(random_invertible(4, rng), random_spd(4, rng), random_spd(4, rng))

    assert result, str(result)
    assert list(result.lhs) == list(result.rhs)


@pytest.mark.parametrize(("p", "r"), [(3, 1), (4, 2), (3, 3)])
def test_macro_information_is_scale_independent(p: int, r: int) -> None:
    rng = np.random.default_rng(p + r)

    result = check_corollary1_affine(
        random_invertible(p, rng), 0.5 * rng.normal(size=(r, r)), random_spd(p, rng), random_spd(r, rng)
    )

    assert result, str(result)
    assert p - r + 1 == len(result.lhs)


def test_lumped_transition_of_the_chain() -> None:
    matrix = MarkovParams().matrix

    lumped = lumped_transition(matrix, [0] * 7 + [1], np.full(8, 1.0 / 8.0))

    np.testing.assert_allclose(np.eye(2), lumped, atol=1e-15)


def test_data_processing_on_the_chain() -> None:
    result = check_data_processing(MarkovParams().matrix, [0] * 7 + [1])

    assert result, str(result)
    assert pytest.approx(CHAIN_MI, abs=1e-12) == result.rhs[1]
    assert pytest.approx(CHAIN_MI, abs=1e-12) == result.rhs[0]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_data_processing_on_random_chains(seed: int) -> None:
    rng = np.random.default_rng(seed)
    matrix = rng.dirichlet(np.ones(6), size=6)

    assert check_data_processing(matrix, [0, 0, 1, 1, 2, 2], rng.dirichlet(np.ones(6)))


def test_information_loss_by_projection() -> None:
    rng = np.random.default_rng(3)
    joint = rng.dirichlet(np.ones(12)).reshape(3, 4)

    assert check_lemma4_discrete(joint)
    with pytest.raises(ConfigurationError):
        check_lemma4_discrete(np.ones((2, 2)))


def test_bottleneck_bounds_the_encoder() -> None:
    rng = np.random.default_rng(4)
    matrix = rng.dirichlet(np.ones(6), size=6)

    assert check_theorem4_discrete(matrix, [3, 1, 0, 5, 4, 2], [0, 0, 1, 1, 1, 2])
    assert check_theorem4_discrete(MarkovParams().matrix, list(range(8)), [0] * 7 + [1])
    with pytest.raises(ConfigurationError, match="permutation"):
        check_theorem4_discrete(matrix, [0, 0, 1, 2, 3, 4], [0] * 6)


@pytest.mark.parametrize(("a", "b"), [((0.9, 0.5), (1.0, 1.0)), ((0.9, 0.5), (1.0, 2.0)), ((0.7,), (0.5,))])
def test_macro_ei_matches_the_channel_integral(a: tuple, b: tuple) -> None:
    result = check_theorem5_linear_gaussian(a, b, s=0.5)

    assert result, str(result)


def test_constant_generator_has_no_information() -> None:
    result = check_theorem5_linear_gaussian((0.0, 0.0), (1.0, 2.0), s=0.5)

    assert result
    assert 0.0 == result.lhs == result.rhs


def test_channel_integral_validation() -> None:
    with pytest.raises(ConfigurationError):
        check_theorem5_linear_gaussian((0.5,), (0.0,), s=1.0)
    with pytest.raises(ConfigurationError):
        check_theorem5_linear_gaussian((0.5, 0.1), (1.0,), s=1.0)
