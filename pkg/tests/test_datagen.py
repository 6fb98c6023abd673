import itertools
import json
from pathlib import Path
from typing import Callable

import numpy as np
import pytest
from nisqueeze.datagen import (
    BoolNetParams,
    MarkovParams,
    SpringParams,
    boolnet_transition_matrix,
    gen_boolnet,
    gen_markov,
    gen_spring,
    load_mechanism_table,
    one_hot,
    rotate,
    spring_latent,
    state_bits,
    state_codes,
)
from nisqueeze.dataset import TransitionPairs
from nisqueeze.errors import ConfigurationError, DatasetError
from numpy.testing import assert_allclose, assert_array_equal


def test_rotation_by_one_radian() -> None:
    assert_allclose([0.5403023, -0.8414710], rotate(np.array([1.0, 0.0]), 1.0), atol=1e-7)


def test_spring_readings_average_to_the_latent_flow() -> None:
    pairs = gen_spring(SpringParams(batches=3, per_batch=50, seed=1))

    assert (150, 4) == pairs.x.shape
    assert_allclose(rotate(spring_latent(pairs.x), 1.0), spring_latent(pairs.x_next), atol=1e-12)
    assert np.all(np.abs(spring_latent(pairs.x)) <= 1.0)


def test_noiseless_spring_sensors_agree() -> None:
    pairs = gen_spring(SpringParams(sigma=(0.0, 0.0), batches=2, per_batch=10))

    assert_array_equal(pairs.x[:, :2], pairs.x[:, 2:])
    assert_array_equal(pairs.x_next[:, :2], pairs.x_next[:, 2:])


def test_spring_noise_variance() -> None:
    pairs = gen_spring(SpringParams(sigma=(0.1, 0.3), batches=1000, per_batch=100))

    # x1 - x3 = 2 ξ
    variance = np.var(pairs.x[:, :2] - pairs.x[:, 2:], axis=0) / 4.0

    assert_allclose([0.01, 0.09], variance, rtol=0.05)


def test_markov_chain_frequencies() -> None:
    pairs = gen_markov(MarkovParams(batches=1000, per_batch=100, seed=3))
    states = pairs.x.argmax(axis=1)
    successors = pairs.x_next.argmax(axis=1)

    assert (100000, 8) == pairs.x.shape
    assert np.all(successors[states == 7] == 7)
    assert not np.any(successors[states < 7] == 7)
    counts = np.bincount(successors[states < 7], minlength=8)[:7]
    assert_allclose(np.full(7, 1.0 / 7.0), counts / counts.sum(), atol=0.01)


def test_invalid_markov_matrix() -> None:
    with pytest.raises(ConfigurationError, match="sum to 1"):
        gen_markov(MarkovParams(matrix=np.array([[0.5, 0.4], [0.0, 1.0]])))
    with pytest.raises(ConfigurationError, match="negative"):
        gen_markov(MarkovParams(matrix=np.array([[1.5, -0.5], [0.0, 1.0]])))
    with pytest.raises(ConfigurationError, match="square"):
        gen_markov(MarkovParams(matrix=np.ones((2, 3)) / 3.0))


def test_state_bits_and_codes() -> None:
    codes = np.arange(16)
    bits = state_bits(codes, 4)

    assert_array_equal([0, 0, 1, 1], bits[3])
    assert_array_equal([1, 0, 0, 0], bits[8])
    assert_array_equal(codes, state_codes(bits))
    assert_array_equal([[0.0, 1.0, 0.0]], one_hot(np.array([1]), 3))


def brute_force_matrix(params: BoolNetParams) -> np.ndarray:
    index = {node: i for i, node in enumerate(params.nodes)}
    states = list(itertools.product((0, 1), repeat=len(params.nodes)))
    matrix = np.zeros((len(states), len(states)))
    for i, current in enumerate(states):
        for j, following in enumerate(states):
            probability = 1.0
            for node, bit in zip(params.nodes, following):
                pattern = "".join(str(current[index[s]]) for s in params.inputs[node])
                p_zero = params.table[node][pattern]
                probability *= p_zero if bit == 0 else 1.0 - p_zero
            matrix[i, j] = probability
    return matrix


def test_boolnet_matrix_matches_enumeration() -> None:
    params = BoolNetParams()

    matrix = boolnet_transition_matrix(params)

    assert_allclose(brute_force_matrix(params), matrix, atol=1e-15)
    assert_allclose(np.ones(16), matrix.sum(axis=1))
    # C = D = 0 in state 0
    first_zero = state_bits(np.arange(16), 4)[:, 0] == 0
    assert pytest.approx(0.7) == matrix[0, first_zero].sum()


def test_deterministic_mechanisms_give_a_function() -> None:
    copy_and = {"00": 1.0, "01": 1.0, "10": 1.0, "11": 0.0}
    params = BoolNetParams(table={node: dict(copy_and) for node in "ABCD"})

    matrix = boolnet_transition_matrix(params)

    assert_array_equal(np.ones(16), (matrix == 1.0).sum(axis=1))
    assert_array_equal(np.full(16, 15), (matrix == 0.0).sum(axis=1))


def test_boolnet_samples_follow_the_matrix() -> None:
    params = BoolNetParams(batches=1000, per_batch=100, seed=2)
    pairs = gen_boolnet(params)
    matrix = boolnet_transition_matrix(params)

    states = pairs.x.argmax(axis=1)
    successors = pairs.x_next.argmax(axis=1)
    observed = np.bincount(successors[states == 5], minlength=16) / np.sum(states == 5)

    assert pairs.metadata.illustrative
    assert_allclose(matrix[5], observed, atol=0.04)


def test_load_mechanism_table(tmp_path: Path) -> None:
    path = tmp_path / "mechanisms.json"
    document = {node: {"table": {"00": 0.9, "01": 0.5, "10": 0.5, "11": 0.1}} for node in "ABCD"}
    document["A"]["inputs"] = ["B", "C"]
    path.write_text(json.dumps(document), encoding="utf-8")

    params = load_mechanism_table(path)

    assert ("B", "C") == params.inputs["A"]
    assert ("A", "B") == params.inputs["C"]
    assert 0.9 == params.table["D"]["00"]
    assert not params.illustrative


@pytest.mark.parametrize(
    ("content", "error", "match"),
    [
        ("{broken", ConfigurationError, "not valid JSON"),
        ("[]", ConfigurationError, "must map"),
        ('{"A": {"inputs": ["C", "D"]}}', ConfigurationError, "'table'"),
        ('{"A": {"inputs": ["C", "D"], "table": {"00": 0.7}}}', ConfigurationError, "unknown nodes"),
        ('{"A": {"inputs": ["A", "A"], "table": {"00": 0.7}}}', ConfigurationError, "lacks an entry"),
        ('{"A": {"inputs": ["A", "A"], "table": {"00": 2, "01": 0, "10": 0, "11": 0}}}', ConfigurationError, "not in"),
    ],
)
def test_invalid_mechanism_tables(tmp_path: Path, content: str, error: type, match: str) -> None:
    path = tmp_path / "mechanisms.json"
    path.write_text(content, encoding="utf-8")

    with pytest.raises(error, match=match):
        load_mechanism_table(path)


def test_missing_mechanism_table(tmp_path: Path) -> None:
    with pytest.raises(DatasetError):
        load_mechanism_table(tmp_path / "absent.json")


@pytest.mark.parametrize(
    "generate",
    [
        lambda workers: gen_spring(SpringParams(batches=6, per_batch=7, seed=9), workers=workers),
        lambda workers: gen_markov(MarkovParams(batches=6, per_batch=7, seed=9), workers=workers),
        lambda workers: gen_boolnet(BoolNetParams(batches=6, per_batch=7, seed=9), workers=workers),
    ],
)
def test_output_does_not_depend_on_workers(generate: Callable[[int], TransitionPairs]) -> None:
    single = generate(1)
    pooled = generate(3)

    assert_array_equal(single.x, pooled.x)
    assert_array_equal(single.x_next, pooled.x_next)


def test_seeds_change_the_data() -> None:
    first = gen_spring(SpringParams(batches=2, per_batch=5, seed=0))
    second = gen_spring(SpringParams(batches=2, per_batch=5, seed=1))

    assert not np.array_equal(first.x, second.x)
