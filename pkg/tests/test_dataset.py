from pathlib import Path

import numpy as np
import pytest
from nisqueeze.dataset import (
    DatasetMetadata,
    TransitionPairs,
    column_names,
    read_csv,
    read_dataset,
    sidecar_path,
    write_dataset,
)
from nisqueeze.errors import DatasetError
from numpy.testing import assert_array_equal

from tests.conftest import make_pairs


@pytest.fixture()
def pairs() -> TransitionPairs:
    rng = np.random.default_rng(2)
    x = rng.normal(size=(25, 3)) * np.array([1e-8, 1.0, 1e8])
    return TransitionPairs(x, x + rng.normal(size=x.shape), DatasetMetadata(3, "spring", {"dt": 1.0}, seed=4))


def test_column_names() -> None:
    assert ["x0", "x1", "xn0", "xn1"] == column_names(2)


def test_write_and_read_are_exact(tmp_path: Path, pairs: TransitionPairs) -> None:
    path, sidecar = write_dataset(tmp_path / "spring.csv", pairs)

    loaded = read_dataset(path)

    assert tmp_path / "spring.meta.json" == sidecar == sidecar_path(path)
    assert_array_equal(pairs.x, loaded.x)
    assert_array_equal(pairs.x_next, loaded.x_next)
    assert "spring" == loaded.metadata.generator
    assert 4 == loaded.metadata.seed
    assert 25 == loaded.metadata.n_pairs
    assert {"dt": 1.0} == loaded.metadata.params


def test_header_comments(tmp_path: Path, pairs: TransitionPairs) -> None:
    path, _ = write_dataset(tmp_path / "spring.csv", pairs)

    frame, header = read_csv(path)

    assert path.read_text(encoding="utf-8").startswith("# tool: nisqueeze\n")
    assert {"tool", "version", "seed", "config_hash"} == set(header)
    assert "4" == header["seed"]
    assert column_names(3) == list(frame.columns)


def test_missing_sidecar(tmp_path: Path, pairs: TransitionPairs) -> None:
    path, sidecar = write_dataset(tmp_path / "spring.csv", pairs)
    sidecar.unlink()

    with pytest.raises(DatasetError, match="sidecar"):
        read_dataset(path)

    assert 25 == len(read_dataset(path, DatasetMetadata(3, "spring")))


def test_wrong_columns(tmp_path: Path, pairs: TransitionPairs) -> None:
    path, _ = write_dataset(tmp_path / "spring.csv", pairs)

    with pytest.raises(DatasetError, match="expected columns"):
        read_dataset(path, DatasetMetadata(2, "spring"))


def test_non_finite_values(tmp_path: Path) -> None:
    path = tmp_path / "bad.csv"
    path.write_text("x0,x1,xn0,xn1\n1,2,3,nan\n", encoding="utf-8")

    with pytest.raises(DatasetError, match="non-finite"):
        read_dataset(path, DatasetMetadata(2, "spring"))


def test_pair_count_must_match_metadata(tmp_path: Path, pairs: TransitionPairs) -> None:
    path, _ = write_dataset(tmp_path / "spring.csv", pairs)

    with pytest.raises(DatasetError, match="announces 30 pairs"):
        read_dataset(path, DatasetMetadata(3, "spring", n_pairs=30))


def test_unreadable_file(tmp_path: Path) -> None:
    with pytest.raises(DatasetError):
        read_dataset(tmp_path / "absent.csv", DatasetMetadata(2, "spring"))


def test_pair_shapes_are_checked() -> None:
    with pytest.raises(DatasetError):
        make_pairs(np.zeros((4, 2)), np.zeros((4, 3)))
    with pytest.raises(DatasetError):
        TransitionPairs(np.zeros((4, 2)), np.zeros((4, 2)), DatasetMetadata(3, "spring"))


@pytest.mark.parametrize(("n", "fraction", "n_val"), [(100, 0.1, 10), (2, 0.1, 1), (5, 0.99, 4)])
def test_split_sizes(n: int, fraction: float, n_val: int) -> None:
    x = np.arange(2.0 * n).reshape(n, 2)
    pairs = make_pairs(x, x + 1.0)

    train, val = pairs.split(fraction, np.random.default_rng(0))

    assert n_val == len(val)
    assert n - n_val == len(train)
    assert sorted(np.concatenate([train.x[:, 0], val.x[:, 0]]).tolist()) == x[:, 0].tolist()
    assert_array_equal(train.x + 1.0, train.x_next)


def test_split_needs_two_pairs() -> None:
    with pytest.raises(DatasetError):
        make_pairs(np.zeros((1, 2)), np.zeros((1, 2))).split(0.1, np.random.default_rng(0))
