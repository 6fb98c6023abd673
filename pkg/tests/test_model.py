import numpy as np
import pytest
from nisqueeze.errors import ConfigurationError, DimensionMismatchError, NumericRangeError
from nisqueeze.model import BaselineModel, NisModel
from numpy.testing import assert_allclose, assert_array_equal

from tests.conftest import randomize, zero


def make_model(p: int = 4, q: int = 2, seed: int = 0) -> NisModel:
    return NisModel(p, q, rng=np.random.default_rng(seed), hidden=8, blocks=2)


def test_fresh_model_encodes_by_projection() -> None:
    model = make_model()

    assert_array_equal([1.0, 2.0], model.encode(np.array([1.0, 2.0, 3.0, 4.0])))
    assert_array_equal([3.0, 4.0], model.dropped(np.array([1.0, 2.0, 3.0, 4.0])))


def test_fresh_model_decodes_by_padding() -> None:
    model = make_model()

    assert_array_equal([1.0, 2.0, 0.0, 0.0], model.decode(np.array([1.0, 2.0]), deterministic=True))
    assert_array_equal([1.0, 2.0, 5.0, 6.0], model.decode(np.array([1.0, 2.0]), np.array([5.0, 6.0])))


@pytest.mark.parametrize(("p", "q"), [(2, 1), (4, 2), (5, 3), (6, 6)])
def test_encode_and_decode_are_consistent(p: int, q: int) -> None:
    rng = np.random.default_rng(p * 10 + q)
    model = make_model(p, q)
    randomize(model.bijector, rng, scale=0.3)
    x = rng.normal(size=(20, p))

    y = model.encode(x)
    z = model.dropped(x)
    assert (20, q) == y.shape
    assert (20, p - q) == z.shape
    assert_allclose(x, model.decode(y, z if q < p else None), atol=1e-9)

    y_new = rng.normal(size=(20, q))
    z_new = rng.normal(size=(20, p - q)) if q < p else None
    assert_allclose(y_new, model.encode(model.decode(y_new, z_new)), atol=1e-9)


def test_stochastic_decode_depends_on_rng_only() -> None:
    model = make_model()
    y = np.array([[0.5, -0.5]])

    first = model.decode(y, rng=np.random.default_rng(3))
    second = model.decode(y, rng=np.random.default_rng(3))

    assert_array_equal(first, second)
    assert not np.array_equal(first, model.decode(y, deterministic=True))


def test_stochastic_decode_requires_a_generator() -> None:
    model = make_model()

    with pytest.raises(ConfigurationError, match="random generator"):
        model.decode(np.array([0.5, -0.5]))
    with pytest.raises(ConfigurationError, match="random generator"):
        model.predict_micro(np.zeros(4))
    with pytest.raises(ConfigurationError, match="random generator"):
        model.rollout(np.zeros(4), 2)


def test_macro_step_adds_drift() -> None:
    model = make_model()
    zero(model.dynamics)
    y = np.array([[1.0, -2.0], [0.0, 3.0]])

    assert_array_equal(y, model.macro_step(y))

    last_bias = [param for name, param in model.dynamics.named_parameters() if name.endswith(".b2")][0]
    last_bias.assign(np.array([0.5, 1.0]))
    assert_array_equal(y + [0.5, 1.0], model.macro_step(y))


def test_predict_micro_with_full_macro_space() -> None:
    model = make_model(3, 3)
    zero(model.dynamics)
    x = np.array([0.1, 0.2, 0.3])

    assert_array_equal(x, model.predict_micro(x))


def test_rollout_with_zero_drift_is_constant() -> None:
    model = make_model()
    zero(model.dynamics)
    x0 = np.array([1.0, 2.0, 3.0, 4.0])

    trajectory = model.rollout(x0, 5, deterministic=True)

    assert (6, 2) == trajectory.macro.shape
    assert (6, 4) == trajectory.micro.shape
    assert_array_equal(x0, trajectory.micro[0])
    assert_array_equal(np.tile([1.0, 2.0], (6, 1)), trajectory.macro)
    assert_array_equal(np.tile([1.0, 2.0, 0.0, 0.0], (5, 1)), trajectory.micro[1:])


def test_rollout_first_step_matches_prediction() -> None:
    rng = np.random.default_rng(8)
    model = make_model()
    randomize(model, rng, scale=0.2)
    x0 = rng.normal(size=4)

    trajectory = model.rollout(x0, 1, deterministic=True)

    assert_allclose(model.predict_micro(x0, deterministic=True), trajectory.micro[1], rtol=1e-12)


def test_rollout_rejects_zero_steps() -> None:
    with pytest.raises(ConfigurationError):
        make_model().rollout(np.zeros(4), 0)


def test_rollout_stops_when_the_macro_state_explodes() -> None:
    model = make_model()
    zero(model.dynamics)
    last_bias = [param for name, param in model.dynamics.named_parameters() if name.endswith(".b2")][0]
    last_bias.assign(np.array([1e11, 0.0]))

    with pytest.raises(NumericRangeError, match="step 11"):
        model.rollout(np.zeros(4), 20, deterministic=True)


@pytest.mark.parametrize(("p", "q"), [(1, 1), (4, 0), (4, 5)])
def test_invalid_dimensions(p: int, q: int) -> None:
    with pytest.raises(ConfigurationError):
        NisModel(p, q, rng=np.random.default_rng(0))


def test_dimension_errors() -> None:
    model = make_model()

    with pytest.raises(DimensionMismatchError):
        model.encode(np.zeros((3, 5)))
    with pytest.raises(DimensionMismatchError):
        model.macro_step(np.zeros(4))
    with pytest.raises(DimensionMismatchError):
        model.decode(np.zeros(2), np.zeros(3))
    with pytest.raises(DimensionMismatchError):
        model.rollout(np.zeros((2, 4)), 3)


def test_baseline_model_shapes() -> None:
    model = BaselineModel(3, 5, rng=np.random.default_rng(0))

    assert (7, 3) == model.predict_micro(np.zeros((7, 3))).shape
    assert "hidden=5" in repr(model)
