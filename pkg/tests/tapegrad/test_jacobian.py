import numpy as np
import pytest
from numpy.testing import assert_allclose
from tapegrad import ShapeMismatchError, Tensor, batch_jacobian, jacobian, numeric_jacobian, ops


def _coupling(x: Tensor) -> Tensor:
    """A two-dimensional affine coupling: v' = v * exp(tanh(u)) + u^2."""
    u, v = ops.take(x, 0, 1), ops.take(x, 1, 2)
    return ops.concat([u, ops.add(ops.mul(v, ops.exp(ops.tanh(u))), ops.square(u))])


def test_jacobian_of_doubling_is_twice_identity() -> None:
    result = jacobian(lambda x: ops.scale(x, 2.0), np.array([0.3, -1.0, 4.0]))

    assert_allclose(2.0 * np.eye(3), result.data)


def test_jacobian_of_constant_is_zero() -> None:
    result = jacobian(lambda x: Tensor(np.array([1.0, 2.0])), np.array([0.5, 0.5, 0.5]))

    assert_allclose(np.zeros((2, 3)), result.data)


def test_jacobian_of_coupling_matches_finite_differences() -> None:
    point = np.array([0.4, -1.3])

    def f(x: np.ndarray) -> np.ndarray:
        return _coupling(Tensor(x)).data

    expected = numeric_jacobian(f, point)
    result = jacobian(_coupling, point).data

    assert_allclose(expected, result, rtol=1e-6, atol=1e-9)
    assert 0.0 == result[0, 1]


def test_batch_jacobian_matches_pointwise_jacobians() -> None:
    rng = np.random.default_rng(3)
    w = rng.standard_normal((3, 3))
    points = rng.standard_normal((5, 3))

    def f(x: Tensor) -> Tensor:
        return ops.tanh(ops.matmul(x, Tensor(w)))

    batch = batch_jacobian(f, points)

    assert (5, 3, 3) == batch.shape
    for i, point in enumerate(points):
        assert_allclose(jacobian(f, point).data, batch[i], rtol=1e-10, atol=1e-14)


def test_jacobian_needs_a_vector_point() -> None:
    with pytest.raises(ShapeMismatchError):
        jacobian(lambda x: x, np.ones((2, 2)))

    with pytest.raises(ShapeMismatchError):
        batch_jacobian(lambda x: x, np.ones(3))
