import numpy as np
import pytest
from numpy.testing import assert_allclose
from tapegrad import NonScalarRootError, Parameter, ShapeMismatchError, Tensor, backward, ops, topological_order, vjp


def test_square_of_three_has_gradient_six() -> None:
    x = Parameter("x", 3.0)

    grads = backward(ops.mul(x, x))

    assert 6.0 == grads["x"].item()


def test_relu_gradient_vanishes_for_negative_input() -> None:
    x = Parameter("x", -1.0)

    grads = backward(ops.relu(x))

    assert 0.0 == grads["x"].item()


def test_non_scalar_root_is_rejected() -> None:
    x = Parameter("x", np.ones(3))

    with pytest.raises(NonScalarRootError):
        backward(ops.scale(x, 2.0))


def test_unreachable_parameter_gets_zero_gradient() -> None:
    x = Parameter("x", np.ones(2))
    unused = Parameter("unused", np.ones((2, 3)))

    grads = backward(ops.sum(x), [x, unused])

    assert_allclose(np.zeros((2, 3)), grads["unused"].data)


def test_topological_order_visits_shared_nodes_once() -> None:
    x = Parameter("x", np.ones(2))
    h = ops.tanh(x)
    root = ops.sum(ops.add(h, h))

    order = topological_order(root)

    assert len(order) == len({t.uid for t in order})
    assert order.index(x) < order.index(h) < order.index(root)


def test_vjp_with_explicit_cotangent() -> None:
    x = Tensor(np.array([1.0, 2.0]), requires_grad=True)
    y = ops.mul(x, x)

    (grad,) = vjp(y, np.array([1.0, 10.0]), [x])

    assert_allclose(np.array([2.0, 40.0]), grad)


def test_vjp_rejects_mismatched_cotangent() -> None:
    x = Tensor(np.ones(2), requires_grad=True)

    with pytest.raises(ShapeMismatchError):
        vjp(ops.neg(x), np.ones(3), [x])


def test_parameter_assign_checks_shape() -> None:
    p = Parameter("w", np.zeros((2, 2)))
    p.assign(np.eye(2))

    assert_allclose(np.eye(2), p.data)
    with pytest.raises(ShapeMismatchError):
        p.assign(np.zeros(3))
