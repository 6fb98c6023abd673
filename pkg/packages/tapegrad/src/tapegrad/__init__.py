from . import ops
from .__version__ import __version__
from .errors import NonFiniteError, NonScalarRootError, OpError, ShapeMismatchError, TapegradError
from .graph import backward, propagate, topological_order, vjp
from .jacobian import batch_jacobian, jacobian, numeric_gradient, numeric_jacobian
from .tensor import Edge, Node, Op, Parameter, Tensor, as_tensor, is_grad_enabled, no_grad

__all__ = [
    "Edge",
    "NonFiniteError",
    "NonScalarRootError",
    "Node",
    "Op",
    "OpError",
    "Parameter",
    "ShapeMismatchError",
    "TapegradError",
    "Tensor",
    "__version__",
    "as_tensor",
    "backward",
    "batch_jacobian",
    "is_grad_enabled",
    "jacobian",
    "no_grad",
    "numeric_gradient",
    "numeric_jacobian",
    "ops",
    "propagate",
    "topological_order",
    "vjp",
]
