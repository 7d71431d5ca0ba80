"""Exact symbolic Finsler geometry with a numeric jet oracle.

Given a Finsler function F (supplied as F**2) in any dimension >= 2, the
package computes the fundamental tensors, canonical spray, nonlinear
connection, and the torsions and curvatures of the Cartan, Berwald,
Chern, and Hashiguchi connections, all as exact canonical expressions,
and cross-checks every object numerically via nested dual numbers.
"""

from .expr import (
    Context,
    DomainError,
    Expr,
    ExprError,
    NumericPoint,
    UnknownIdentifierError,
    Var,
    ZeroStatus,
    canonicalize,
    differentiate,
    eval_at,
    is_zero,
    substitute,
)
from .parsing import ParseError, parse, to_latex, to_text
from .tensor import (
    DOWN,
    UP,
    Symmetry,
    SymmetryViolation,
    Tensor,
    VarianceMismatch,
    alternate,
    antisymmetric,
    contract_product,
    define,
    kronecker,
    move_index,
    nonzero_components,
    symmetric,
    tensor_add,
    zero_tensor,
)
from .geometry import (
    Classification,
    ConnectionKind,
    ConnectionTriple,
    Constraint,
    DegenerateMetric,
    FinslerStructure,
    Geometry,
    GeometryError,
    NotHomogeneous,
    build,
)
from .lowering import (
    EquivalenceFailure,
    LoweringPlan,
    UnsupportedObject,
    lowered_form,
    node_counts,
    simplify_via_lowering,
)
from .oracle import (
    NumericGeometry,
    SamplingExhausted,
    SingularMetricAt,
    VerificationReport,
    numeric_object,
    sample_points,
    verify,
    verify_many,
)
from .registry import UnknownObjectError, base_object_ids, resolve

__version__ = "0.1.0"

__all__ = [
    "Context", "DomainError", "Expr", "ExprError", "NumericPoint",
    "UnknownIdentifierError", "Var", "ZeroStatus", "canonicalize",
    "differentiate", "eval_at", "is_zero", "substitute",
    "ParseError", "parse", "to_latex", "to_text",
    "DOWN", "UP", "Symmetry", "SymmetryViolation", "Tensor",
    "VarianceMismatch", "alternate", "antisymmetric", "contract_product",
    "define", "kronecker", "move_index", "nonzero_components", "symmetric",
    "tensor_add", "zero_tensor",
    "Classification", "ConnectionKind", "ConnectionTriple", "Constraint",
    "DegenerateMetric", "FinslerStructure", "Geometry", "GeometryError",
    "NotHomogeneous", "build",
    "EquivalenceFailure", "LoweringPlan", "UnsupportedObject",
    "lowered_form", "node_counts", "simplify_via_lowering",
    "NumericGeometry", "SamplingExhausted", "SingularMetricAt",
    "VerificationReport", "numeric_object", "sample_points", "verify",
    "verify_many",
    "UnknownObjectError", "base_object_ids", "resolve",
    "__version__",
]
