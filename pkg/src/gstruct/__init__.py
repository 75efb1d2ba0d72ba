"""Exact computations for graded Lie algebras, their prolongations,
generalized Spencer cohomology and constant structure functions."""

__version__ = "0.1.0"

from .errors import (BracketInconsistencyError, GStructError, NonTransitiveError,
                     SchemaError, SingularFrameError, TruncationError, ValidationError)
from .glacore import (GradedLieAlgebra, GradedVectorSpace, MatrixLieAlgebra, Metric,
                      check_jacobi, check_transitivity, derivations_degree0, is_fundamental)
from .prolong import prolong_full, prolong_step, tanaka_finite_type_reduction
from .spencer import (complement_select, complement_verify, condition_C_check,
                      cohomology_dim, invariant_index_sets, quasi_involutive)
from .models import (ConstantStructureFunction, check_admissible, corollary_checks,
                     fundamental_residuals, pre_cartan_verdict)

__all__ = [
    "BracketInconsistencyError", "ConstantStructureFunction", "GStructError",
    "GradedLieAlgebra", "GradedVectorSpace", "MatrixLieAlgebra", "Metric",
    "NonTransitiveError", "SchemaError", "SingularFrameError", "TruncationError",
    "ValidationError", "check_admissible", "check_jacobi", "check_transitivity",
    "cohomology_dim", "complement_select", "complement_verify", "condition_C_check",
    "corollary_checks", "derivations_degree0", "fundamental_residuals",
    "invariant_index_sets", "is_fundamental", "pre_cartan_verdict", "prolong_full",
    "prolong_step", "quasi_involutive", "tanaka_finite_type_reduction",
]
