"""Exact computer algebra for genus-0 conformal blocks of vertex operator
algebras: coordinate changes, graded sewing series, multi-point propagation
with a free-boson oracle, a strong-residue-criterion checker, and
permutation-twisted modules over tensor-power algebras."""

from .blocks import (
    INF,
    RationalExpr,
    heisenberg_correlator,
    pairing_block,
    permutation_check,
    propagate_eval,
    propagate_expand,
    reconstruct_global,
    residue_criterion,
)
from .coordchange import (
    CoordChange,
    apply_coord_change,
    chart_transition,
    compose,
    invert,
    kth_root_shift,
    solve_coefficients,
    taylor_coefficients,
)
from .scalars import Scalar, ScalarError, frac_binomial
from .series import FracLaurent, TruncationError, binomial_expand
from .sewing import TrivialModule, casimir_shells, converge_diag, sew, sew_propagate_commute_check
from .twist import (
    TwistedModule,
    check_equivariance,
    check_grading,
    check_jacobi,
    eigencomponents,
    factorization_check,
    product_expansion_check,
)
from .voa import (
    CutoffOverflow,
    DualModule,
    FockModule,
    GradedVector,
    HeisenbergAlgebra,
    TensorPowerAlgebra,
    VirasoroAlgebra,
    conformal_vector,
    contragredient_mode,
    cycle_rotate,
    dual_of,
    dual_pairing,
    mode_action,
    tensor_vector,
    virasoro_mode,
)

__all__ = [
    "CoordChange",
    "CutoffOverflow",
    "DualModule",
    "FockModule",
    "FracLaurent",
    "GradedVector",
    "HeisenbergAlgebra",
    "INF",
    "RationalExpr",
    "Scalar",
    "ScalarError",
    "TensorPowerAlgebra",
    "TrivialModule",
    "TruncationError",
    "TwistedModule",
    "VirasoroAlgebra",
    "apply_coord_change",
    "binomial_expand",
    "casimir_shells",
    "chart_transition",
    "check_equivariance",
    "check_grading",
    "check_jacobi",
    "compose",
    "conformal_vector",
    "contragredient_mode",
    "converge_diag",
    "cycle_rotate",
    "dual_of",
    "dual_pairing",
    "eigencomponents",
    "factorization_check",
    "frac_binomial",
    "heisenberg_correlator",
    "invert",
    "kth_root_shift",
    "mode_action",
    "pairing_block",
    "permutation_check",
    "product_expansion_check",
    "propagate_eval",
    "propagate_expand",
    "reconstruct_global",
    "residue_criterion",
    "sew",
    "sew_propagate_commute_check",
    "solve_coefficients",
    "taylor_coefficients",
    "tensor_vector",
    "virasoro_mode",
]

__version__ = "0.1.0"
