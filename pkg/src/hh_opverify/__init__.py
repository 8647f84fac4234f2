"""Numerical checks of operator Hermite-Hadamard inequalities for preinvex functions."""
from .eta import (
    EtaMap,
    OperatorSet,
    PathPoint,
    check_condition_C,
    check_eq_2_2,
    check_invex,
    get_eta,
    make_convex_eta,
    make_eta1,
    make_eta2,
    make_eta3,
)
from .hh import (
    ChainReport,
    EstimateReport,
    convex_specialization,
    corollary1_check,
    hh_chain,
    operator_integral,
    scalar_hh,
    scalar_trapezoid,
    trapezoid_estimate,
    trapezoid_estimate_norm,
)
from .linalg import (
    HermitianMatrix,
    ScalarFunction,
    SpectralDecomposition,
    apply_function,
    check_property_P,
    eigh,
    is_psd,
    loewner_leq,
    operator_norm,
)
from .preinvex import (
    PreinvexityReport,
    RayleighCurve,
    check_operator_preinvex,
    check_phi_convexity,
    check_prop1_equivalence,
    phi,
)

__version__ = "0.1.0"
