"""Finitary incidence rings FI(P, Z_n) of finite preorders, and the
decomposition of their Jordan isomorphisms."""

from .algebra import TargetAlgebra
from .errors import (
    BadLabel,
    ConfigError,
    ContextMismatch,
    HypothesisViolated,
    IncidenceError,
    JordanCheckFailed,
    ModulusMismatch,
    NoDecomposition,
    NotInvertible,
    PreconditionFailed,
    TooLarge,
)
from .fialg import FIContext, FinSeries, chain, convolve, full_matrix_context, restrict, split_dz
from .jordan import (
    AdditiveMap,
    Check,
    DecompReport,
    Verdict,
    compose,
    full_sum_decompose,
    identity_map,
    inner_auto,
    is_antihom,
    is_hom,
    is_jordan_hom,
    j_twist,
    near_sum_compose,
    near_sum_decompose,
    order_reversal_antiauto,
    prime_parts,
    psi_theta_on_fz,
)
from .order import build_preorder, check_class_size_hypothesis, quotient
from .ring import MatZn, RingZn, enumerate_idempotents, mat_inverse, zn_arith

__version__ = "0.1.0"
