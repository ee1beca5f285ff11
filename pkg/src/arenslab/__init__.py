"""Numerical laboratory for Arens regularity of projective tensor products of Schatten classes.

Finite truncations of Hilbert-Schmidt and Schatten-class operators, bilinear
forms given by conjugate-linear Riesz maps, double-limit grids with
iterated-limit detection, and two-sided estimates of projective tensor norms.
"""

__version__ = "0.1.0"

from .biregularity import (
    BiregularityVerdict,
    BiregularityViolation,
    LimitEstimate,
    LimitGrid,
    SequenceFamily,
    Status,
    build_grid,
    evaluate,
    finite_dim_suite,
    iterated_limits,
    schur_tail_monitor,
    schur_scenario,
    verdict,
)
from .forms import (
    BilinearForm,
    RieszMap,
    Superoperator,
    point_form,
    riesz_form,
    superop_from_vector_action,
    triangular_phi,
)
from .matrix_core import ConvergenceError, DimensionError, hs_inner, matrix_unit, svd
from .operators import (
    coordinate_projection,
    dual_exponent,
    operator_norm,
    rank_one,
    schatten_norm,
    schur,
    schur_tail_bound,
    tail_sup,
)
from .scenarios import CATALOG
from .tensor_norms import (
    InfeasibleDecompositionError,
    ProjectiveNormEstimate,
    TensorElement,
    nuclear_oracle,
    projective_lower,
    projective_norm,
    projective_upper,
)
