"""Point counts, Sato-Tate groups and moment statistics for y^ell = x(x^ell - 1)."""

__version__ = "0.1.0"

from .arith import (
    CyclotomicInteger,
    DlogTable,
    cyclo_conj,
    cyclo_mul,
    cyclo_reduce,
    cyclo_trace,
    dlog_table,
    primitive_root,
    trace_of_zeta_power,
)
from .counting import PointCountRecord, count_points, count_points_naive, jacobi_sum, jacobi_trace, normalized_a1
from .moments import exact_a1_moment, exact_a1_moment_component0, mc_moments, u1_moment
from .stgroup import (
    SignedBlockMatrix,
    component_order,
    conjugate_alpha,
    exponent_set,
    galois_action,
    gamma_matrix,
    is_symplectic,
    one_form_basis,
)
