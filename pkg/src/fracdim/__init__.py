"""Fractional integrals of bivariate functions and box dimension of their graphs."""

from fracdim.boxdim import (
    BoxCountCurve,
    DimensionEstimate,
    box_count,
    box_count_curve,
    estimate_dimension,
    lemma31_bounds,
)
from fracdim.errors import AlignmentError, DomainError, InvalidSpecError
from fracdim.frac_integral import (
    FractionalOrder,
    KatugampolaParams,
    OperatorKind,
    OperatorSpec,
    hadamard_point,
    hadamard_point_1d,
    integrate_grid,
    katugampola_point,
    rho_limit_gap,
)
from fracdim.oracle import OracleResult, direct_singular
from fracdim.special import QuadratureRule, gamma, jacobi_rule
from fracdim.surfaces import (
    Rect,
    SampledSurface,
    Surface,
    SurfaceKind,
    SurfaceSpec,
    make_surface,
    range_over_cell,
    sample_surface,
)

__version__ = "0.1.0"
