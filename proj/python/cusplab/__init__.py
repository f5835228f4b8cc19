"""Python access to the cusplab C++ core. All quantities are in scaled units, hbar^2/(2 mu) = 1."""

from ._core import (
    CuspError,
    PotentialModel,
    analytic_i,
    bessel_i,
    bessel_i_sym,
    bessel_j,
    bessel_k,
    bessel_y,
    classify,
    cusp_f,
    expansion_terms,
    fundamental_residual,
    gamma,
    irregular_g,
    legendre,
    run_config,
    series_profiles,
    small_parameter,
    solve,
    wronskian,
)

__all__ = [
    "CuspError",
    "PotentialModel",
    "analytic_i",
    "bessel_i",
    "bessel_i_sym",
    "bessel_j",
    "bessel_k",
    "bessel_y",
    "classify",
    "cusp_f",
    "expansion_terms",
    "fundamental_residual",
    "gamma",
    "irregular_g",
    "legendre",
    "run_config",
    "series_profiles",
    "small_parameter",
    "solve",
    "wronskian",
]
