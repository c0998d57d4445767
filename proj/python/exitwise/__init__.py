"""Exact simulation of diffusion exit times and positions from an interval."""

from ._core import (
    AbortMaxTerms,
    ExitwiseError,
    InvalidArgument,
    __version__,
    brownian_exit,
    conditional,
    density,
    diffusion_exit,
    efficiency_bound_symmetric,
    efficiency_bound_u1,
    efficiency_bound_u2,
    erf,
    erfc,
    gauss_cdf,
    gauss_pdf,
    ks_two_sample,
    laplace_cosh,
    survival_probability,
    validate,
)

__all__ = [
    "AbortMaxTerms",
    "ExitwiseError",
    "InvalidArgument",
    "__version__",
    "brownian_exit",
    "conditional",
    "density",
    "diffusion_exit",
    "efficiency_bound_symmetric",
    "efficiency_bound_u1",
    "efficiency_bound_u2",
    "erf",
    "erfc",
    "gauss_cdf",
    "gauss_pdf",
    "ks_two_sample",
    "laplace_cosh",
    "survival_probability",
    "validate",
]
