"""Variance-homogeneity, trend and mean tests for grouped samples."""

from ._core import (
    DegenerateDataError,
    KurtosisCorrectionError,
    adaptive,
    anova,
    bartlett,
    box_anderson,
    chi_sq_sf,
    f_sf,
    kurtosis,
    levene,
    ln_gamma,
    reg_inc_beta,
    reg_inc_gamma_lower,
    simulate,
    std_normal_sf,
    trend,
    welch,
)

__all__ = [
    "DegenerateDataError",
    "KurtosisCorrectionError",
    "adaptive",
    "anova",
    "bartlett",
    "box_anderson",
    "chi_sq_sf",
    "f_sf",
    "kurtosis",
    "levene",
    "ln_gamma",
    "reg_inc_beta",
    "reg_inc_gamma_lower",
    "simulate",
    "std_normal_sf",
    "trend",
    "welch",
]

__version__ = "0.1.0"
