"""High-precision evaluation and monotonicity probing of exponential-remainder
and hypergeometric ratios."""

__version__ = "0.1.0"

from .errors import DivergentSeries, DomainError, GridMismatch, KummerScanError, PrecisionError
from .sfcore import (
    EvalResult,
    eval_to_tolerance,
    exp_remainder,
    exp_remainder_via_gamma,
    exp_remainder_via_kummer,
    kummer_1f1,
    kummer_1f1_dx,
    pfq,
    pochhammer,
    reg_lower_gamma,
)
from .ratios import (
    RatioSpec,
    f_ratio,
    g_ratio,
    h_abc,
    h_pfq,
    ratio_derivative,
    ratio_limits,
)
from .monotone import MonotoneConfig, Verdict, check_monotone, derivative_sign, locate_sign_change

__all__ = [
    "DivergentSeries",
    "DomainError",
    "EvalResult",
    "GridMismatch",
    "KummerScanError",
    "MonotoneConfig",
    "PrecisionError",
    "RatioSpec",
    "Verdict",
    "check_monotone",
    "derivative_sign",
    "eval_to_tolerance",
    "exp_remainder",
    "exp_remainder_via_gamma",
    "exp_remainder_via_kummer",
    "f_ratio",
    "g_ratio",
    "h_abc",
    "h_pfq",
    "kummer_1f1",
    "kummer_1f1_dx",
    "locate_sign_change",
    "pfq",
    "pochhammer",
    "ratio_derivative",
    "ratio_limits",
    "reg_lower_gamma",
]
