"""Exception hierarchy shared by every kummerscan module."""

from __future__ import annotations


class KummerScanError(Exception):
    """Base class for all errors raised by kummerscan."""


class DomainError(KummerScanError, ValueError):
    """A parameter or argument lies outside the supported domain."""


class PrecisionError(KummerScanError, ArithmeticError):
    """A requested tolerance could not be met below the precision ceiling."""


class DivergentSeries(KummerScanError, ArithmeticError):
    """A hypergeometric series was requested outside its convergence region."""


class GridMismatch(KummerScanError):
    """A result file on disk was produced from a different scan grid."""
