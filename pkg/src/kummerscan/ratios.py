"""The four ratio families and their analytic x-derivatives.

``f_n`` is the exponential-remainder ratio ``R_{n-1} R_{n+1} / R_n^2``,
``g_n`` its Kummer form, ``h(a, b, c, x)`` the abc ratio of three 1F1 values
and ``h_pq`` the same ratio built from pFq. Every ratio ``F_- F_+ / F_0^2`` is
differentiated through its logarithmic derivative
``h'/h = F_-'/F_- + F_+'/F_+ - 2 F_0'/F_0``, so one pass over each series
yields both the value and the slope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Integral, Real
from typing import Any, NamedTuple, Sequence

import gmpy2
from gmpy2 import mpfr

from .errors import DivergentSeries, DomainError
from .sfcore import (
    DEFAULT_PREC,
    BigReal,
    Number,
    _hypsum,
    _reg_lower_gamma,
    _rounding,
    gamma_p_log_derivative,
    to_bigreal,
    unit_roundoff,
    working_context,
)

UNKNOWN = "UNKNOWN"


class Family(str, Enum):
    F_REMAINDER = "f"
    G_KUMMER = "g"
    H_ABC = "h_abc"
    H_PFQ = "h_pfq"
    RECIPROCAL = "reciprocal"


def _canon(v: Any) -> int | float | str | Fraction:
    if isinstance(v, bool):
        raise DomainError("booleans are not valid ratio parameters")
    if isinstance(v, Integral):
        return int(v)
    if isinstance(v, (str, Fraction)):
        to_bigreal(v)
        return v
    if isinstance(v, Real):
        out = float(v)
        if not math.isfinite(out):
            raise DomainError(f"non-finite parameter {v!r}")
        return out
    raise DomainError(f"cannot use {v!r} as a ratio parameter")


def _json_num(v: Any) -> Any:
    return str(v) if isinstance(v, Fraction) else v


def _from_json_num(v: Any) -> Any:
    if isinstance(v, str) and "/" in v:
        return Fraction(v)
    return v


@dataclass(frozen=True)
class RatioSpec:
    """Which ratio is meant, with its parameters.

    Use the constructors :meth:`f`, :meth:`g`, :meth:`h_abc`, :meth:`h_pfq`
    and :meth:`reciprocal` rather than filling fields by hand. For ``h_abc``
    the shift ``c`` is stored as ``|c|`` since ``h`` is even in ``c``.
    """

    family: Family
    n: int | None = None
    a: tuple = ()
    b: tuple = ()
    c: tuple = ()
    inner: RatioSpec | None = None
    extend_n0: bool = False

    def __post_init__(self) -> None:
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        if fam in (Family.F_REMAINDER, Family.G_KUMMER):
            n = self.n
            if not isinstance(n, Integral) or isinstance(n, bool):
                raise DomainError(f"{fam.value}_n needs an integer n, got {n!r}")
            lowest = 0 if self.extend_n0 else 1
            if n < lowest:
                hint = "" if self.extend_n0 else " (n = 0 needs extend_n0=True)"
                raise DomainError(f"{fam.value}_n needs n >= {lowest}, got n={n}{hint}")
            object.__setattr__(self, "n", int(n))
        elif fam in (Family.H_ABC, Family.H_PFQ):
            a = tuple(_canon(v) for v in self.a)
            b = tuple(_canon(v) for v in self.b)
            c = tuple(_canon(v) for v in self.c)
            if fam is Family.H_ABC:
                if not (len(a) == len(b) == len(c) == 1):
                    raise DomainError("h_abc takes scalar a, b, c")
                if to_bigreal(c[0]) < 0:
                    c = (_negate(c[0]),)
            if len(c) != len(b):
                raise DomainError(f"shift vector c must match b in length ({len(c)} != {len(b)})")
            p, q = len(a), len(b)
            if p > q + 1:
                raise DivergentSeries(f"{p}F{q} diverges for every x > 0 (p > q + 1)")
            for v in a:
                if not to_bigreal(v) > 0:
                    raise DomainError(f"needs every a_i > 0, got a={list(a)}")
            with gmpy2.context(precision=256):
                for bj, cj in zip(b, c):
                    if to_bigreal(cj) < 0:
                        raise DomainError(f"needs every c_j >= 0, got c={list(c)}")
                    if not to_bigreal(bj) - to_bigreal(cj) > 0:
                        raise DomainError(f"needs b_j - c_j > 0, got b={list(b)}, c={list(c)}")
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)
            object.__setattr__(self, "c", c)
        elif fam is Family.RECIPROCAL:
            if not isinstance(self.inner, RatioSpec):
                raise DomainError("reciprocal needs an inner RatioSpec")

    @classmethod
    def f(cls, n: int, extend_n0: bool = False) -> RatioSpec:
        return cls(Family.F_REMAINDER, n=n, extend_n0=extend_n0)

    @classmethod
    def g(cls, n: int, extend_n0: bool = False) -> RatioSpec:
        return cls(Family.G_KUMMER, n=n, extend_n0=extend_n0)

    @classmethod
    def h_abc(cls, a: Number, b: Number, c: Number) -> RatioSpec:
        return cls(Family.H_ABC, a=(a,), b=(b,), c=(c,))

    @classmethod
    def h_pfq(cls, a: Sequence[Number], b: Sequence[Number], c: Sequence[Number]) -> RatioSpec:
        return cls(Family.H_PFQ, a=tuple(a), b=tuple(b), c=tuple(c))

    @classmethod
    def reciprocal(cls, inner: RatioSpec) -> RatioSpec:
        return cls(Family.RECIPROCAL, inner=inner)

    @property
    def x_limit(self) -> float | None:
        """Exclusive upper end of the x-domain, or None when unbounded."""
        if self.family is Family.RECIPROCAL:
            return self.inner.x_limit
        if self.family is Family.H_PFQ and len(self.a) == len(self.b) + 1:
            return 1.0
        return None

    @property
    def is_flat(self) -> bool:
        """True when ``h`` is identically 1 (zero shift)."""
        if self.family is Family.RECIPROCAL:
            return self.inner.is_flat
        if self.family in (Family.H_ABC, Family.H_PFQ):
            return all(to_bigreal(v) == 0 for v in self.c)
        return False

    def label(self) -> str:
        fam = self.family
        if fam in (Family.F_REMAINDER, Family.G_KUMMER):
            return f"{fam.value}_{self.n}"
        if fam is Family.H_ABC:
            return f"h(a={self.a[0]}, b={self.b[0]}, c={self.c[0]})"
        if fam is Family.H_PFQ:
            return f"h_pq(a={list(self.a)}, b={list(self.b)}, c={list(self.c)})"
        return f"1/{self.inner.label()}"

    def to_dict(self) -> dict:
        fam = self.family
        if fam in (Family.F_REMAINDER, Family.G_KUMMER):
            out: dict = {"family": fam.value, "n": self.n}
            if self.extend_n0:
                out["extend_n0"] = True
            return out
        if fam is Family.H_ABC:
            return {"family": fam.value, "a": _json_num(self.a[0]),
                    "b": _json_num(self.b[0]), "c": _json_num(self.c[0])}
        if fam is Family.H_PFQ:
            return {"family": fam.value, "a": [_json_num(v) for v in self.a],
                    "b": [_json_num(v) for v in self.b], "c": [_json_num(v) for v in self.c]}
        return {"family": fam.value, "inner": self.inner.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> RatioSpec:
        fam = Family(d["family"])
        if fam in (Family.F_REMAINDER, Family.G_KUMMER):
            return cls(fam, n=d["n"], extend_n0=d.get("extend_n0", False))
        if fam is Family.H_ABC:
            return cls.h_abc(*(_from_json_num(d[k]) for k in ("a", "b", "c")))
        if fam is Family.H_PFQ:
            return cls.h_pfq(*([_from_json_num(v) for v in d[k]] for k in ("a", "b", "c")))
        return cls.reciprocal(cls.from_dict(d["inner"]))


def _negate(v: Any) -> Any:
    if isinstance(v, str):
        return v[1:] if v.startswith("-") else v
    return -v


@dataclass(frozen=True)
class RatioValue:
    """A ratio (or ratio-derivative) value with its error bounds.

    ``abs_error_bound`` is the primary bound for derivatives, whose value may
    sit at or near zero; ``rel_error_bound`` is infinite in that case.
    """

    value: BigReal
    rel_error_bound: BigReal
    abs_error_bound: BigReal
    defined_by_limit: bool = False
    precision_bits: int = DEFAULT_PREC

    def __post_init__(self) -> None:
        if self.rel_error_bound < 0 or self.abs_error_bound < 0:
            raise ValueError("error bounds must be nonnegative")

    def to_decimal(self, digits: int = 17) -> str:
        return format(self.value, f".{digits}g")


@dataclass(frozen=True)
class RatioPoint:
    """Value and x-derivative of a ratio at one point, with absolute bounds."""

    x: BigReal
    value: BigReal
    value_error: BigReal
    derivative: BigReal
    derivative_error: BigReal
    precision_bits: int
    defined_by_limit: bool = False


@dataclass(frozen=True)
class _Factor:
    weight: int
    value: BigReal
    rel: BigReal
    logder: BigReal
    logder_rel: BigReal


def _combine(factors: Sequence[_Factor], prec: int) -> tuple[BigReal, BigReal, BigReal, BigReal]:
    """Value, abs error, derivative, abs error of ``prod F_i^w_i``."""
    u = unit_roundoff(prec)
    value = mpfr(1)
    rel = mpfr(0)
    slope = mpfr(0)
    slope_err = mpfr(0)
    spread = mpfr(0)
    for fac in factors:
        w = abs(fac.weight)
        value *= fac.value ** fac.weight
        rel += w * (fac.rel + 2 * u)
        slope += fac.weight * fac.logder
        mag = w * abs(fac.logder)
        slope_err += mag * (fac.logder_rel + u)
        spread += mag
    slope_err += 2 * len(factors) * u * spread
    deriv = value * slope
    value_err = abs(value) * rel
    deriv_err = abs(value) * slope_err * (1 + rel) + abs(deriv) * (rel + 2 * u)
    return value, value_err, deriv, deriv_err


def _hyp_factor(weight: int, a: Sequence[BigReal], b: Sequence[BigReal], x: BigReal, prec: int) -> _Factor:
    s = _hypsum(a, b, x, prec, with_derivative=True)
    rnd = _rounding(s.terms, prec)
    rel_f = s.trunc + rnd
    rel_d = s.deriv_trunc + rnd
    return _Factor(weight, s.value, rel_f, s.deriv / s.value, rel_f + rel_d + unit_roundoff(prec))


def _h_point(a: tuple, b: tuple, c: tuple, x: BigReal, prec: int) -> tuple:
    av = [to_bigreal(v) for v in a]
    bv = [to_bigreal(v) for v in b]
    cv = [to_bigreal(v) for v in c]
    if all(v == 0 for v in cv):
        return mpfr(1), mpfr(0), mpfr(0), mpfr(0)
    minus = [bj - cj for bj, cj in zip(bv, cv)]
    plus = [bj + cj for bj, cj in zip(bv, cv)]
    factors = [
        _hyp_factor(1, av, minus, x, prec),
        _hyp_factor(1, av, plus, x, prec),
        _hyp_factor(-2, av, bv, x, prec),
    ]
    return _combine(factors, prec)


def _f_point(n: int, x: BigReal, prec: int) -> tuple:
    u = unit_roundoff(prec)
    factors = []
    for weight, s in ((1, n), (1, n + 2), (-2, n + 1)):
        if s == 0:
            # R_{-1} = e^x, i.e. P(0, x) = 1 for x > 0
            factors.append(_Factor(weight, mpfr(1), mpfr(0), mpfr(0), mpfr(0)))
            continue
        sv = mpfr(s)
        p, rel, _ = _reg_lower_gamma(sv, x, prec)
        logder = gamma_p_log_derivative(sv, x, p)
        factors.append(_Factor(weight, p, rel, logder, rel + 6 * u))
    return _combine(factors, prec)


def _bound(v: BigReal) -> BigReal:
    with gmpy2.context(precision=64, round=gmpy2.RoundUp):
        return mpfr(v)


def _round(v: BigReal, prec: int) -> tuple[BigReal, BigReal]:
    """``v`` rounded to ``prec`` bits and the error that rounding added."""
    r = mpfr(v, prec)
    return r, (mpfr(0) if r == v else abs(v) * unit_roundoff(prec))


def evaluate(spec: RatioSpec, x: Number, prec: int = DEFAULT_PREC) -> RatioPoint:
    """Value and derivative of ``spec`` at ``x`` with absolute error bounds.

    At ``x = 0`` the remainder ratio ``f_n`` is a 0/0 form; its continuous
    extension ``(n+1)/(n+2)`` and derivative limit ``2/((n+2)^2 (n+3))`` are
    returned with ``defined_by_limit`` set.
    """
    if not isinstance(prec, Integral) or prec < 2:
        raise DomainError(f"precision must be an integer >= 2 bits, got {prec!r}")
    with working_context(prec):
        xv = to_bigreal(x)
        if not xv >= 0:
            raise DomainError(f"ratios are defined for x >= 0, got x={x}")
        limit = spec.x_limit
        if limit is not None and xv >= limit:
            raise DivergentSeries(f"{spec.label()} needs x < {limit}, got x={x}")
        value, value_err, deriv, deriv_err, by_limit = _evaluate(spec, xv, prec)
        value_r, value_extra = _round(value, prec)
        deriv_r, deriv_extra = _round(deriv, prec)
        return RatioPoint(
            x=mpfr(xv, prec),
            value=value_r,
            value_error=_bound(value_err + value_extra),
            derivative=deriv_r,
            derivative_error=_bound(deriv_err + deriv_extra),
            precision_bits=prec,
            defined_by_limit=by_limit,
        )


def _evaluate(spec: RatioSpec, xv: BigReal, prec: int) -> tuple:
    fam = spec.family
    u = unit_roundoff(prec)
    if fam is Family.F_REMAINDER:
        n = spec.n
        if xv == 0:
            value = mpfr(n + 1) / (n + 2)
            deriv = mpfr(2) / ((n + 2) ** 2 * (n + 3))
            return value, abs(value) * 2 * u, deriv, abs(deriv) * 4 * u, True
        return (*_f_point(n, xv, prec), False)
    if fam is Family.G_KUMMER:
        return (*_h_point((1,), (spec.n + 2,), (1,), xv, prec), False)
    if fam in (Family.H_ABC, Family.H_PFQ):
        return (*_h_point(spec.a, spec.b, spec.c, xv, prec), False)
    # reciprocal: (1/v)' = -v'/v^2
    v, v_err, d, d_err, by_limit = _evaluate(spec.inner, xv, prec)
    rel_v = v_err / abs(v)
    inv = 1 / v
    inv_d = -d / (v * v)
    inv_err = abs(inv) * (rel_v * (1 + 2 * rel_v) + 2 * u)
    inv_d_err = (d_err + abs(d) * 3 * rel_v) / (v * v) * (1 + 3 * rel_v) + abs(inv_d) * 3 * u
    return inv, inv_err, inv_d, inv_d_err, by_limit


def _as_value(value: BigReal, abs_err: BigReal, by_limit: bool, prec: int) -> RatioValue:
    if value == 0:
        rel = mpfr(0) if abs_err == 0 else gmpy2.inf()
    else:
        with gmpy2.context(precision=64, round=gmpy2.RoundUp):
            rel = abs_err / abs(value)
    return RatioValue(value, rel, abs_err, by_limit, prec)


def ratio_value(spec: RatioSpec, x: Number, prec: int = DEFAULT_PREC) -> RatioValue:
    pt = evaluate(spec, x, prec)
    return _as_value(pt.value, pt.value_error, pt.defined_by_limit, prec)


def ratio_derivative(spec: RatioSpec, x: Number, prec: int = DEFAULT_PREC) -> RatioValue:
    """Analytic x-derivative of the ratio; closed-form limit at ``x = 0``."""
    pt = evaluate(spec, x, prec)
    return _as_value(pt.derivative, pt.derivative_error, pt.defined_by_limit, prec)


def f_ratio(n: int, x: Number, prec: int = DEFAULT_PREC, extend_n0: bool = False) -> RatioValue:
    """``f_n(x) = R_{n-1}(x) R_{n+1}(x) / R_n(x)^2``.

    For ``x > 0`` this is ``P(n, x) P(n+2, x) / P(n+1, x)^2`` with P the
    regularized lower incomplete gamma; the ``e^x`` factors cancel.
    """
    return ratio_value(RatioSpec.f(n, extend_n0), x, prec)


def f_upper_gap(n: int, x: Number, prec: int = DEFAULT_PREC, extend_n0: bool = False) -> RatioValue:
    """``1 - f_n(x)`` without cancellation, for certifying ``f_n(x) < 1``.

    With ``d = x^n e^-x / n!`` and ``P(n+1) = P(n) - d``, the gap equals
    ``d (P(n) (x/(n+1) - 1) + d) / P(n+1)^2``.
    """
    RatioSpec.f(n, extend_n0)
    if not isinstance(prec, Integral) or prec < 2:
        raise DomainError(f"precision must be an integer >= 2 bits, got {prec!r}")
    with working_context(prec):
        xv = to_bigreal(x)
        if not xv >= 0:
            raise DomainError(f"ratios are defined for x >= 0, got x={x}")
        u = unit_roundoff(prec)
        if xv == 0:
            gap = mpfr(1) / (n + 2)
            return _as_value(mpfr(gap, prec), _bound(gap * 2 * u), True, prec)
        if n == 0:
            p_n, e_n = mpfr(1), mpfr(0)
        else:
            p_n, e_n, _ = _reg_lower_gamma(mpfr(n), xv, prec)
        p_n1, e_n1, _ = _reg_lower_gamma(mpfr(n + 1), xv, prec)
        d = xv ** n * gmpy2.exp(-xv) / mpfr(gmpy2.fac(n))
        lead = p_n * (xv / (n + 1) - 1)
        inner = lead + d
        scale = d / (p_n1 * p_n1)
        gap = scale * inner
        inner_err = abs(lead) * (e_n + 3 * u) + d * 4 * u + abs(inner) * u
        err = scale * inner_err * (1 + 2 * e_n1 + 6 * u) + abs(gap) * (2 * e_n1 + 6 * u)
        return _as_value(mpfr(gap, prec), _bound(err + abs(gap) * u), False, prec)


def g_ratio(n: int, x: Number, prec: int = DEFAULT_PREC, extend_n0: bool = False) -> RatioValue:
    """``g_n(x) = 1F1(1; n+1; x) 1F1(1; n+3; x) / 1F1(1; n+2; x)^2``."""
    return ratio_value(RatioSpec.g(n, extend_n0), x, prec)


def h_abc(a: Number, b: Number, c: Number, x: Number, prec: int = DEFAULT_PREC) -> RatioValue:
    """``1F1(a; b-c; x) 1F1(a; b+c; x) / 1F1(a; b; x)^2``; even in ``c``."""
    return ratio_value(RatioSpec.h_abc(a, b, c), x, prec)


def h_pfq(
    a: Sequence[Number], b: Sequence[Number], c: Sequence[Number], x: Number, prec: int = DEFAULT_PREC
) -> RatioValue:
    """``pFq(a; b-c; x) pFq(a; b+c; x) / pFq(a; b; x)^2`` with ``b +- c`` componentwise."""
    return ratio_value(RatioSpec.h_pfq(a, b, c), x, prec)


class RatioLimits(NamedTuple):
    """Limits of a ratio as x -> 0 and x -> infinity (``UNKNOWN`` if not known)."""

    at_zero: Any
    at_infinity: Any = UNKNOWN


def _gamma_ratio_limit(b: Any, c: Any) -> Any:
    """``Gamma(b-c) Gamma(b+c) / Gamma(b)^2``; exact when b and c are integers."""
    if isinstance(b, int) and isinstance(c, int):
        return Fraction(math.factorial(b - c - 1) * math.factorial(b + c - 1),
                        math.factorial(b - 1) ** 2)
    with gmpy2.context(precision=128):
        bv, cv = to_bigreal(b), to_bigreal(c)
        val = gmpy2.exp(gmpy2.lgamma(bv - cv)[0] + gmpy2.lgamma(bv + cv)[0] - 2 * gmpy2.lgamma(bv)[0])
        return float(val)


def _invert(v: Any) -> Any:
    if v == UNKNOWN:
        return UNKNOWN
    return 1 / v


def ratio_limits(spec: RatioSpec) -> RatioLimits:
    """Known endpoint limits.

    ``f_n``: ``(n+1)/(n+2)`` at 0 and 1 at infinity; ``g_n``: 1 and
    ``(n+2)/(n+1)``; ``h_abc``: 1 at 0, and ``Gamma(b-c)Gamma(b+c)/Gamma(b)^2``
    at infinity only when ``a = 1``; ``h_pq``: 1 at 0.
    """
    fam = spec.family
    if fam is Family.F_REMAINDER:
        return RatioLimits(Fraction(spec.n + 1, spec.n + 2), Fraction(1))
    if fam is Family.G_KUMMER:
        return RatioLimits(Fraction(1), Fraction(spec.n + 2, spec.n + 1))
    if fam is Family.H_ABC:
        a, b, c = spec.a[0], spec.b[0], spec.c[0]
        if to_bigreal(c) == 0:
            return RatioLimits(Fraction(1), Fraction(1))
        if to_bigreal(a) == 1:
            return RatioLimits(Fraction(1), _gamma_ratio_limit(b, c))
        return RatioLimits(Fraction(1), UNKNOWN)
    if fam is Family.H_PFQ:
        if spec.is_flat:
            return RatioLimits(Fraction(1), Fraction(1))
        return RatioLimits(Fraction(1), UNKNOWN)
    inner = ratio_limits(spec.inner)
    return RatioLimits(_invert(inner.at_zero), _invert(inner.at_infinity))


__all__ = [
    "Family",
    "RatioLimits",
    "RatioPoint",
    "RatioSpec",
    "RatioValue",
    "UNKNOWN",
    "evaluate",
    "f_ratio",
    "g_ratio",
    "h_abc",
    "h_pfq",
    "ratio_derivative",
    "ratio_limits",
    "ratio_value",
]
