"""Multiprecision special functions with rigorous truncation control.

All series handled here have positive terms on the supported domain, so they
are summed directly in MPFR software floats. Summation runs at
``prec + GUARD_BITS`` bits; the bookkeeping bound ``terms_used * 2**(1 - prec)``
is then a safe over-estimate of the accumulated rounding, and it is added to
a geometric bound on the discarded tail.

Precision is always an explicit argument. gmpy2 contexts are thread-local and
are entered only for the duration of a single call.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Real
from typing import Callable, Sequence, Union

import gmpy2
from gmpy2 import mpfr

from .errors import DivergentSeries, DomainError, PrecisionError

BigReal = type(mpfr(0))
Number = Union[Real, str, Fraction, BigReal]

DEFAULT_PREC = 128
MAX_PREC = 8192
GUARD_BITS = 32
MAX_TERMS = 500_000
# integer-order incomplete gamma switches to the finite complement sum here
_COMPLEMENT_MAX_ORDER = 10_000

PREC_ENV_VAR = "KUMMERSCAN_MAX_PREC_BITS"


def max_precision() -> int:
    """Escalation ceiling in bits, honouring ``KUMMERSCAN_MAX_PREC_BITS``."""
    raw = os.environ.get(PREC_ENV_VAR)
    if not raw:
        return MAX_PREC
    try:
        bits = int(raw)
    except ValueError:
        raise DomainError(f"{PREC_ENV_VAR} must be an integer, got {raw!r}") from None
    if bits < 2:
        raise DomainError(f"{PREC_ENV_VAR} must be >= 2, got {bits}")
    return bits


def working_context(prec: int) -> gmpy2.context:
    """A fresh gmpy2 context at ``prec`` plus the guard bits."""
    return gmpy2.context(precision=prec + GUARD_BITS)


def unit_roundoff(prec: int) -> BigReal:
    """``2**-prec`` as an exact mpfr."""
    return gmpy2.mul_2exp(mpfr(1), -prec)


def to_bigreal(value: Number) -> BigReal:
    """Convert ``value`` under the active context.

    ints, floats and mpfr values that fit are exact; decimal strings and
    fractions are rounded to nearest at the active precision.
    """
    if isinstance(value, BigReal):
        out = mpfr(value)
    elif isinstance(value, bool):
        raise DomainError("booleans are not numbers here")
    elif isinstance(value, Fraction):
        out = mpfr(value.numerator) / mpfr(value.denominator)
    elif isinstance(value, (Integral, str)):
        out = mpfr(value)
    elif isinstance(value, Real):
        out = mpfr(float(value))
    else:
        raise DomainError(f"cannot interpret {value!r} as a real number")
    if not gmpy2.is_finite(out):
        raise DomainError(f"non-finite input {value!r}")
    return out


def _check_prec(prec: int) -> None:
    if not isinstance(prec, Integral) or prec < 2:
        raise DomainError(f"precision must be an integer >= 2 bits, got {prec!r}")


@dataclass(frozen=True)
class EvalResult:
    """A value with a rigorous relative error bound.

    ``rel_error_bound`` covers both truncation of the series and accumulated
    rounding. An exact zero carries a zero bound.
    """

    value: BigReal
    rel_error_bound: BigReal
    terms_used: int
    precision_bits: int

    def __post_init__(self) -> None:
        if self.rel_error_bound < 0:
            raise ValueError("rel_error_bound must be nonnegative")
        if self.terms_used < 1:
            raise ValueError("terms_used must be >= 1")

    @property
    def abs_error_bound(self) -> BigReal:
        with gmpy2.context(precision=64, round=gmpy2.RoundUp):
            return abs(self.value) * self.rel_error_bound

    def to_decimal(self, digits: int = 17) -> str:
        """Render the value round-to-nearest with ``digits`` significant digits."""
        if digits < 1:
            raise DomainError("digits must be >= 1")
        return format(self.value, f".{digits}g")


@dataclass(frozen=True)
class KummerParams:
    a: Number
    b: Number
    x: Number

    def __post_init__(self) -> None:
        if not to_bigreal(self.a) > 0:
            raise DomainError(f"1F1 needs a > 0, got a={self.a}")
        if not to_bigreal(self.b) > 0:
            raise DomainError(f"1F1 needs b > 0, got b={self.b}")
        if not to_bigreal(self.x) >= 0:
            raise DomainError(f"1F1 needs x >= 0, got x={self.x}")


@dataclass(frozen=True)
class PfqParams:
    a: tuple
    b: tuple
    x: Number

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "b", tuple(self.b))
        for name, vec in (("a", self.a), ("b", self.b)):
            for v in vec:
                if not to_bigreal(v) > 0:
                    raise DomainError(f"pFq needs every {name}_i > 0, got {name}={list(vec)}")
        x = to_bigreal(self.x)
        if not x >= 0:
            raise DomainError(f"pFq needs x >= 0, got x={self.x}")
        p, q = len(self.a), len(self.b)
        if p > q + 1:
            raise DivergentSeries(f"{p}F{q} diverges for every x > 0 (p > q + 1)")
        if p == q + 1 and x >= 1:
            raise DivergentSeries(f"{p}F{q} needs x < 1, got x={self.x}")


@dataclass(frozen=True)
class RemainderParams:
    n: int
    x: Number

    def __post_init__(self) -> None:
        if not isinstance(self.n, Integral) or isinstance(self.n, bool) or self.n < 0:
            raise DomainError(f"remainder order must be an integer >= 0, got n={self.n!r}")
        if not to_bigreal(self.x) >= 0:
            raise DomainError(f"remainder needs x >= 0, got x={self.x}")


@dataclass(frozen=True)
class _Sum:
    value: BigReal
    trunc: BigReal  # relative
    deriv: BigReal | None
    deriv_trunc: BigReal | None
    terms: int


def _sup_ratio(a: Sequence[BigReal], denoms: Sequence[BigReal], x: BigReal, m: int) -> BigReal:
    """Upper bound on the term ratio ``t_{j+1}/t_j`` over all ``j >= m``.

    Numerator parameter ``a_i`` is paired with ``denoms[i]``; each paired
    factor ``(a_i + j)/(d_i + j)`` is at most ``max(1, (a_i + m)/(d_i + m))``
    for ``j >= m`` and unpaired denominators only shrink.
    """
    r = x
    for i, d in enumerate(denoms):
        if i < len(a):
            f = (a[i] + m) / (d + m)
            if f > 1:
                r *= f
        else:
            r /= d + m
    return r


def _hypsum(
    a: Sequence[BigReal],
    b: Sequence[BigReal],
    x: BigReal,
    prec: int,
    with_derivative: bool = False,
    rel_tol: BigReal | None = None,
    max_terms: int = MAX_TERMS,
) -> _Sum:
    """Sum ``sum_k prod(a)_k / (prod(b)_k k!) x^k`` under the active context.

    With ``with_derivative`` the x-derivative is accumulated in the same pass
    from ``u_k = t_k prod(a_i + k) / prod(b_j + k)``, using ``t_{k+1} = u_k x/(k+1)``.
    """
    tol = unit_roundoff(prec) if rel_tol is None else rel_tol
    denoms = list(b) + [mpfr(1)]
    one = mpfr(1)
    t = one
    total = mpfr(0)
    dtotal = mpfr(0)
    k = 0
    single = len(a) == 1 and len(b) == 1
    if single:
        a0, b0 = a[0], b[0]
    while True:
        total += t
        if single:
            u = t * (a0 + k) / (b0 + k)
        else:
            num = one
            for ai in a:
                num *= ai + k
            den = one
            for bj in b:
                den *= bj + k
            u = t * num / den
        dtotal += u
        k += 1
        t = u * x / k
        if t == 0:
            tail = dtail = mpfr(0)
            break
        at_cap = k >= max_terms
        if t > total * tol and not at_cap:
            continue
        rbar = _sup_ratio(a, denoms, x, k)
        rbar_u = rbar * (k + 1) / k
        if rbar >= 1 or (with_derivative and rbar_u >= 1):
            if at_cap:
                raise PrecisionError(f"series not bounded after {k} terms")
            continue
        tail = t / (1 - rbar) / total
        dtail = u * rbar_u / (1 - rbar_u) / dtotal
        if at_cap or (tail <= tol and (not with_derivative or dtail <= tol)):
            break
    return _Sum(total, tail, dtotal if with_derivative else None,
                dtail if with_derivative else None, k)


def _result(value: BigReal, rel: BigReal, terms: int, prec: int) -> EvalResult:
    """Round to ``prec`` and charge the final rounding."""
    out = mpfr(value, prec)
    if value == 0:
        return EvalResult(out, mpfr(0), terms, prec)
    return EvalResult(out, rel + unit_roundoff(prec), terms, prec)


def pochhammer(a: Number, k: int, prec: int = DEFAULT_PREC) -> BigReal:
    """Rising factorial ``a (a+1) ... (a+k-1)``; 1 for ``k = 0``."""
    if not isinstance(k, Integral) or k < 0:
        raise DomainError(f"pochhammer needs an integer k >= 0, got {k!r}")
    _check_prec(prec)
    with working_context(prec):
        av = to_bigreal(a)
        out = mpfr(1)
        for j in range(k):
            out *= av + j
        return mpfr(out, prec)


def _rounding(terms: int, prec: int) -> BigReal:
    return terms * gmpy2.mul_2exp(mpfr(1), 1 - prec)


def pfq(a: Sequence[Number], b: Sequence[Number], x: Number, prec: int = DEFAULT_PREC) -> EvalResult:
    """Generalized hypergeometric ``pFq(a; b; x)`` for positive parameters."""
    params = PfqParams(tuple(a), tuple(b), x)
    _check_prec(prec)
    with working_context(prec):
        av = [to_bigreal(v) for v in params.a]
        bv = [to_bigreal(v) for v in params.b]
        s = _hypsum(av, bv, to_bigreal(params.x), prec)
        return _result(s.value, s.trunc + _rounding(s.terms, prec), s.terms, prec)


def pfq_with_derivative(
    a: Sequence[Number], b: Sequence[Number], x: Number, prec: int = DEFAULT_PREC
) -> tuple[EvalResult, EvalResult]:
    """``pFq`` and its x-derivative from a single pass over the series."""
    params = PfqParams(tuple(a), tuple(b), x)
    _check_prec(prec)
    with working_context(prec):
        av = [to_bigreal(v) for v in params.a]
        bv = [to_bigreal(v) for v in params.b]
        s = _hypsum(av, bv, to_bigreal(params.x), prec, with_derivative=True)
        rnd = _rounding(s.terms, prec)
        return (
            _result(s.value, s.trunc + rnd, s.terms, prec),
            _result(s.deriv, s.deriv_trunc + rnd, s.terms, prec),
        )


def kummer_1f1(a: Number, b: Number, x: Number, prec: int = DEFAULT_PREC) -> EvalResult:
    """Kummer's confluent hypergeometric function ``1F1(a; b; x)``."""
    KummerParams(a, b, x)
    return pfq((a,), (b,), x, prec)


def kummer_1f1_dx(a: Number, b: Number, x: Number, prec: int = DEFAULT_PREC) -> EvalResult:
    """``d/dx 1F1(a; b; x) = (a/b) 1F1(a+1; b+1; x)``."""
    KummerParams(a, b, x)
    _check_prec(prec)
    with working_context(prec):
        av, bv = to_bigreal(a), to_bigreal(b)
        s = _hypsum([av + 1], [bv + 1], to_bigreal(x), prec)
        value = av / bv * s.value
        rel = s.trunc + _rounding(s.terms, prec) + 3 * unit_roundoff(prec)
        return _result(value, rel, s.terms, prec)


def exp_remainder(n: int, x: Number, prec: int = DEFAULT_PREC) -> EvalResult:
    """Tail ``sum_{k > n} x^k / k!`` summed directly.

    Never formed as ``exp(x)`` minus a partial sum.
    """
    params = RemainderParams(n, x)
    _check_prec(prec)
    with working_context(prec):
        xv = to_bigreal(params.x)
        if xv == 0:
            return EvalResult(mpfr(0, prec), mpfr(0), 1, prec)
        tol = unit_roundoff(prec)
        k = n + 1
        t = xv ** k / mpfr(gmpy2.fac(k))
        total = mpfr(0)
        terms = 0
        while True:
            total += t
            terms += 1
            k += 1
            t = t * xv / k
            if t > total * tol:
                continue
            rbar = xv / (k + 1)
            if rbar >= 1:
                continue
            tail = t / (1 - rbar) / total
            if tail <= tol or terms >= MAX_TERMS:
                break
        rel = tail + _rounding(terms, prec) + 3 * unit_roundoff(prec)
        return _result(total, rel, terms, prec)


def exp_remainder_via_kummer(n: int, x: Number, prec: int = DEFAULT_PREC) -> EvalResult:
    """``R_n(x) = x^(n+1)/(n+1)! * 1F1(1; n+2; x)``."""
    params = RemainderParams(n, x)
    _check_prec(prec)
    f = kummer_1f1(1, n + 2, params.x, prec)
    with working_context(prec):
        xv = to_bigreal(params.x)
        value = xv ** (n + 1) / mpfr(gmpy2.fac(n + 1)) * f.value
        rel = f.rel_error_bound + 4 * unit_roundoff(prec)
        return _result(value, rel, f.terms_used, prec)


def _is_integer(v: BigReal) -> bool:
    return gmpy2.is_integer(v)


def _reg_lower_gamma(sv: BigReal, xv: BigReal, prec: int) -> tuple[BigReal, BigReal, int]:
    """P(s, x) under the active context as (value, rel bound, terms)."""
    if xv == 0:
        return mpfr(0), mpfr(0), 1
    u = unit_roundoff(prec)
    if _is_integer(sv) and sv <= _COMPLEMENT_MAX_ORDER and xv >= sv:
        # Q(s, x) = e^-x sum_{k<s} x^k/k!, and Q <= ~1/2 once x >= s
        s_int = int(sv)
        t = mpfr(1)
        q = mpfr(0)
        for k in range(s_int):
            q += t
            t = t * xv / (k + 1)
        q *= gmpy2.exp(-xv)
        p = 1 - q
        rel_q = _rounding(s_int + 2, prec)
        rel = q * rel_q / p + 2 * u
        return p, rel, s_int
    if _is_integer(sv):
        gamma_s1 = mpfr(gmpy2.fac(int(sv)))
    else:
        gamma_s1 = gmpy2.gamma(sv + 1)
    m = _hypsum([mpfr(1)], [sv + 1], xv, prec)
    p = xv ** sv * gmpy2.exp(-xv) / gamma_s1 * m.value
    rel = m.trunc + _rounding(m.terms, prec) + 6 * u
    return p, rel, m.terms


def reg_lower_gamma(s: Number, x: Number, prec: int = DEFAULT_PREC) -> EvalResult:
    """Regularized lower incomplete gamma ``P(s, x) = gamma(s, x) / Gamma(s)``.

    Integer orders with ``x >= s`` use the finite complement
    ``1 - e^-x sum_{k<s} x^k/k!``, which stays cheap and accurate for large x.
    Everything else uses ``x^s e^-x / Gamma(s+1) * 1F1(1; s+1; x)``.
    """
    _check_prec(prec)
    with working_context(prec):
        sv, xv = to_bigreal(s), to_bigreal(x)
        if not sv > 0:
            raise DomainError(f"incomplete gamma needs s > 0, got s={s}")
        if not xv >= 0:
            raise DomainError(f"incomplete gamma needs x >= 0, got x={x}")
        value, rel, terms = _reg_lower_gamma(sv, xv, prec)
        return _result(value, rel, terms, prec)


def gamma_p_log_derivative(s: BigReal, x: BigReal, p_value: BigReal) -> BigReal:
    """``(d/dx P(s, x)) / P(s, x) = x^(s-1) e^-x / (Gamma(s) P(s, x))`` for x > 0.

    Runs under the caller's context.
    """
    if _is_integer(s):
        gamma_s = mpfr(gmpy2.fac(int(s) - 1))
    else:
        gamma_s = gmpy2.gamma(s)
    return x ** (s - 1) * gmpy2.exp(-x) / gamma_s / p_value


def exp_remainder_via_gamma(n: int, x: Number, prec: int = DEFAULT_PREC) -> EvalResult:
    """``R_n(x) = e^x P(n+1, x)``; the route that stays cheap for very large x."""
    params = RemainderParams(n, x)
    _check_prec(prec)
    with working_context(prec):
        xv = to_bigreal(params.x)
        p, rel, terms = _reg_lower_gamma(mpfr(n + 1), xv, prec)
        if p == 0:
            return EvalResult(mpfr(0, prec), mpfr(0), terms, prec)
        value = gmpy2.exp(xv) * p
        return _result(value, rel + 2 * unit_roundoff(prec), terms, prec)


def eval_to_tolerance(
    thunk: Callable[[int], EvalResult],
    rel_tol: float,
    start_prec: int = DEFAULT_PREC,
    max_prec: int | None = None,
) -> EvalResult:
    """Re-run ``thunk(prec)`` with doubling precision until the bound meets ``rel_tol``.

    Raises:
        PrecisionError: the ceiling was reached without meeting ``rel_tol``.
    """
    if not rel_tol > 0:
        raise DomainError(f"rel_tol must be positive, got {rel_tol}")
    ceiling = max_precision() if max_prec is None else max_prec
    prec = min(start_prec, ceiling)
    while True:
        res = thunk(prec)
        if res.rel_error_bound <= rel_tol:
            return res
        if prec >= ceiling:
            raise PrecisionError(
                f"relative bound {float(res.rel_error_bound):.3g} still above "
                f"{rel_tol:.3g} at the {ceiling}-bit ceiling"
            )
        prec = min(2 * prec, ceiling)


__all__ = [
    "BigReal",
    "DEFAULT_PREC",
    "EvalResult",
    "GUARD_BITS",
    "KummerParams",
    "MAX_PREC",
    "PfqParams",
    "RemainderParams",
    "eval_to_tolerance",
    "exp_remainder",
    "exp_remainder_via_gamma",
    "exp_remainder_via_kummer",
    "gamma_p_log_derivative",
    "kummer_1f1",
    "kummer_1f1_dx",
    "max_precision",
    "pfq",
    "pfq_with_derivative",
    "pochhammer",
    "reg_lower_gamma",
    "to_bigreal",
    "unit_roundoff",
    "working_context",
]
