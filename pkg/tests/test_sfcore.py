from __future__ import annotations

import math
from fractions import Fraction

import gmpy2
import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from kummerscan import (
    DivergentSeries,
    DomainError,
    PrecisionError,
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
from kummerscan.sfcore import (
    EvalResult,
    PREC_ENV_VAR,
    max_precision,
    pfq_with_derivative,
    to_bigreal,
)

from conftest import ORACLE_DPS, mp_remainder, mpf, rel

E = mpmath.e

# reference values from closed forms, computed once at 60 digits
with mpmath.workdps(ORACLE_DPS):
    E_MINUS_1 = +E - 1
    E_MINUS_2 = +E - 2
    E_MINUS_2_5 = +E - mpmath.mpf("2.5")
    P_2_1 = 1 - 2 / +E
    TWO_E_MINUS_4 = 2 * (+E - 2)


def close(res, ref, tol=1e-30):
    return rel(res.value, ref) <= tol


class TestPochhammer:
    def test_empty_product(self):
        assert pochhammer(3, 0) == 1

    def test_factorial(self):
        assert pochhammer(1, 5) == 120

    def test_half_integer(self):
        assert pochhammer(2.5, 2) == gmpy2.mpfr("8.75")

    def test_negative_k_rejected(self):
        with pytest.raises(DomainError):
            pochhammer(1, -1)

    @given(st.integers(1, 40), st.integers(0, 30))
    def test_matches_gamma_ratio(self, a, k):
        assert int(pochhammer(a, k, 256)) == math.factorial(a + k - 1) // math.factorial(a - 1)


class TestKummer:
    def test_at_zero(self):
        r = kummer_1f1(1, 2, 0)
        assert r.value == 1 and r.terms_used >= 1

    def test_e_minus_1(self):
        assert close(kummer_1f1(1, 2, 1), E_MINUS_1)

    def test_b3_closed_form(self):
        assert close(kummer_1f1(1, 3, 1), TWO_E_MINUS_4)

    @pytest.mark.parametrize("a,b,x", [(0, 1, 1), (1, 0, 1), (1, 1, -1), (-1, 2, 1)])
    def test_domain(self, a, b, x):
        with pytest.raises(DomainError):
            kummer_1f1(a, b, x)

    def test_derivative_at_zero(self):
        assert kummer_1f1_dx(1, 2, 0).value == gmpy2.mpfr("0.5")
        assert rel(kummer_1f1_dx(1, 3, 0).value, Fraction(1, 3)) < 1e-35

    def test_derivative_closed_form(self):
        assert rel(kummer_1f1_dx(1, 2, 1).value, 1) < 1e-35

    @given(st.sampled_from([0.5, 1, 2, 5]), st.sampled_from([0.5, 1, 2, 5]),
           st.sampled_from([0.1, 1, 5]))
    def test_derivative_finite_difference(self, a, b, x):
        h = 1e-4
        fd = (kummer_1f1(a, b, x + h).value - kummer_1f1(a, b, x - h).value) / (2 * h)
        assert rel(kummer_1f1_dx(a, b, x).value, fd) <= 1e-6

    @given(st.floats(0.05, 20), st.floats(0.05, 20), st.floats(0, 60))
    def test_matches_mpmath(self, a, b, x):
        res = kummer_1f1(a, b, x)
        with mpmath.workdps(ORACLE_DPS):
            ref = mpmath.hyp1f1(a, b, x)
        assert rel(res.value, ref) <= max(float(res.rel_error_bound), 1e-40)

    @given(st.floats(0.05, 10), st.floats(0.05, 10), st.floats(0, 30), st.floats(1e-6, 5))
    def test_positive_and_increasing(self, a, b, lo, dx):
        hi = lo + dx
        flo, fhi = kummer_1f1(a, b, lo).value, kummer_1f1(a, b, hi).value
        assert flo >= 1
        assert fhi > flo


class TestPfq:
    def test_reduces_to_kummer(self):
        assert close(pfq([1], [2], 1), E_MINUS_1)

    def test_cancelling_pair(self):
        assert close(pfq([1, 1], [1, 2], 1), E_MINUS_1)

    def test_x_zero(self):
        assert pfq([2], [1, 1], 0).value == 1

    @given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0, 40),
           st.sampled_from([53, 128, 200]))
    def test_bit_identical_to_kummer(self, a, b, x, prec):
        r1, r2 = pfq([a], [b], x, prec), kummer_1f1(a, b, x, prec)
        assert r1.value == r2.value and r1.value.precision == r2.value.precision

    def test_divergent(self):
        with pytest.raises(DivergentSeries):
            pfq([1, 1, 1], [1], 0.1)
        with pytest.raises(DivergentSeries):
            pfq([2, 3], [4], 1)

    def test_gauss_inside_radius(self):
        res = pfq([1, 2], [3], 0.5)
        with mpmath.workdps(ORACLE_DPS):
            ref = mpmath.hyp2f1(1, 2, 3, 0.5)
        assert rel(res.value, ref) <= float(res.rel_error_bound)

    def test_derivative_pass(self):
        val, der = pfq_with_derivative([0.5], [2, 3], 10)
        with mpmath.workdps(ORACLE_DPS):
            ref = mpmath.diff(lambda t: mpmath.hyper([0.5], [2, 3], t), 10)
        assert rel(der.value, ref) <= float(der.rel_error_bound) + 1e-40
        assert val.value == pfq([0.5], [2, 3], 10).value

    @given(st.lists(st.floats(0.1, 6), min_size=1, max_size=3),
           st.lists(st.floats(0.1, 6), min_size=1, max_size=3), st.floats(0, 25))
    def test_truncation_bound_sound(self, a, b, x):
        """The reported bound covers the gap to a sum with 4x as many terms."""
        assume(len(a) <= len(b) + 1)
        if len(a) > len(b):
            x = min(x, 0.9)
        res = pfq(a, b, x, 128)
        with mpmath.workdps(ORACLE_DPS):
            t, s = mpmath.mpf(1), mpmath.mpf(0)
            for k in range(4 * res.terms_used + 8):
                s += t
                num = mpmath.fprod(mpmath.mpf(ai) + k for ai in a)
                den = mpmath.fprod(mpmath.mpf(bj) + k for bj in b) * (k + 1)
                t *= num * x / den
            assert abs(mpf(res.value) - s) <= mpf(res.rel_error_bound) * s


class TestRemainder:
    def test_tail_n1(self):
        assert close(exp_remainder(1, 1), E_MINUS_2)

    def test_tail_n2(self):
        assert close(exp_remainder(2, 1), E_MINUS_2_5)

    def test_zero_at_origin(self):
        for fn in (exp_remainder, exp_remainder_via_kummer, exp_remainder_via_gamma):
            r = fn(3, 0)
            assert r.value == 0 and r.rel_error_bound == 0

    def test_via_kummer_examples(self):
        assert close(exp_remainder_via_kummer(1, 1), E_MINUS_2)
        assert close(exp_remainder_via_kummer(0, 1), E_MINUS_1)
        assert exp_remainder_via_kummer(5, 0).value == 0

    def test_negative_x(self):
        with pytest.raises(DomainError):
            exp_remainder(1, -0.5)

    def test_negative_n(self):
        with pytest.raises(DomainError):
            exp_remainder(-1, 1)

    @pytest.mark.parametrize("n", range(0, 11))
    @pytest.mark.parametrize("x", [0.1, 0.5, 1, 2, 5, 10, 30])
    def test_three_routes_agree(self, n, x):
        rs = [fn(n, x, 256) for fn in (exp_remainder, exp_remainder_via_kummer,
                                       exp_remainder_via_gamma)]
        ref = mp_remainder(n, mpmath.mpf(x))
        for r in rs:
            assert rel(r.value, ref) <= 1e-12
        for r1 in rs:
            for r2 in rs:
                slack = r1.abs_error_bound + r2.abs_error_bound
                assert abs(r1.value - r2.value) <= slack

    @given(st.integers(1, 30), st.floats(0, 60))
    def test_telescoping(self, n, x):
        lo, hi = exp_remainder(n - 1, x), exp_remainder(n, x)
        with gmpy2.context(precision=256):
            term = to_bigreal(x) ** n / gmpy2.fac(n)
            diff = lo.value - hi.value
        assert abs(diff - term) <= lo.abs_error_bound + hi.abs_error_bound + term * 2.0**-126

    @given(st.integers(0, 40), st.floats(1e-6, 200))
    def test_positive(self, n, x):
        assert exp_remainder_via_gamma(n, x).value > 0

    def test_gamma_route_huge_x(self):
        r = exp_remainder_via_gamma(3, 1e4)
        assert gmpy2.is_finite(r.value) and r.value > 0
        with mpmath.workdps(ORACLE_DPS):
            assert rel(r.value, mp_remainder(3, mpmath.mpf(10**4))) <= float(r.rel_error_bound)


class TestIncompleteGamma:
    def test_zero(self):
        assert reg_lower_gamma(3, 0).value == 0

    def test_exponential(self):
        with mpmath.workdps(ORACLE_DPS):
            x = mpmath.nstr(mpmath.log(2), ORACLE_DPS)
        assert rel(reg_lower_gamma(1, x, 200).value, 0.5) < 1e-55

    def test_s2(self):
        assert close(reg_lower_gamma(2, 1), P_2_1)

    @pytest.mark.parametrize("s,x", [(0, 1), (-1, 1), (1, -0.1)])
    def test_domain(self, s, x):
        with pytest.raises(DomainError):
            reg_lower_gamma(s, x)

    @given(st.floats(0.1, 60), st.floats(0, 150))
    def test_matches_mpmath(self, s, x):
        res = reg_lower_gamma(s, x)
        with mpmath.workdps(ORACLE_DPS):
            ref = mpmath.gammainc(s, 0, x, regularized=True)
        # P < 1 mathematically; 1 - e^-x can round up to exactly 1
        assert 0 <= res.value <= 1
        assert abs(mpf(res.value) - ref) <= mpf(res.abs_error_bound) + mpmath.mpf(2) ** -126 * ref

    @given(st.floats(0.1, 30), st.floats(0, 50), st.floats(0.01, 5))
    def test_monotone_in_x(self, s, x, dx):
        assert reg_lower_gamma(s, x + dx).value >= reg_lower_gamma(s, x).value


class TestEvalResult:
    def test_invariants(self):
        with pytest.raises(ValueError):
            EvalResult(gmpy2.mpfr(1), gmpy2.mpfr(-1), 1, 128)
        with pytest.raises(ValueError):
            EvalResult(gmpy2.mpfr(1), gmpy2.mpfr(0), 0, 128)

    def test_decimal_rendering(self):
        r = kummer_1f1(1, 2, 1)
        assert r.to_decimal(10) == "1.718281828"
        assert r.to_decimal() == "1.7182818284590452"

    def test_to_bigreal_exact_inputs(self):
        with gmpy2.context(precision=200):
            assert to_bigreal(Fraction(1, 3)) == gmpy2.mpfr(1) / 3
            assert to_bigreal(0.1) == gmpy2.mpfr(0.1)


class TestEscalation:
    def test_reaches_tolerance(self):
        res = eval_to_tolerance(lambda p: kummer_1f1(1, 2, 1, p), 1e-30)
        assert res.precision_bits >= 128 and res.rel_error_bound <= 1e-30
        assert rel(res.value, E_MINUS_1) <= 1e-30

    def test_doubles_precision(self):
        res = eval_to_tolerance(lambda p: kummer_1f1(1, 2, 1, p), 1e-60)
        assert res.precision_bits == 256

    def test_exact_zero_one_pass(self):
        calls = []

        def thunk(p):
            calls.append(p)
            return exp_remainder(2, 0, p)

        res = eval_to_tolerance(thunk, 1e-300)
        assert res.value == 0 and calls == [128]

    def test_near_radius(self):
        try:
            res = eval_to_tolerance(lambda p: pfq([1, 1], [2], 0.999, p), 1e-40, max_prec=512)
        except PrecisionError:
            return
        assert res.terms_used > 1000

    def test_ceiling_raises(self):
        with pytest.raises(PrecisionError):
            eval_to_tolerance(lambda p: kummer_1f1(1, 2, 1, p), 1e-100, max_prec=256)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv(PREC_ENV_VAR, "256")
        assert max_precision() == 256
        with pytest.raises(PrecisionError):
            eval_to_tolerance(lambda p: kummer_1f1(1, 2, 1, p), 1e-100)

    def test_env_invalid(self, monkeypatch):
        monkeypatch.setenv(PREC_ENV_VAR, "lots")
        with pytest.raises(DomainError):
            max_precision()

    def test_bad_tolerance(self):
        with pytest.raises(DomainError):
            eval_to_tolerance(lambda p: kummer_1f1(1, 2, 1, p), 0)
