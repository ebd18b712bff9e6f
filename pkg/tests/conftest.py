from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ORACLE_DPS = 60


@pytest.fixture
def mp():
    """mpmath at 60 digits, restored afterwards."""
    with mpmath.workdps(ORACLE_DPS):
        yield mpmath


def mp_remainder(n: int, x) -> mpmath.mpf:
    """R_n(x) from the incomplete gamma function, independent of the package."""
    x = mpmath.mpf(x)
    if x == 0:
        return mpmath.mpf(0)
    return mpmath.exp(x) * mpmath.gammainc(n + 1, 0, x, regularized=True)


def mp_f(n: int, x) -> mpmath.mpf:
    return mp_remainder(n - 1, x) * mp_remainder(n + 1, x) / mp_remainder(n, x) ** 2


def mp_h(a, b, c, x) -> mpmath.mpf:
    a, b, c, x = (mpmath.mpf(v) for v in (a, b, c, x))
    return mpmath.hyp1f1(a, b - c, x) * mpmath.hyp1f1(a, b + c, x) / mpmath.hyp1f1(a, b, x) ** 2


def mpf(v) -> mpmath.mpf:
    """Exact-ish transfer of an mpfr (or anything printable) into mpmath."""
    with mpmath.workdps(max(mpmath.mp.dps, 100)):
        if isinstance(v, Fraction):
            return mpmath.mpf(v.numerator) / v.denominator
        return mpmath.mpf(str(v))


def rel(a, b) -> float:
    with mpmath.workdps(100):
        a, b = mpf(a), mpf(b)
        return float(abs(a - b) / abs(b)) if b != 0 else float(abs(a))


def _specs():
    from kummerscan import RatioSpec

    xs = (0.1, 1.0, 5.0, 20.0)
    for n in (1, 2, 5, 10):
        for x in xs:
            yield RatioSpec.f(n), x
            yield RatioSpec.g(n), x
    for abc in ((1, 3, 1), (0.5, 2, 0.5), (2, 5, 1.5), (4, 3, 2), (0.5, 1.5, 0.25)):
        for x in xs:
            yield RatioSpec.h_abc(*abc), x
    for vec in (([0.5], [2, 3], [0.5, 1]), ([1, 2], [3, 4], [1, 0.5])):
        for x in xs:
            yield RatioSpec.h_pfq(*vec), x
    for x in (0.1, 0.5, 0.9):
        yield RatioSpec.h_pfq([1, 1], [2], [0.5]), x
    for x in xs:
        yield RatioSpec.reciprocal(RatioSpec.g(1)), x


def standard_derivative_grid():
    """(spec, x) pairs covering every family for finite-difference checks."""
    return list(_specs())


def central_difference(spec, x: float, step: str = "1e-4", prec: int = 128):
    """Central difference of ratio_value at decimal-exact nodes x +- step."""
    from decimal import Decimal

    from kummerscan.ratios import ratio_value

    xd, hd = Decimal(repr(x)), Decimal(step)
    hi = ratio_value(spec, str(xd + hd), prec).value
    lo = ratio_value(spec, str(xd - hd), prec).value
    with mpmath.workdps(ORACLE_DPS):
        return (mpf(hi) - mpf(lo)) / (2 * mpmath.mpf(step))


# one PASS/FAIL line per acceptance criterion, printed after the run
_ACCEPTANCE: dict[str, tuple[str, float]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::" in report.nodeid and report.when == "call":
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = (report.outcome, report.duration)
    elif "test_acceptance.py::" in report.nodeid and report.when == "setup" and report.failed:
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = ("failed", report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        outcome, secs = _ACCEPTANCE[name]
        status = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"{status}  {name}  ({secs:.1f} s)")
