"""Numerical monotonicity certification for the ratio families.

A verdict here is numerical evidence, never a proof. Only VIOLATION is a
strong claim: it carries a witness whose derivative stays below minus the
zero band, and that certification is stable under precision escalation.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Iterable, Sequence

import gmpy2
import numpy as np

from .errors import DivergentSeries, DomainError, PrecisionError
from .ratios import RatioPoint, RatioSpec, evaluate
from .sfcore import DEFAULT_PREC, EvalResult, eval_to_tolerance, max_precision

LOG_GRID_FLOOR = 1e-6


class Sign(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    INDETERMINATE = "indeterminate"


class Verdict(str, Enum):
    INCREASING = "increasing"
    VIOLATION = "violation"
    INCONCLUSIVE = "inconclusive"
    VACUOUS = "vacuous"


@dataclass(frozen=True)
class MonotoneConfig:
    initial_samples: int = 256
    max_refinement_depth: int = 12
    zero_band_factor: float = 10.0
    precision_bits: int = DEFAULT_PREC
    rel_tol: float = 1e-12
    # None means the process-wide ceiling (KUMMERSCAN_MAX_PREC_BITS or 8192)
    max_precision_bits: int | None = None

    def __post_init__(self) -> None:
        if self.initial_samples < 2:
            raise DomainError("initial_samples must be >= 2")
        if self.max_refinement_depth < 0:
            raise DomainError("max_refinement_depth must be >= 0")
        if not self.zero_band_factor >= 1:
            raise DomainError("zero_band_factor must be >= 1")
        if self.precision_bits < 2:
            raise DomainError("precision_bits must be >= 2")
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if self.max_precision_bits is not None and self.max_precision_bits < self.precision_bits:
            raise DomainError("max_precision_bits must be >= precision_bits")

    @property
    def ceiling(self) -> int:
        return max_precision() if self.max_precision_bits is None else self.max_precision_bits

    def to_dict(self) -> dict:
        return {
            "initial_samples": self.initial_samples,
            "max_refinement_depth": self.max_refinement_depth,
            "zero_band_factor": self.zero_band_factor,
            "precision_bits": self.precision_bits,
            "rel_tol": self.rel_tol,
            "max_precision_bits": self.max_precision_bits,
        }

    @classmethod
    def from_dict(cls, d: dict) -> MonotoneConfig:
        return cls(**d)


@dataclass(frozen=True)
class SignResult:
    sign: Sign
    x: float
    value: float
    value_error: float
    derivative: float
    error_bound: float
    band: float
    precision_bits: int
    exact_zero: bool = False
    diagnostic: str | None = None

    @property
    def resolved(self) -> bool:
        return self.sign is not Sign.INDETERMINATE


def _as_eval(pt: RatioPoint) -> EvalResult:
    d, e = pt.derivative, pt.derivative_error
    if e == 0:
        rel = gmpy2.mpfr(0)
    elif d == 0:
        rel = gmpy2.inf()
    else:
        with gmpy2.context(precision=64, round=gmpy2.RoundUp):
            rel = e / abs(d)
    return EvalResult(d, rel, 1, pt.precision_bits)


def _classify(pt: RatioPoint, factor: float, diagnostic: str | None = None) -> SignResult:
    d = pt.derivative
    band = pt.derivative_error * factor
    if d - band > 0:
        sign = Sign.POSITIVE
    elif d + band < 0:
        sign = Sign.NEGATIVE
    else:
        sign = Sign.INDETERMINATE
    return SignResult(
        sign=sign,
        x=float(pt.x),
        value=float(pt.value),
        value_error=float(pt.value_error),
        derivative=float(d),
        error_bound=float(pt.derivative_error),
        band=float(band),
        precision_bits=pt.precision_bits,
        exact_zero=(d == 0 and pt.derivative_error == 0),
        diagnostic=diagnostic,
    )


def derivative_sign(spec: RatioSpec, x: float, cfg: MonotoneConfig = MonotoneConfig()) -> SignResult:
    """Certified sign of the ratio's x-derivative at ``x``.

    The derivative is re-evaluated at doubling precision until its bound is
    well inside ``|derivative| / zero_band_factor``. An exactly zero
    derivative (zero-shift ratios) comes back INDETERMINATE with
    ``exact_zero`` set; hitting the precision ceiling comes back
    INDETERMINATE with a diagnostic.
    """
    last: list[RatioPoint] = []

    def thunk(prec: int) -> EvalResult:
        pt = evaluate(spec, x, prec)
        last.append(pt)
        return _as_eval(pt)

    try:
        eval_to_tolerance(thunk, 0.5 / cfg.zero_band_factor,
                          start_prec=cfg.precision_bits, max_prec=cfg.ceiling)
    except PrecisionError as exc:
        return _classify(last[-1], cfg.zero_band_factor, diagnostic=str(exc))
    return _classify(last[-1], cfg.zero_band_factor)


def sample_grid(x_lo: float, x_hi: float, n: int) -> list[float]:
    """Half uniform on ``[x_lo, x_hi]``, half log-spaced from ``max(x_lo, 1e-6)``."""
    n_log = n // 2
    n_uni = n - n_log
    pts = set(np.linspace(x_lo, x_hi, n_uni).tolist()) if n_uni > 1 else {x_lo, x_hi}
    start = max(x_lo, LOG_GRID_FLOOR)
    if n_log > 0 and start < x_hi:
        pts.update(np.geomspace(start, x_hi, n_log).tolist())
    return sorted(min(max(float(v), x_lo), x_hi) for v in pts)


@dataclass(frozen=True)
class Witness:
    x: float
    derivative: float
    error_bound: float
    precision_bits: int

    def to_dict(self) -> dict:
        return {"x": self.x, "derivative": self.derivative,
                "error_bound": self.error_bound, "precision_bits": self.precision_bits}

    @classmethod
    def from_dict(cls, d: dict) -> Witness:
        return cls(d["x"], d["derivative"], d["error_bound"], d.get("precision_bits", DEFAULT_PREC))


@dataclass(frozen=True)
class TracePoint:
    x: float
    value: float
    derivative: float
    error_bound: float
    value_error: float = 0.0


@dataclass(frozen=True)
class MonotonicityReport:
    verdict: Verdict
    spec: RatioSpec
    interval: tuple[float, float]
    config: MonotoneConfig
    witness: Witness | None = None
    min_derivative: tuple[float, float] | None = None  # (x, value)
    samples_evaluated: int = 0
    strict: bool = False
    flat: bool = False
    unresolved_points: int = 0
    sign_change_bracket: tuple[float, float] | None = None
    max_precision_used: int = DEFAULT_PREC
    notes: tuple[str, ...] = ()
    trace: tuple[TracePoint, ...] = field(default=(), compare=False, repr=False)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "spec": self.spec.to_dict(),
            "interval": list(self.interval),
            "config": self.config.to_dict(),
            "witness": None if self.witness is None else self.witness.to_dict(),
            "min_derivative": None if self.min_derivative is None
            else {"x": self.min_derivative[0], "value": self.min_derivative[1]},
            "samples": self.samples_evaluated,
            "strict": self.strict,
            "flat": self.flat,
            "unresolved_points": self.unresolved_points,
            "sign_change_bracket": None if self.sign_change_bracket is None
            else list(self.sign_change_bracket),
            "max_precision_used": self.max_precision_used,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> MonotonicityReport:
        md = d.get("min_derivative")
        br = d.get("sign_change_bracket")
        return cls(
            verdict=Verdict(d["verdict"]),
            spec=RatioSpec.from_dict(d["spec"]),
            interval=tuple(d["interval"]),
            config=MonotoneConfig.from_dict(d["config"]),
            witness=None if d.get("witness") is None else Witness.from_dict(d["witness"]),
            min_derivative=None if md is None else (md["x"], md["value"]),
            samples_evaluated=d["samples"],
            strict=d.get("strict", False),
            flat=d.get("flat", False),
            unresolved_points=d.get("unresolved_points", 0),
            sign_change_bracket=None if br is None else tuple(br),
            max_precision_used=d.get("max_precision_used", DEFAULT_PREC),
            notes=tuple(d.get("notes", ())),
        )


def write_trace_csv(report: MonotonicityReport, out: io.TextIOBase) -> None:
    """Write the sampled trace as ``x,value,derivative,error_bound`` rows."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["x", "value", "derivative", "error_bound"])
    for p in report.trace:
        writer.writerow([repr(p.x), repr(p.value), repr(p.derivative), repr(p.error_bound)])


def locate_sign_change(
    spec: RatioSpec,
    bracket: tuple[float, float],
    cfg: MonotoneConfig = MonotoneConfig(),
    sign_fn: Callable[[float], Sign] | None = None,
    max_steps: int = 200,
) -> tuple[float, float] | None:
    """Bisect ``bracket`` down to the derivative sign change it contains.

    Stops once the width is at most ``rel_tol * max(1, x2)``, after
    ``max_steps`` halvings, or when the floats between the ends run out.
    Returns None when both ends carry the same definite sign, both are
    indeterminate, or the bracket is degenerate.
    """
    x1, x2 = float(bracket[0]), float(bracket[1])
    if x1 > x2:
        raise DomainError(f"bracket must satisfy x1 <= x2, got [{x1}, {x2}]")
    if x1 == x2:
        return None
    if sign_fn is None:
        def sign_fn(x: float) -> Sign:
            return derivative_sign(spec, x, cfg).sign
    s1, s2 = sign_fn(x1), sign_fn(x2)
    indet = Sign.INDETERMINATE
    if s1 == s2:
        return None
    # anchor on a definite end; the other end is "different" by assumption
    anchor_left = s1 is not indet
    anchor = s1 if anchor_left else s2
    lo, hi = x1, x2
    width_tol = cfg.rel_tol * max(1.0, x2)
    for _ in range(max_steps):
        if hi - lo <= width_tol:
            break
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        sm = sign_fn(mid)
        if anchor_left:
            if sm == anchor:
                lo = mid
            else:
                hi = mid
        else:
            if sm == anchor:
                hi = mid
            else:
                lo = mid
    return lo, hi


class _Sampler:
    """Memoized sign oracle that counts evaluations."""

    def __init__(self, spec: RatioSpec, cfg: MonotoneConfig) -> None:
        self.spec = spec
        self.cfg = cfg
        self.cache: dict[float, SignResult] = {}

    def __call__(self, x: float) -> SignResult:
        hit = self.cache.get(x)
        if hit is None:
            hit = derivative_sign(self.spec, x, self.cfg)
            self.cache[x] = hit
        return hit

    def sign(self, x: float) -> Sign:
        return self(x).sign

    def ordered(self) -> list[SignResult]:
        return [self.cache[x] for x in sorted(self.cache)]


def _refine(sampler: _Sampler, left: float, center: float, right: float, depth: int) -> bool:
    """Bisect toward an indeterminate point; True once a certified negative turns up."""
    for _ in range(depth):
        mids = []
        for a, b in ((left, center), (center, right)):
            m = 0.5 * (a + b)
            if a < m < b:
                mids.append(m)
        if not mids:
            return False
        results = [sampler(m) for m in mids]
        if any(r.sign is Sign.NEGATIVE for r in results):
            return True
        open_ = [r for r in results if r.sign is Sign.INDETERMINATE and not r.exact_zero]
        if not open_:
            return False
        nxt = open_[0].x
        if nxt < center:
            left, center, right = left, nxt, center
        else:
            left, center, right = center, nxt, right
    return False


def _steps_consistent(a: SignResult, b: SignResult) -> bool:
    """Values at consecutive samples do not decrease beyond their bounds."""
    return b.value - a.value >= -(a.value_error + b.value_error)


def _runs_resolved(points: Sequence[SignResult]) -> tuple[int, list[str]]:
    """Count indeterminate samples not settled by the value-level check.

    A run of nonzero indeterminate samples is settled when the values across
    it never drop beyond their error bounds and the values at the bracketing
    samples differ by more than the combined bound.
    """
    unresolved = 0
    notes: list[str] = []
    i = 0
    n = len(points)
    while i < n:
        p = points[i]
        if p.sign is not Sign.INDETERMINATE or p.exact_zero:
            i += 1
            continue
        j = i
        while j + 1 < n and points[j + 1].sign is Sign.INDETERMINATE and not points[j + 1].exact_zero:
            j += 1
        lo = max(i - 1, 0)
        hi = min(j + 1, n - 1)
        span = points[lo:hi + 1]
        steps_ok = all(_steps_consistent(a, b) for a, b in zip(span, span[1:]))
        rise = points[hi].value - points[lo].value
        certified = rise > points[hi].value_error + points[lo].value_error
        if not (steps_ok and certified):
            unresolved += j - i + 1
            notes.append(f"unresolved derivative sign on [{points[i].x!r}, {points[j].x!r}]")
        i = j + 1
    return unresolved, notes


def check_monotone(
    spec: RatioSpec,
    interval: tuple[float, float],
    cfg: MonotoneConfig = MonotoneConfig(),
    keep_trace: bool = False,
) -> MonotonicityReport:
    """Decide numerically whether ``spec`` is nondecreasing on ``interval``.

    Samples the derivative sign on the blended grid, bisects toward every
    indeterminate sample, and on a violation narrows the sign change that
    precedes the first certified negative. Deterministic for fixed inputs.
    """
    x_lo, x_hi = float(interval[0]), float(interval[1])
    if not (math.isfinite(x_lo) and math.isfinite(x_hi)) or x_lo < 0 or x_lo > x_hi:
        raise DomainError(f"interval must satisfy 0 <= x_lo <= x_hi, got [{x_lo}, {x_hi}]")
    limit = spec.x_limit
    if limit is not None and x_hi >= limit:
        raise DivergentSeries(f"{spec.label()} needs x < {limit}, got x_max={x_hi}")
    base = dict(spec=spec, interval=(x_lo, x_hi), config=cfg)
    if x_lo == x_hi:
        return MonotonicityReport(Verdict.VACUOUS, notes=("degenerate interval",), **base)

    sampler = _Sampler(spec, cfg)
    for x in sample_grid(x_lo, x_hi, cfg.initial_samples):
        sampler(x)
    grid = sampler.ordered()

    found_negative = any(r.sign is Sign.NEGATIVE for r in grid)
    if not found_negative:
        for i, r in enumerate(grid):
            if r.sign is Sign.INDETERMINATE and not r.exact_zero:
                left = grid[i - 1].x if i > 0 else r.x
                right = grid[i + 1].x if i + 1 < len(grid) else r.x
                if _refine(sampler, left, r.x, right, cfg.max_refinement_depth):
                    found_negative = True
                    break

    points = sampler.ordered()
    notes: list[str] = []
    mins = min(points, key=lambda r: (r.derivative, r.x))
    max_prec = max(r.precision_bits for r in points)
    diags = sorted({r.diagnostic for r in points if r.diagnostic})
    notes.extend(diags)

    witness = None
    bracket = None
    if found_negative:
        negs = [r for r in points if r.sign is Sign.NEGATIVE]
        w = min(negs, key=lambda r: (r.derivative + r.band, r.x))
        witness = Witness(w.x, w.derivative, w.error_bound, w.precision_bits)
        first = negs[0]
        before = [r for r in points if r.x < first.x and r.sign is not Sign.NEGATIVE]
        if before:
            bracket = locate_sign_change(spec, (before[-1].x, first.x), cfg, sign_fn=sampler.sign)
        verdict = Verdict.VIOLATION
        strict = flat = False
        unresolved = 0
        points = sampler.ordered()
    else:
        flat = all(r.exact_zero for r in points)
        unresolved, run_notes = _runs_resolved(points)
        notes.extend(run_notes)
        strict = all(r.sign is Sign.POSITIVE for r in points)
        verdict = Verdict.INCONCLUSIVE if unresolved else Verdict.INCREASING
        if verdict is Verdict.INCREASING and not all(
            _steps_consistent(a, b) for a, b in zip(points, points[1:])
        ):
            verdict = Verdict.INCONCLUSIVE
            notes.append("sampled values decrease beyond their bounds")
        if flat:
            notes.append("derivative identically zero (flat)")

    trace = ()
    if keep_trace:
        trace = tuple(TracePoint(r.x, r.value, r.derivative, r.error_bound, r.value_error) for r in points)
    return MonotonicityReport(
        verdict=verdict,
        witness=witness,
        min_derivative=(mins.x, mins.derivative),
        samples_evaluated=len(sampler.cache),
        strict=strict,
        flat=flat,
        unresolved_points=unresolved,
        sign_change_bracket=bracket,
        max_precision_used=max_prec,
        notes=tuple(notes),
        trace=trace,
        **base,
    )


def recheck_witness(report: MonotonicityReport, factor: int = 4) -> SignResult:
    """Re-evaluate a VIOLATION witness at ``factor`` times its precision."""
    if report.witness is None:
        raise DomainError("report has no witness")
    prec = report.witness.precision_bits * factor
    cfg = replace(report.config, precision_bits=prec,
                  max_precision_bits=max(prec, report.config.ceiling))
    return derivative_sign(report.spec, report.witness.x, cfg)


__all__ = [
    "MonotoneConfig",
    "MonotonicityReport",
    "Sign",
    "SignResult",
    "TracePoint",
    "Verdict",
    "Witness",
    "check_monotone",
    "derivative_sign",
    "locate_sign_change",
    "recheck_witness",
    "sample_grid",
    "write_trace_csv",
]
