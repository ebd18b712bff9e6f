"""Verification campaigns with resumable JSON persistence.

Three kinds of campaign write result files: ``bounds`` (the proved
two-sided bound on ``f_n``), ``conjecture`` (monotonicity sweeps over
``f_n``/``g_n``) and ``scan`` (abc and pFq parameter boxes). Files share one
envelope::

    {"schema_version": 1, "kind": ..., "grid": {...}, "cells": [...],
     "metadata": {"precision_bits": P, "grid_hash": "...", "tool_version": "..."}}

Scans checkpoint atomically while they run, so an interrupted scan resumes
by recomputing only the missing cells.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

from gmpy2 import mpfr

from . import __version__
from .errors import DomainError, GridMismatch, KummerScanError
from .monotone import (
    MonotoneConfig,
    MonotonicityReport,
    Verdict,
    check_monotone,
    sample_grid,
)
from .ratios import Family, RatioSpec, evaluate, f_upper_gap
from .sfcore import working_context

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
# bump whenever a numerical algorithm changes; part of every grid hash
MATH_VERSION = "1"

SKIPPED_DOMAIN = "skipped_domain"
ERROR = "error"

DEFAULT_ABC_AXES: tuple[tuple[str, tuple], ...] = (
    ("a", (0.5, 1, 2, 4)),
    ("b", tuple(1.5 + 0.5 * i for i in range(22))),
    ("c", tuple(0.25 * i for i in range(1, 9))),
)
DEFAULT_ABC_X_MAX = 50.0


def _now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


# ---------------------------------------------------------------------------
# proved bounds


@dataclass(frozen=True)
class BoundSample:
    """One ``f_n(x)`` sample; margins are formed at full precision before rounding."""

    n: int
    x: float
    value: float
    error_bound: float
    lower: float
    upper: float
    lower_margin: float
    upper_margin: float

    @property
    def ok(self) -> bool:
        tol = 10 * self.error_bound
        return self.lower_margin >= -tol and self.upper_margin >= -tol

    def to_dict(self) -> dict:
        return {"n": self.n, "x": self.x, "value": self.value, "error_bound": self.error_bound,
                "lower": self.lower, "upper": self.upper,
                "lower_margin": self.lower_margin, "upper_margin": self.upper_margin}


@dataclass(frozen=True)
class BoundsReport:
    """Two-sided bound check ``(n+1)/(n+2) <= f_n(x) <= 1`` over a grid."""

    n_values: tuple[int, ...]
    x_max: float
    samples: int
    precision_bits: int
    results: tuple[BoundSample, ...]
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def violations(self) -> list[BoundSample]:
        return [s for s in self.results if not s.ok]

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def strict_upper(self) -> bool:
        """Every sample stays strictly below 1."""
        return all(s.upper_margin > 0 for s in self.results)

    def per_n(self) -> list[dict]:
        out = []
        for n in self.n_values:
            rows = [s for s in self.results if s.n == n]
            low = min(rows, key=lambda s: s.lower_margin)
            up = min(rows, key=lambda s: s.upper_margin)
            out.append({
                "params": {"n": n},
                "verdict": "pass" if all(s.ok for s in rows) else "fail",
                "lower_bound": rows[0].lower,
                "upper_bound": rows[0].upper,
                "min_lower_margin": {"x": low.x, "value": low.lower_margin},
                "min_upper_margin": {"x": up.x, "value": up.upper_margin},
                "samples": len(rows),
                "violations": [s.to_dict() for s in rows if not s.ok],
            })
        return out

    def grid_dict(self) -> dict:
        return {"family": "f", "n": list(self.n_values), "x_interval": [0.0, self.x_max],
                "samples": self.samples}

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "bounds",
            "grid": self.grid_dict(),
            "cells": self.per_n(),
            "passed": self.passed,
            "results": [s.to_dict() for s in self.results],
            "metadata": {"precision_bits": self.precision_bits,
                         "grid_hash": _hash(self.grid_dict(), self.precision_bits),
                         "tool_version": __version__, **self.metadata},
        }

    @classmethod
    def from_dict(cls, d: dict) -> BoundsReport:
        g = d["grid"]
        meta = {k: v for k, v in d["metadata"].items()
                if k not in ("precision_bits", "grid_hash", "tool_version")}
        return cls(
            n_values=tuple(g["n"]),
            x_max=g["x_interval"][1],
            samples=g["samples"],
            precision_bits=d["metadata"]["precision_bits"],
            results=tuple(BoundSample(**r) for r in d["results"]),
            metadata=meta,
        )


def verify_bounds(n_range: Iterable[int], x_max: float, samples: int,
                  prec: int = 128) -> BoundsReport:
    """Evaluate ``f_n`` on the blended grid over ``[0, x_max]`` for every n.

    The bounds are theorems, so a FAIL means an implementation bug. Each
    sample passes when it lies within ``10 x`` its error bound of
    ``[(n+1)/(n+2), 1]``.
    """
    ns = tuple(n_range)
    if any(n < 1 for n in ns):
        raise DomainError("verify_bounds needs every n >= 1")
    if not x_max > 0:
        raise DomainError(f"x_max must be positive, got {x_max}")
    if samples < 2:
        raise DomainError(f"need at least 2 samples, got {samples}")
    xs = sample_grid(0.0, float(x_max), samples)
    rows = []
    for n in ns:
        spec = RatioSpec.f(n)
        with working_context(prec):
            lower = mpfr(n + 1) / (n + 2)
        for x in xs:
            pt = evaluate(spec, x, prec)
            gap = f_upper_gap(n, x, prec)
            with working_context(prec):
                rows.append(BoundSample(n, x, float(pt.value), float(pt.value_error),
                                        float(lower), 1.0, float(pt.value - lower),
                                        float(gap.value)))
    return BoundsReport(ns, float(x_max), samples, prec, tuple(rows), {"created": _now()})


# ---------------------------------------------------------------------------
# conjecture sweeps


def verify_conjecture(family: str | Family, n_range: Iterable[int], x_max: float,
                      cfg: MonotoneConfig = MonotoneConfig()) -> list[MonotonicityReport]:
    """One monotonicity report per n for ``f_n`` or ``g_n`` on ``[0, x_max]``."""
    fam = Family(family)
    if fam not in (Family.F_REMAINDER, Family.G_KUMMER):
        raise DomainError(f"conjecture sweeps cover f and g only, got {fam.value}")
    ns = tuple(n_range)
    if any(n < 1 for n in ns):
        raise DomainError("conjecture sweeps need every n >= 1")
    make = RatioSpec.f if fam is Family.F_REMAINDER else RatioSpec.g
    return [check_monotone(make(n), (0.0, float(x_max)), cfg) for n in ns]


def summarize(verdicts: Iterable[str]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for v in verdicts:
        counts[v] = counts.get(v, 0) + 1
    return dict(sorted(counts.items()))


def conjecture_document(reports: Sequence[MonotonicityReport], family: str, x_max: float,
                        cfg: MonotoneConfig) -> dict:
    grid = {"family": Family(family).value, "n": [r.spec.n for r in reports],
            "x_interval": [0.0, float(x_max)], "config": cfg.to_dict()}
    cells = [_report_cell({"n": r.spec.n}, r) for r in reports]
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "conjecture",
        "grid": grid,
        "cells": cells,
        "summary": summarize(c["verdict"] for c in cells),
        "metadata": {"precision_bits": cfg.precision_bits,
                     "grid_hash": _hash(grid, cfg.precision_bits),
                     "tool_version": __version__, "created": _now()},
    }


# ---------------------------------------------------------------------------
# parameter scans


def _canon_value(v: Any) -> Any:
    """JSON-ready grid value: vectors as lists, integral floats as ints."""
    if isinstance(v, (list, tuple)):
        return [_canon_value(x) for x in v]
    if isinstance(v, bool):
        raise DomainError("booleans are not grid values")
    if isinstance(v, float) and v.is_integer():
        return int(v)
    return v


@dataclass(frozen=True)
class ScanGrid:
    """Cross product of parameter axes, scanned on ``[0, x_max]``.

    Axes are ``(name, values)`` pairs over ``a``, ``b``, ``c``. For the pFq
    family each value is itself a vector.
    """

    family: Family
    axes: tuple[tuple[str, tuple], ...]
    x_max: float
    cfg: MonotoneConfig = MonotoneConfig()

    def __post_init__(self) -> None:
        fam = Family(self.family)
        if fam not in (Family.H_ABC, Family.H_PFQ):
            raise DomainError(f"scans cover h_abc and h_pfq, got {fam.value}")
        axes = tuple((str(name), tuple(_freeze(v) for v in values)) for name, values in self.axes)
        names = [name for name, _ in axes]
        if sorted(names) != ["a", "b", "c"]:
            raise DomainError(f"scan axes must be a, b, c; got {names}")
        for name, values in axes:
            if not values:
                raise DomainError(f"axis {name} is empty")
        if not self.x_max > 0:
            raise DomainError(f"x_max must be positive, got {self.x_max}")
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "x_max", float(self.x_max))

    @classmethod
    def abc(cls, a: Sequence, b: Sequence, c: Sequence, x_max: float,
            cfg: MonotoneConfig = MonotoneConfig()) -> ScanGrid:
        return cls(Family.H_ABC, (("a", tuple(a)), ("b", tuple(b)), ("c", tuple(c))), x_max, cfg)

    @classmethod
    def pfq(cls, a: Sequence[Sequence], b: Sequence[Sequence], c: Sequence[Sequence],
            x_max: float, cfg: MonotoneConfig = MonotoneConfig()) -> ScanGrid:
        return cls(Family.H_PFQ, (("a", tuple(a)), ("b", tuple(b)), ("c", tuple(c))), x_max, cfg)

    @classmethod
    def default_abc(cls, cfg: MonotoneConfig = MonotoneConfig()) -> ScanGrid:
        return cls(Family.H_ABC, DEFAULT_ABC_AXES, DEFAULT_ABC_X_MAX, cfg)

    @property
    def size(self) -> int:
        out = 1
        for _, values in self.axes:
            out *= len(values)
        return out

    def cells(self) -> list[dict]:
        names = [name for name, _ in self.axes]
        return [dict(zip(names, combo))
                for combo in itertools.product(*(values for _, values in self.axes))]

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "axes": [[name, [_canon_value(v) for v in values]] for name, values in self.axes],
            "x_interval": [0.0, self.x_max],
            "config": self.cfg.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> ScanGrid:
        return cls(Family(d["family"]), tuple((n, tuple(v)) for n, v in d["axes"]),
                   d["x_interval"][1], MonotoneConfig.from_dict(d["config"]))

    @property
    def grid_hash(self) -> str:
        return _hash(self.to_dict(), self.cfg.precision_bits)


def _freeze(v: Any) -> Any:
    """Hashable canonical grid value: vectors as tuples, integral floats as ints."""
    v = _canon_value(v)
    return tuple(v) if isinstance(v, list) else v


def _hash(grid: dict, precision_bits: int) -> str:
    payload = json.dumps({"grid": grid, "precision_bits": precision_bits,
                          "math_version": MATH_VERSION}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def _cell_key(params: dict) -> str:
    return json.dumps({k: _canon_value(v) for k, v in params.items()}, sort_keys=True)


def _report_cell(params: dict, report: MonotonicityReport) -> dict:
    d = report.to_dict()
    return {"params": {k: _canon_value(v) for k, v in params.items()},
            "verdict": d.pop("verdict"), "witness": d.pop("witness"),
            "min_derivative": d.pop("min_derivative"), "samples": d.pop("samples"),
            "error": None, "report": d}


@dataclass(frozen=True)
class CellResult:
    params: dict
    verdict: str
    report: MonotonicityReport | None = None
    error: str | None = None

    @property
    def key(self) -> str:
        return _cell_key(self.params)

    def to_dict(self) -> dict:
        if self.report is not None:
            return _report_cell(self.params, self.report)
        return {"params": {k: _canon_value(v) for k, v in self.params.items()},
                "verdict": self.verdict, "witness": None, "min_derivative": None,
                "samples": 0, "error": self.error, "report": None}

    @classmethod
    def from_dict(cls, d: dict) -> CellResult:
        params = {k: _freeze(v) for k, v in d["params"].items()}
        report = None
        if d.get("report") is not None:
            rd = dict(d["report"], verdict=d["verdict"], witness=d["witness"],
                      min_derivative=d["min_derivative"], samples=d["samples"])
            report = MonotonicityReport.from_dict(rd)
        return cls(params, d["verdict"], report, d.get("error"))


@dataclass(frozen=True)
class ScanResult:
    grid: ScanGrid
    cells: tuple[CellResult, ...]
    metadata: dict = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return len(self.cells) == self.grid.size

    @property
    def verdicts(self) -> dict[str, int]:
        return summarize(c.verdict for c in self.cells)

    def to_dict(self) -> dict:
        meta = dict(self.metadata)
        meta.update({
            "precision_bits": self.grid.cfg.precision_bits,
            "grid_hash": self.grid.grid_hash,
            "tool_version": __version__,
            "math_version": MATH_VERSION,
            "cells_total": self.grid.size,
            "cells_present": len(self.cells),
            "complete": self.complete,
        })
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "scan",
            "grid": self.grid.to_dict(),
            "cells": [c.to_dict() for c in self.cells],
            "summary": self.verdicts,
            "metadata": meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ScanResult:
        grid = ScanGrid.from_dict(d["grid"])
        if d["metadata"].get("grid_hash") != grid.grid_hash:
            raise GridMismatch("stored grid hash does not match the stored grid")
        derived = {"precision_bits", "grid_hash", "tool_version", "math_version",
                   "cells_total", "cells_present", "complete"}
        meta = {k: v for k, v in d["metadata"].items() if k not in derived}
        return cls(grid, tuple(CellResult.from_dict(c) for c in d["cells"]), meta)


def _spec_for(family: Family, params: dict) -> RatioSpec:
    if family is Family.H_ABC:
        return RatioSpec.h_abc(params["a"], params["b"], params["c"])
    return RatioSpec.h_pfq(params["a"], params["b"], params["c"])


def evaluate_cell(family: Family, params: dict, x_max: float, cfg: MonotoneConfig) -> CellResult:
    """Run one scan cell; domain problems and evaluation errors never escape."""
    try:
        spec = _spec_for(family, params)
    except DomainError as exc:
        return CellResult(params, SKIPPED_DOMAIN, error=str(exc))
    except KummerScanError as exc:
        return CellResult(params, ERROR, error=f"{type(exc).__name__}: {exc}")
    try:
        report = check_monotone(spec, (0.0, x_max), cfg)
    except Exception as exc:  # per-cell isolation: record and carry on
        logger.warning("cell %s failed: %s", params, exc)
        return CellResult(params, ERROR, error=f"{type(exc).__name__}: {exc}")
    return CellResult(params, report.verdict.value, report)


def _cell_task(args: tuple) -> CellResult:
    return evaluate_cell(*args)


def run_scan(
    grid: ScanGrid,
    out: str | os.PathLike | None = None,
    resume: bool = True,
    workers: int = 1,
    checkpoint_every: int = 25,
    order: Sequence[int] | None = None,
) -> ScanResult:
    """Scan every cell of ``grid``, checkpointing to ``out`` when given.

    With ``resume`` and an existing file at ``out``, cells already present
    are kept and only the missing ones are evaluated. ``order`` permutes the
    evaluation order (the result is canonically sorted either way).

    Raises:
        GridMismatch: the file at ``out`` belongs to a different grid.
    """
    all_cells = grid.cells()
    index = {_cell_key(p): i for i, p in enumerate(all_cells)}
    done: dict[str, CellResult] = {}
    created = _now()
    resumed_sessions = 0
    if out is not None and resume and Path(out).exists():
        prior = load_result(out)
        if not isinstance(prior, ScanResult) or prior.grid.grid_hash != grid.grid_hash:
            raise GridMismatch(f"{out} was produced by a different grid")
        done = {c.key: c for c in prior.cells}
        created = prior.metadata.get("created", created)
        resumed_sessions = prior.metadata.get("sessions", 0)

    todo = [i for i in (order if order is not None else range(len(all_cells)))
            if _cell_key(all_cells[i]) not in done]
    computed = 0

    def snapshot(final: bool) -> ScanResult:
        cells = tuple(sorted(done.values(), key=lambda c: index[c.key]))
        meta = {"created": created, "updated": _now(), "sessions": resumed_sessions + 1,
                "cells_computed_this_session": computed,
                "cells_reused": len(all_cells) - len(todo) if resume else 0}
        return ScanResult(grid, cells, meta)

    tasks = [(grid.family, all_cells[i], grid.x_max, grid.cfg) for i in todo]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results: Iterable[CellResult] = pool.map(_cell_task, tasks, chunksize=4)
            for cell in results:
                done[cell.key] = cell
                computed += 1
                if out is not None and computed % checkpoint_every == 0:
                    save_result(snapshot(False), out)
    else:
        for task in tasks:
            cell = _cell_task(task)
            done[cell.key] = cell
            computed += 1
            if out is not None and computed % checkpoint_every == 0:
                save_result(snapshot(False), out)

    result = snapshot(True)
    if out is not None:
        save_result(result, out)
    return result


def scan_abc(grid: ScanGrid, **kwargs: Any) -> ScanResult:
    """Monotonicity scan of ``h(a, b, c, x)``; cells with ``b - c <= 0`` are skipped."""
    if grid.family is not Family.H_ABC:
        raise DomainError("scan_abc needs an h_abc grid")
    return run_scan(grid, **kwargs)


def scan_pfq(grid: ScanGrid, **kwargs: Any) -> ScanResult:
    """Monotonicity scan of the pFq ratio; divergent cells are recorded as errors."""
    if grid.family is not Family.H_PFQ:
        raise DomainError("scan_pfq needs an h_pfq grid")
    return run_scan(grid, **kwargs)


def resume_scan(path: str | os.PathLike, grid: ScanGrid, **kwargs: Any) -> ScanResult:
    """Continue the scan stored at ``path``, evaluating only missing cells."""
    return run_scan(grid, out=path, resume=True, **kwargs)


# ---------------------------------------------------------------------------
# persistence


def dumps(result: ScanResult | BoundsReport | dict) -> str:
    doc = result if isinstance(result, dict) else result.to_dict()
    return json.dumps(doc, indent=1, sort_keys=True)


def save_result(result: ScanResult | BoundsReport | dict, path: str | os.PathLike) -> None:
    """Write ``result`` as JSON, atomically replacing any existing file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(dumps(result))
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_result(path: str | os.PathLike) -> ScanResult | BoundsReport | dict:
    """Load a result file; conjecture documents come back as plain dicts."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise DomainError(f"unsupported schema_version {doc.get('schema_version')!r}")
    kind = doc.get("kind")
    if kind == "scan":
        return ScanResult.from_dict(doc)
    if kind == "bounds":
        return BoundsReport.from_dict(doc)
    return doc


__all__ = [
    "BoundSample",
    "BoundsReport",
    "CellResult",
    "DEFAULT_ABC_AXES",
    "ERROR",
    "SKIPPED_DOMAIN",
    "ScanGrid",
    "ScanResult",
    "conjecture_document",
    "evaluate_cell",
    "load_result",
    "resume_scan",
    "run_scan",
    "save_result",
    "scan_abc",
    "scan_pfq",
    "summarize",
    "verify_bounds",
    "verify_conjecture",
]
