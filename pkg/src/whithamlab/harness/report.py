"""Scaling reports: rows, log-log slope fits and deterministic persistence.

CSV layout (fixed header)::

    experiment,id,mu,eps,t,metric,value

``id`` packs the provenance of the row (grid, stepper, seed, code version).
Floats are written with ``repr`` so that a rerun on the same platform gives
byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from scipy import stats

CSV_HEADER = ("experiment", "id", "mu", "eps", "t", "metric", "value")
CONFIDENCE = 0.95
MIN_POINTS = 3
MIN_OCTAVES = 1.0


@dataclass(frozen=True)
class Row:
    experiment: str
    id: str
    mu: Optional[float]
    eps: Optional[float]
    t: Optional[float]
    metric: str
    value: float


@dataclass
class SlopeFit:
    """Exponents of ``value ~ C mu^a eps^b t^c``; ``None`` where not fitted."""

    slope_mu: Optional[float] = None
    slope_eps: Optional[float] = None
    slope_t: Optional[float] = None
    half_width_mu: Optional[float] = None
    half_width_eps: Optional[float] = None
    half_width_t: Optional[float] = None
    n_points: int = 0
    note: str = ""


@dataclass
class ScalingReport:
    experiment: str
    rows: List[Row] = field(default_factory=list)
    fitted_slopes: Dict[str, SlopeFit] = field(default_factory=dict)
    verdicts: Dict[str, bool] = field(default_factory=dict)
    witnesses: Dict[str, str] = field(default_factory=dict)
    provenance: Dict[str, str] = field(default_factory=dict)

    def add(self, row: Row):
        self.rows.append(row)

    def values(self, metric: str, **match) -> List[Row]:
        out = []
        for r in self.rows:
            if r.metric != metric:
                continue
            if all(getattr(r, k) == v for k, v in match.items()):
                out.append(r)
        return out

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def merge(self, other: "ScalingReport") -> "ScalingReport":
        out = ScalingReport(
            self.experiment if self.experiment == other.experiment else f"{self.experiment}+{other.experiment}",
            self.rows + other.rows,
            {**self.fitted_slopes, **other.fitted_slopes},
            {**self.verdicts, **other.verdicts},
            {**self.witnesses, **other.witnesses},
            {**self.provenance, **other.provenance},
        )
        return out


# ---------------------------------------------------------------------------
# fitting


class FitRefused(ValueError):
    """Too few points or too little dynamic range for a slope."""


def _octaves(x: np.ndarray) -> float:
    return float(np.log2(np.max(x) / np.min(x)))


def _check_axis(name: str, x: np.ndarray):
    if np.any(x <= 0):
        raise FitRefused(f"{name} must be positive for a log-log fit")
    if np.unique(x).size < MIN_POINTS:
        raise FitRefused(f"need at least {MIN_POINTS} distinct {name} values, got {np.unique(x).size}")
    if _octaves(x) < MIN_OCTAVES:
        raise FitRefused(f"{name} spans {_octaves(x):.2f} octaves, below {MIN_OCTAVES}")


def loglog_fit(columns: Dict[str, Sequence[float]], y: Sequence[float]):
    """Least squares ``log y = c + sum_k a_k log x_k``.

    Returns ``{name: (slope, half_width)}`` with ``CONFIDENCE`` t-intervals.
    Half widths are ``inf`` when the fit has no residual degrees of freedom.
    """
    y = np.asarray(y, dtype=float)
    if np.any(~np.isfinite(y)) or np.any(y <= 0):
        raise FitRefused("values must be finite and positive")
    names = list(columns)
    X = [np.ones_like(y)]
    for name in names:
        x = np.asarray(columns[name], dtype=float)
        _check_axis(name, x)
        X.append(np.log(x))
    A = np.stack(X, axis=1)
    ly = np.log(y)
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    dof = len(y) - A.shape[1]
    if dof > 0:
        resid = ly - A @ coef
        s2 = float(resid @ resid) / dof
        cov = s2 * np.linalg.inv(A.T @ A)
        q = stats.t.ppf(0.5 + CONFIDENCE / 2, dof)
        hw = q * np.sqrt(np.diag(cov))
    else:
        hw = np.full(A.shape[1], np.inf)
    return {name: (float(coef[i + 1]), float(hw[i + 1])) for i, name in enumerate(names)}


def fit_rows(rows: Iterable[Row], axes: Sequence[str]) -> SlopeFit:
    """Fit the exponents along ``axes`` (any of ``mu``, ``eps``, ``t``, ``total``).

    ``total`` fits against ``eps`` along a line ``mu = eps`` and reports
    the result as ``slope_eps``.
    """
    rows = [r for r in rows if r.value is not None and np.isfinite(r.value)]
    fit = SlopeFit(n_points=len(rows))
    cols = {}
    for ax in axes:
        src = "eps" if ax == "total" else ax
        cols[ax] = [getattr(r, src) for r in rows]
    try:
        res = loglog_fit(cols, [r.value for r in rows])
    except FitRefused as exc:
        fit.note = f"refused: {exc}"
        return fit
    for ax, (s, hw) in res.items():
        name = "eps" if ax == "total" else ax
        setattr(fit, f"slope_{name}", s)
        setattr(fit, f"half_width_{name}", hw)
    if "total" in axes:
        fit.note = "total order along mu = eps"
    return fit


def linear_growth(t: Sequence[float], e: Sequence[float]):
    """Least squares ``e = a + b t``; returns ``(a, b)``."""
    res = stats.linregress(np.asarray(t, float), np.asarray(e, float))
    return float(res.intercept), float(res.slope)


# ---------------------------------------------------------------------------
# persistence


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float) or isinstance(v, np.floating):
        return repr(float(v))
    return str(v)


def to_csv(report: ScalingReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in report.rows:
        w.writerow([r.experiment, r.id, _fmt(r.mu), _fmt(r.eps), _fmt(r.t), r.metric, _fmt(r.value)])
    return buf.getvalue()


def _parse(s: str) -> Optional[float]:
    return None if s == "" else float(s)


def rows_from_csv(text: str) -> List[Row]:
    rd = csv.reader(io.StringIO(text))
    header = tuple(next(rd))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    return [Row(e, i, _parse(m), _parse(p), _parse(t), k, float(v)) for e, i, m, p, t, k, v in rd]


def _clean(v):
    # json cannot hold inf/nan; write them as strings
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_clean(x) for x in v]
    return v


def _unclean(v):
    if isinstance(v, str) and v in ("inf", "-inf", "nan"):
        return float(v)
    return v


def to_json(report: ScalingReport) -> str:
    """JSON report; the row table is written one row per line."""
    head = {
        "experiment": report.experiment,
        "provenance": dict(sorted(report.provenance.items())),
        "verdicts": dict(sorted(report.verdicts.items())),
        "witnesses": dict(sorted(report.witnesses.items())),
        "fitted_slopes": {k: asdict(v) for k, v in sorted(report.fitted_slopes.items())},
    }
    text = json.dumps(_clean(head), indent=2)[:-2]
    table = [list(CSV_HEADER)] + [[r.experiment, r.id, r.mu, r.eps, r.t, r.metric, r.value] for r in report.rows]
    lines = ",\n".join("    " + json.dumps(_clean(row)) for row in table)
    return f'{text},\n  "rows": [\n{lines}\n  ]\n}}\n'


def from_json(text: str) -> ScalingReport:
    d = json.loads(text)
    rows = [Row(*[_unclean(x) for x in r]) for r in d["rows"][1:]]
    fits = {k: SlopeFit(**{f: _unclean(x) for f, x in v.items()}) for k, v in d["fitted_slopes"].items()}
    return ScalingReport(d["experiment"], rows, fits, d["verdicts"], d.get("witnesses", {}), d.get("provenance", {}))


def render(report: ScalingReport, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(report)
    if fmt == "json":
        return to_json(report)
    raise ValueError(f"unknown format {fmt!r}")


def summary(report: ScalingReport) -> str:
    """Human-readable digest of fits and verdicts."""
    lines = [f"experiment: {report.experiment}  ({len(report.rows)} rows)"]
    for name, f in sorted(report.fitted_slopes.items()):
        parts = []
        for ax in ("mu", "eps", "t"):
            s = getattr(f, f"slope_{ax}")
            if s is not None:
                parts.append(f"{ax}: {s:.3f} +- {getattr(f, f'half_width_{ax}'):.3f}")
        lines.append(f"  fit {name}: " + (", ".join(parts) or f.note))
    for name, ok in sorted(report.verdicts.items()):
        line = f"  {'PASS' if ok else 'FAIL'} {name}"
        if not ok and name in report.witnesses:
            line += f"  witness: {report.witnesses[name]}"
        lines.append(line)
    return "\n".join(lines)
