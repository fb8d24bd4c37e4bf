"""Parameter sweeps: bifurcation diagrams, weight-bifurcation search, shape grids.

Sweep points are independent work items.  They are executed either
inline or on a process pool (``GRED_WORKERS`` overrides the pool size),
and results are always collected back in grid order, so the output is
deterministic and independent of the degree of parallelism.

CSV output is RFC-4180 style with a header row, '.' decimal separator,
and 17 significant digits.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial

import numpy as np

from . import _kernels
from .classic import SystemParams
from .errors import DomainError, GredError
from .model import ControlParams, NormalizedModel, dimensionless_constants, make_model
from .special import BetaShape

WORKERS_ENV = "GRED_WORKERS"

SWEEPABLE = ("x_min", "x_max", "w", "p_max", "alpha", "beta", "A1", "A2", "N", "d")


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError as e:
            raise DomainError(f"{WORKERS_ENV} must be an integer, got {env!r}") from e
        if n >= 1:
            return n
    return os.cpu_count() or 1


@dataclass(frozen=True)
class ModelSpec:
    """Rebuildable model description used as the base of a sweep.

    Either carries physical system parameters (from which the
    dimensionless constants are derived together with p_max) or the
    explicit constants themselves.  Sweeping A1 or A2 switches the spec
    to explicit mode; sweeping N or d requires system parameters.
    """

    control: ControlParams
    system: SystemParams | None = None
    a1: float | None = None
    a2: float | None = None

    def __post_init__(self) -> None:
        if self.system is None and (self.a1 is None or self.a2 is None):
            raise DomainError(
                "ModelSpec needs either system parameters or both constants a1, a2"
            )

    def constants(self) -> tuple[float, float]:
        if self.a1 is not None and self.a2 is not None:
            return self.a1, self.a2
        return dimensionless_constants(self.system, self.control.p_max)

    def build(self) -> NormalizedModel:
        a1, a2 = self.constants()
        return make_model(a1, a2, self.control)

    def with_param(self, name: str, value: float) -> "ModelSpec":
        """New spec with one sweepable parameter replaced."""
        if name in ("x_min", "x_max", "w", "p_max"):
            return replace(self, control=replace(self.control, **{name: value}))
        if name == "alpha":
            shape = BetaShape(value, self.control.shape.beta)
            return replace(self, control=replace(self.control, shape=shape))
        if name == "beta":
            shape = BetaShape(self.control.shape.alpha, value)
            return replace(self, control=replace(self.control, shape=shape))
        if name in ("A1", "A2"):
            a1, a2 = self.constants()
            if name == "A1":
                a1 = value
            else:
                a2 = value
            return ModelSpec(control=self.control, system=None, a1=a1, a2=a2)
        if name in ("N", "d"):
            if self.system is None:
                raise DomainError(f"sweeping {name} requires system parameters")
            if self.a1 is not None or self.a2 is not None:
                raise DomainError(f"cannot sweep {name} on an explicit-constant spec")
            return replace(self, system=replace(self.system, **{name: value}))
        raise DomainError(f"unknown sweep parameter {name!r}; valid: {SWEEPABLE}")


@dataclass(frozen=True)
class SweepAxis:
    """One swept scalar parameter and its inclusive grid."""

    parameter: str
    lo: float
    hi: float
    points: int

    def __post_init__(self) -> None:
        if self.parameter not in SWEEPABLE:
            raise DomainError(
                f"unknown sweep parameter {self.parameter!r}; valid: {SWEEPABLE}"
            )
        if not self.lo < self.hi:
            raise DomainError(f"need lo < hi, got lo={self.lo} hi={self.hi}")
        if self.points < 2:
            raise DomainError(f"points must be >= 2, got {self.points}")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class BifRow:
    """One bifurcation-diagram row; grid points that fail to build a
    valid model are kept as rows with ``skipped`` set to the reason."""

    parameter: str
    value: float
    theta_l: float | None = None
    theta_r: float | None = None
    x_star: float | None = None
    lyapunov: float | None = None
    diameter: float | None = None
    orbit: tuple[float, ...] | None = None
    skipped: str | None = None


def _bif_point(
    spec: ModelSpec,
    parameter: str,
    transient: int,
    samples: int,
    lyap_samples: int,
    job: tuple[float, float | None],
) -> BifRow:
    value, x0 = job
    try:
        m = spec.with_param(parameter, value).build()
    except GredError as e:
        return BifRow(parameter=parameter, value=value, skipped=str(e))
    if x0 is None:
        x0 = 0.5 * (m.theta_l + m.theta_r)
    orbit, diameter, lyap = _kernels.orbit_with_lyapunov(
        x0, transient, samples, lyap_samples, *m.packed()
    )
    fp = m.fixed_point()
    return BifRow(
        parameter=parameter,
        value=value,
        theta_l=m.theta_l,
        theta_r=m.theta_r,
        x_star=fp.x_star if fp is not None else None,
        lyapunov=lyap,
        diameter=diameter,
        orbit=tuple(float(v) for v in orbit),
    )


def _run_ordered(func, items, workers: int) -> list:
    if workers <= 1 or len(items) < 4:
        return [func(it) for it in items]
    chunk = max(1, len(items) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=chunk))


def bifurcation_sweep(
    spec: ModelSpec,
    axis: SweepAxis,
    transient: int = 500,
    samples: int = 50,
    lyap_samples: int = 5000,
    workers: int | None = None,
    continuation: bool = False,
) -> list[BifRow]:
    """Rebuild, iterate, and record the model at every grid value.

    The initial condition is the core midpoint, recomputed per point.
    With ``continuation=True`` each point instead starts from the last
    orbit state of the previous one (hysteresis studies); that mode is
    inherently sequential.
    """
    values = axis.values()
    func = partial(_bif_point, spec, axis.parameter, transient, samples, lyap_samples)
    if continuation:
        rows: list[BifRow] = []
        x0: float | None = None
        for v in values:
            row = func((float(v), x0))
            rows.append(row)
            if row.orbit:
                x0 = row.orbit[-1]
        return rows
    jobs = [(float(v), None) for v in values]
    if workers is None:
        workers = default_workers()
    return _run_ordered(func, jobs, workers)


@dataclass(frozen=True)
class WBifScan:
    """Scan policy for locating the loss of the fixed-point attractor in w.

    The stability predicate at a given w is "post-transient orbit
    diameter below diameter_tol", started from the core midpoint.  The
    reported value is the first failing w of a coarse ascending scan,
    bisected down to refine_tol against the last passing one.
    """

    w_lo: float = 0.01
    w_hi: float = 0.99
    coarse: int = 50
    refine_tol: float = 1e-4
    diameter_tol: float = 1e-4
    transient: int = 500
    samples: int = 50

    def __post_init__(self) -> None:
        if not 0.0 < self.w_lo < self.w_hi < 1.0:
            raise DomainError(
                f"need 0 < w_lo < w_hi < 1, got w_lo={self.w_lo} w_hi={self.w_hi}"
            )
        if self.coarse < 2:
            raise DomainError(f"coarse must be >= 2, got {self.coarse}")
        if self.refine_tol <= 0 or self.diameter_tol <= 0:
            raise DomainError("refine_tol and diameter_tol must be positive")


def _orbit_settled(m: NormalizedModel, scan: WBifScan) -> bool:
    x0 = 0.5 * (m.theta_l + m.theta_r)
    diameter = _kernels.orbit_diameter(x0, scan.transient, scan.samples, *m.packed())
    return diameter < scan.diameter_tol


def w_bif_status(spec: ModelSpec, scan: WBifScan) -> tuple[float | None, str]:
    """(w_bif, status); status is one of ok, stable, unstable_at_lo, invalid: ...

    "stable" means the predicate held across the whole scan range,
    "unstable_at_lo" that it already failed at w_lo; both report no
    bifurcation value.
    """
    try:
        base = spec.with_param("w", scan.w_lo).build()
    except GredError as e:
        return None, f"invalid: {e}"
    last_ok: float | None = None
    first_fail: float | None = None
    for wv in np.linspace(scan.w_lo, scan.w_hi, scan.coarse):
        wv = float(wv)
        if _orbit_settled(base.with_w(wv), scan):
            last_ok = wv
        else:
            first_fail = wv
            break
    if first_fail is None:
        return None, "stable"
    if last_ok is None:
        return None, "unstable_at_lo"
    lo, hi = last_ok, first_fail
    while hi - lo > scan.refine_tol:
        mid = 0.5 * (lo + hi)
        if _orbit_settled(base.with_w(mid), scan):
            lo = mid
        else:
            hi = mid
    return hi, "ok"


def w_bif(spec: ModelSpec, scan: WBifScan | None = None) -> float | None:
    """Smallest scanned w at which the fixed-point attractor is lost.

    None when the orbit stays settled across the whole range or is
    already unsettled at w_lo.
    """
    if scan is None:
        scan = WBifScan()
    value, _status = w_bif_status(spec, scan)
    return value


@dataclass(frozen=True)
class GridCell:
    """One (alpha, beta) cell of a robustness grid."""

    alpha: float
    beta: float
    w_bif: float | None
    status: str


def _grid_cell(spec: ModelSpec, scan: WBifScan, ab: tuple[float, float]) -> GridCell:
    alpha, beta = ab
    try:
        cell_spec = spec.with_param("alpha", alpha).with_param("beta", beta)
    except GredError as e:
        return GridCell(alpha=alpha, beta=beta, w_bif=None, status=f"invalid: {e}")
    value, status = w_bif_status(cell_spec, scan)
    return GridCell(alpha=alpha, beta=beta, w_bif=value, status=status)


def alpha_beta_grid(
    spec: ModelSpec,
    alpha_lo: float = 0.002,
    alpha_hi: float = 1.5,
    beta_lo: float = 0.002,
    beta_hi: float = 1.5,
    points: int = 40,
    scan: WBifScan | None = None,
    workers: int | None = None,
) -> list[GridCell]:
    """w_bif over a rectangular shape-parameter grid, row-major in (alpha, beta)."""
    if scan is None:
        scan = WBifScan()
    if points < 2:
        raise DomainError(f"points must be >= 2, got {points}")
    alphas = np.linspace(alpha_lo, alpha_hi, points)
    betas = np.linspace(beta_lo, beta_hi, points)
    jobs = [(float(a), float(b)) for a in alphas for b in betas]
    func = partial(_grid_cell, spec, scan)
    if workers is None:
        workers = default_workers()
    return _run_ordered(func, jobs, workers)


# -- CSV output ------------------------------------------------------


def _cell_text(v: float | None) -> str:
    if v is None:
        return ""
    return format(v, ".17g")


def write_bif_csv(rows: list[BifRow], fh) -> None:
    """Bifurcation rows as CSV: param,value,theta_l,theta_r,x_star,lyapunov,
    diameter,orbit_0..orbit_{k-1}.  Skipped rows keep their value column
    and leave the computed fields empty."""
    k = max((len(r.orbit) for r in rows if r.orbit), default=0)
    writer = csv.writer(fh, lineterminator="\r\n")
    header = ["param", "value", "theta_l", "theta_r", "x_star", "lyapunov", "diameter"]
    header += [f"orbit_{i}" for i in range(k)]
    writer.writerow(header)
    for r in rows:
        rec = [
            r.parameter,
            _cell_text(r.value),
            _cell_text(r.theta_l),
            _cell_text(r.theta_r),
            _cell_text(r.x_star),
            _cell_text(r.lyapunov),
            _cell_text(r.diameter),
        ]
        orbit = r.orbit or ()
        rec += [_cell_text(v) for v in orbit]
        rec += [""] * (k - len(orbit))
        writer.writerow(rec)


def write_grid_csv(cells: list[GridCell], fh) -> None:
    """Grid cells as CSV: alpha,beta,w_bif,status."""
    writer = csv.writer(fh, lineterminator="\r\n")
    writer.writerow(["alpha", "beta", "w_bif", "status"])
    for cell in cells:
        writer.writerow(
            [
                _cell_text(cell.alpha),
                _cell_text(cell.beta),
                _cell_text(cell.w_bif),
                cell.status,
            ]
        )


def bif_csv_text(rows: list[BifRow]) -> str:
    buf = io.StringIO()
    write_bif_csv(rows, buf)
    return buf.getvalue()


def grid_csv_text(cells: list[GridCell]) -> str:
    buf = io.StringIO()
    write_grid_csv(cells, buf)
    return buf.getvalue()


# Bin edges used when summarizing a grid into robustness bands.
WBIF_BIN_WIDTH = 0.15


def wbif_band(cell: GridCell, w_hi: float) -> int | None:
    """Band index of a cell: floor(w_bif / 0.15); stable cells count as the
    band of the scan ceiling; invalid/unsettled cells have no band."""
    if cell.status == "ok":
        return int(math.floor(cell.w_bif / WBIF_BIN_WIDTH))
    if cell.status == "stable":
        return int(math.floor(w_hi / WBIF_BIN_WIDTH))
    return None
