"""Mechanical verification of global-stability sufficient conditions.

A family of theorems certifies that the interior fixed point attracts
every initial condition in [0, 1], provided (a) the open core
(theta_l, theta_r) is invariant, (b) the pair {theta_l, theta_r} is not
a 2-cycle, and (c) the core restriction of the map has a shape covered
by one of the sufficient conditions (monotone, or unimodal with a
minimum, possibly convex).  :func:`verdict` evaluates those conditions
numerically, exactly as stated, and reports the first certificate whose
full checklist passes.

A verdict of ``certified_by is None`` means "not certified here", never
"proved unstable": the conditions are sufficient, not necessary.
Strict theorem inequalities are checked with a small guard band so that
razor's-edge parameter settings are not certified on floating-point
noise.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .model import NormalizedModel

STRICT_MARGIN = 1e-9
TWO_CYCLE_TOL = 1e-12
CLASSIFY_GRID = 10_000
CONVEXITY_GRID = 10_000
_DEGENERATE_CORE = 1e-13


class ShapeKind(enum.Enum):
    INCREASING = "strictly_increasing"
    DECREASING = "strictly_decreasing"
    UNIMODAL_MIN = "unimodal_min"
    UNCLASSIFIED = "unclassified"


class Certificate(enum.Enum):
    MONOTONE_INCREASING = "monotone_increasing"
    MONOTONE_DECREASING = "monotone_decreasing"
    CONVEX_DECREASING = "convex_decreasing"
    UNIMODAL_MIN_LEFT = "unimodal_min_left"
    UNIMODAL_MIN_RIGHT = "unimodal_min_right"
    CONVEX_UNIMODAL_RIGHT = "convex_unimodal_right"


@dataclass(frozen=True)
class ShapeClass:
    """Shape of the core restriction, with the sampled evidence."""

    kind: ShapeKind
    x_c: float | None = None
    evidence: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CoreInvariance:
    """Outcome of the core-invariance check with the attained extremes."""

    ok: bool
    low: float
    high: float

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Condition:
    """One evaluated requirement: name, statement, outcome, numbers."""

    name: str
    description: str
    passed: bool
    values: dict


@dataclass(frozen=True)
class StabilityVerdict:
    certified_by: Certificate | None
    checklist: tuple[Condition, ...]
    shape: ShapeClass
    x_star: float | None

    def to_dict(self) -> dict:
        return {
            "certified_by": self.certified_by.value if self.certified_by else None,
            "shape": self.shape.kind.value,
            "x_c": self.shape.x_c,
            "x_star": self.x_star,
            "checklist": [
                {
                    "name": c.name,
                    "description": c.description,
                    "passed": c.passed,
                    "values": c.values,
                }
                for c in self.checklist
            ],
        }

    def format_report(self) -> str:
        lines = []
        if self.certified_by is None:
            lines.append("certified_by: none (no sufficient condition verified)")
        else:
            lines.append(f"certified_by: {self.certified_by.value}")
        lines.append(f"core shape: {self.shape.kind.value}")
        if self.shape.x_c is not None:
            lines.append(f"critical point x_c = {self.shape.x_c:.12g}")
        if self.x_star is not None:
            lines.append(f"fixed point x* = {self.x_star:.12g}")
        for c in self.checklist:
            mark = "PASS" if c.passed else "FAIL"
            vals = ", ".join(f"{k}={_fmt(v)}" for k, v in c.values.items())
            lines.append(f"[{mark}] {c.name}: {c.description} ({vals})")
        return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def endpoints_not_2cycle(m: NormalizedModel) -> bool:
    """True unless theta_l + theta_r equals 1 (to within 1e-12).

    When the sum is 1 the two core endpoints could form a 2-cycle that
    escapes the core, which defeats every certificate here.
    """
    return abs(m.theta_l + m.theta_r - 1.0) > TWO_CYCLE_TOL


def convexity_sufficient(m: NormalizedModel) -> bool:
    """Closed-form shape test implying upward convexity of the core.

    True when the ramp coordinate of theta_r stays below alpha/(alpha+beta)
    (for alpha <= beta) or (alpha+2)/(alpha+beta+4) (for alpha > beta).
    Inconclusive (False) does not imply non-convexity.
    """
    c = m.controls
    z_r = (m.theta_r - c.x_min) / (c.x_max - c.x_min)
    a, b = c.shape.alpha, c.shape.beta
    if a <= b:
        return z_r <= a / (a + b)
    return z_r <= (a + 2.0) / (a + b + 4.0)


def convexity_pointwise(m: NormalizedModel, n: int = CONVEXITY_GRID) -> bool:
    """Grid check of 3*J - 2*h > 0 across the core (implies convexity)."""
    c = m.controls
    margins = _kernels.grid_convexity_margin(
        n, m.theta_l, m.theta_r, c.x_min, c.x_max, c.shape.alpha, c.shape.beta
    )
    return bool(np.all(margins > 0.0))


def _is_convex(m: NormalizedModel) -> bool:
    return convexity_sufficient(m) or convexity_pointwise(m)


def _bisect_critical_point(m: NormalizedModel, lo: float, hi: float) -> float:
    """Root of the core derivative inside a sign-changing bracket."""
    c = m.controls
    args = (c.w, m.a1, m.a2, c.x_min, c.x_max, c.shape.alpha, c.shape.beta)
    s_lo = _kernels.core_slope(lo, *args)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        s = _kernels.core_slope(mid, *args)
        if s == 0.0:
            return mid
        if (s < 0.0) == (s_lo < 0.0):
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    return 0.5 * (lo + hi)


def classify_shape(m: NormalizedModel) -> ShapeClass:
    """Classify the core restriction as increasing, decreasing, or unimodal.

    When the core is provably convex, the one-sided derivatives at the
    two ends settle the question; otherwise the derivative is sampled on
    a grid and the number of sign changes decides.  Two or more sign
    changes (or a local maximum) yield UNCLASSIFIED.
    """
    if m.theta_r - m.theta_l <= _DEGENERATE_CORE:
        return ShapeClass(ShapeKind.UNCLASSIFIED, evidence={"degenerate_core": True})
    d_l = m.slope(m.theta_l, side="right")
    d_r = m.slope(m.theta_r, side="left")
    convex = _is_convex(m)
    evidence: dict = {"slope_left": d_l, "slope_right": d_r, "convex": convex}
    if convex:
        if d_l >= 0.0:
            return ShapeClass(ShapeKind.INCREASING, evidence=evidence)
        if d_r <= 0.0:
            return ShapeClass(ShapeKind.DECREASING, evidence=evidence)
        x_c = _bisect_critical_point(m, m.theta_l, m.theta_r)
        return ShapeClass(ShapeKind.UNIMODAL_MIN, x_c=x_c, evidence=evidence)
    c = m.controls
    slopes = _kernels.grid_slope_values(
        CLASSIFY_GRID,
        m.theta_l,
        m.theta_r,
        c.w,
        m.a1,
        m.a2,
        c.x_min,
        c.x_max,
        c.shape.alpha,
        c.shape.beta,
    )
    signs = np.sign(slopes)
    nonzero = signs[signs != 0.0]
    changes = int(np.count_nonzero(np.diff(nonzero) != 0.0))
    evidence["sign_changes"] = changes
    if changes == 0:
        if np.all(slopes >= 0.0):
            return ShapeClass(ShapeKind.INCREASING, evidence=evidence)
        if np.all(slopes <= 0.0):
            return ShapeClass(ShapeKind.DECREASING, evidence=evidence)
        return ShapeClass(ShapeKind.UNCLASSIFIED, evidence=evidence)
    if changes == 1 and nonzero[0] < 0.0:
        idx = int(np.argmax(nonzero > 0.0))
        span = m.theta_r - m.theta_l
        n = CLASSIFY_GRID
        lo = m.theta_l + span * idx / (n + 1.0)
        hi = m.theta_l + span * (idx + 1.0) / (n + 1.0)
        x_c = _bisect_critical_point(m, lo, hi)
        return ShapeClass(ShapeKind.UNIMODAL_MIN, x_c=x_c, evidence=evidence)
    return ShapeClass(ShapeKind.UNCLASSIFIED, evidence=evidence)


def core_invariant(
    m: NormalizedModel, shape: ShapeClass | None = None
) -> CoreInvariance:
    """Whether the map sends the open core strictly into itself.

    For monotone and unimodal-minimum cores the extremes are attained at
    the two edge limits and the critical point, so three evaluations
    suffice; unclassified shapes fall back to a dense grid.
    """
    if shape is None:
        shape = classify_shape(m)
    left, right = m.core_edge_values()
    candidates = [left, right]
    if shape.kind is ShapeKind.UNIMODAL_MIN and shape.x_c is not None:
        candidates.append(m.step(shape.x_c))
    if shape.kind is ShapeKind.UNCLASSIFIED:
        values = _kernels.grid_step_values(CLASSIFY_GRID, m.theta_l, m.theta_r, *m.packed())
        candidates.extend((float(values.min()), float(values.max())))
    low = min(candidates)
    high = max(candidates)
    ok = (low - m.theta_l) >= STRICT_MARGIN and (m.theta_r - high) >= STRICT_MARGIN
    return CoreInvariance(ok=ok, low=low, high=high)


def _min_core_slope(m: NormalizedModel, lo: float, hi: float) -> float:
    c = m.controls
    slopes = _kernels.grid_slope_values(
        CLASSIFY_GRID,
        lo,
        hi,
        c.w,
        m.a1,
        m.a2,
        c.x_min,
        c.x_max,
        c.shape.alpha,
        c.shape.beta,
    )
    return float(slopes.min())


def verdict(m: NormalizedModel) -> StabilityVerdict:
    """Evaluate the certification pipeline and return the full checklist.

    Gate conditions (fixed-point existence, core invariance, 2-cycle
    exclusion) are evaluated first; the applicable shape-specific
    certificates are then attempted cheapest-first, and the first one
    whose conditions all hold is reported.
    """
    checklist: list[Condition] = []
    c = m.controls
    w = c.w

    fp = m.fixed_point()
    x_star = fp.x_star if fp is not None else None
    exists = m.a1 < m.a2 + c.x_max - STRICT_MARGIN and fp is not None
    checklist.append(
        Condition(
            "fixed_point_exists",
            "a1 < a2 + x_max and the fixed point is resolvable",
            exists,
            {"a1": m.a1, "a2_plus_x_max": m.a2 + c.x_max, "x_star": x_star},
        )
    )
    shape = classify_shape(m)
    if not exists:
        return StabilityVerdict(None, tuple(checklist), shape, x_star)

    inv = core_invariant(m, shape)
    checklist.append(
        Condition(
            "core_invariant",
            "the map sends (theta_l, theta_r) strictly into itself",
            inv.ok,
            {
                "low": inv.low,
                "high": inv.high,
                "theta_l": m.theta_l,
                "theta_r": m.theta_r,
            },
        )
    )
    no_cycle = endpoints_not_2cycle(m)
    checklist.append(
        Condition(
            "no_endpoint_2cycle",
            "theta_l + theta_r differs from 1",
            no_cycle,
            {"sum": m.theta_l + m.theta_r},
        )
    )
    if not (inv.ok and no_cycle):
        return StabilityVerdict(None, tuple(checklist), shape, x_star)

    pos_gap = max(m.a1 - m.a2, 0.0)
    width_bound = (m.theta_r - m.theta_l) / (1.0 - m.theta_l)
    convex = _is_convex(m)

    def done(cert: Certificate) -> StabilityVerdict:
        return StabilityVerdict(cert, tuple(checklist), shape, x_star)

    def cond(name: str, description: str, passed: bool, values: dict) -> bool:
        checklist.append(Condition(name, description, passed, values))
        return passed

    if shape.kind is ShapeKind.INCREASING:
        # nothing beyond the gates is required
        if cond(
            "monotone_increasing.applicable",
            "core restriction strictly increasing",
            True,
            {"slope_left": shape.evidence.get("slope_left")},
        ):
            return done(Certificate.MONOTONE_INCREASING)

    if shape.kind is ShapeKind.DECREASING:
        denom = m.theta_r - pos_gap
        dec_bound = (
            min(width_bound, (m.theta_r - m.theta_l) / denom)
            if denom > 0.0
            else -math.inf
        )
        w_ok = cond(
            "decreasing.w_bound",
            "w <= min((theta_r-theta_l)/(1-theta_l), (theta_r-theta_l)/(theta_r-(a1-a2)+))",
            w <= dec_bound,
            {"w": w, "bound": dec_bound},
        )
        if w_ok:
            min_slope = _min_core_slope(m, m.theta_l, m.theta_r)
            if cond(
                "monotone_decreasing.slope_above_minus_one",
                "core derivative stays above -1",
                min_slope > -1.0 + STRICT_MARGIN,
                {"min_slope": min_slope},
            ):
                return done(Certificate.MONOTONE_DECREASING)
            edge_slope = m.slope(m.theta_l, side="right")
            if cond(
                "convex_decreasing.edge_slope",
                "core convex and derivative at theta_l+ is >= -1",
                convex and edge_slope >= -1.0,
                {"convex": convex, "slope_at_theta_l": edge_slope},
            ):
                return done(Certificate.CONVEX_DECREASING)

    if shape.kind is ShapeKind.UNIMODAL_MIN and shape.x_c is not None:
        x_c = shape.x_c
        if x_c <= x_star:
            w_ok = cond(
                "unimodal_min_left.w_bound",
                "w <= (theta_r-theta_l)/(1-theta_l)",
                w <= width_bound,
                {"w": w, "bound": width_bound},
            )
            side_ok = cond(
                "unimodal_min_left.min_before_fixed_point",
                "critical point sits at or left of the fixed point",
                True,
                {"x_c": x_c, "x_star": x_star},
            )
            if w_ok and side_ok:
                return done(Certificate.UNIMODAL_MIN_LEFT)
        else:
            min_slope_left = _min_core_slope(m, m.theta_l, x_c)
            slope_ok = cond(
                "unimodal_min_right.slope_above_minus_one",
                "derivative stays above -1 left of the critical point",
                min_slope_left > -1.0 + STRICT_MARGIN,
                {"min_slope": min_slope_left},
            )
            if slope_ok and x_star > pos_gap + STRICT_MARGIN:
                bound_a = min(width_bound, (x_star - m.theta_l) / (x_star - pos_gap))
                if cond(
                    "unimodal_min_right.w_bound",
                    "w <= min((theta_r-theta_l)/(1-theta_l), (x*-theta_l)/(x*-(a1-a2)+))",
                    w <= bound_a,
                    {"w": w, "bound": bound_a},
                ):
                    return done(Certificate.UNIMODAL_MIN_RIGHT)
            if (
                slope_ok
                and x_star <= pos_gap
                and pos_gap < c.x_max - STRICT_MARGIN
                and cond(
                    "unimodal_min_right.w_bound_overshoot",
                    "x* <= (a1-a2)+ < x_max and w <= (theta_r-theta_l)/(1-theta_l)",
                    w <= width_bound,
                    {"w": w, "bound": width_bound, "a1_minus_a2": pos_gap},
                )
            ):
                return done(Certificate.UNIMODAL_MIN_RIGHT)
            edge_slope = m.slope(m.theta_l, side="right")
            basic_ok = cond(
                "convex_unimodal_right.edge_slope",
                "core convex, (a1-a2)+ < x*, and derivative at theta_l+ >= -1",
                convex and pos_gap + STRICT_MARGIN < x_star and edge_slope >= -1.0,
                {"convex": convex, "slope_at_theta_l": edge_slope, "pos_gap": pos_gap},
            )
            if basic_ok:
                slope_star = m.slope(x_star)
                m_factor = (1.0 - slope_star) / w
                relaxed = (
                    x_star - m.theta_l + max(m.theta_l - pos_gap, 0.0) / m_factor
                ) / (x_star - pos_gap)
                bound_c = min(width_bound, relaxed)
                if cond(
                    "convex_unimodal_right.w_bound",
                    "w <= relaxed unimodal bound with m = (1 - f'(x*))/w",
                    w <= bound_c,
                    {"w": w, "bound": bound_c, "m": m_factor},
                ):
                    return done(Certificate.CONVEX_UNIMODAL_RIGHT)

    return StabilityVerdict(None, tuple(checklist), shape, x_star)
