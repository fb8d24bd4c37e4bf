"""The normalized generalized drop-law map on [0, 1].

States are average queue lengths divided by the buffer size, the whole
physical system collapses into two dimensionless constants,

    a1 = N*K / (sqrt(p_max) * B),    a2 = C*d / (M*B),

and the dynamic is x_{n+1} = f(x_n) with a three-branch map: an affine
filling branch up to theta_l, a nonlinear core on (theta_l, theta_r)
driven by the beta drop law, and a linear draining branch from theta_r.
The map is continuous except at theta_r when a1 > a2, where it is lower
semicontinuous with a jump of w*(a1 - a2).

Feasibility requires a1 < a2 + 1; a unique fixed point exists exactly
when a1 < a2 + x_max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import _kernels
from .classic import SystemParams
from .errors import ConstraintError, DomainError
from .special import BetaShape, inc_beta, inc_beta_inv

_BISECT_WIDTH = 1e-13
_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class ControlParams:
    """Operator-tunable knobs in normalized units."""

    p_max: float
    x_min: float
    x_max: float
    w: float
    shape: BetaShape = BetaShape(1.0, 1.0)

    def __post_init__(self) -> None:
        if not 0.0 < self.p_max <= 1.0:
            raise DomainError(f"p_max must lie in (0, 1], got {self.p_max}")
        if not 0.0 <= self.x_min < self.x_max <= 1.0:
            raise DomainError(
                f"need 0 <= x_min < x_max <= 1, got x_min={self.x_min} x_max={self.x_max}"
            )
        if not 0.0 < self.w < 1.0:
            raise DomainError(f"w must lie in (0, 1), got {self.w}")


@dataclass(frozen=True)
class FixedPoint:
    """Interior fixed point of the map with its self-consistency residual."""

    x_star: float
    residual: float


@dataclass(frozen=True)
class NormalizedModel:
    """Immutable dimensionless model with precomputed core thresholds.

    Build through :func:`make_model` or :func:`normalize`; the
    constructor itself does not recompute thresholds.
    """

    a1: float
    a2: float
    controls: ControlParams
    theta_l: float
    theta_r: float
    continuous_at_theta_r: bool

    # -- geometry ----------------------------------------------------

    def packed(self) -> tuple:
        """Flat parameter tuple consumed by the numerical kernels."""
        c = self.controls
        return (
            c.w,
            self.a1,
            self.a2,
            c.x_min,
            c.x_max,
            c.shape.alpha,
            c.shape.beta,
            self.theta_l,
            self.theta_r,
        )

    def ramp_coord(self, x: float) -> float:
        """Position of x within the drop ramp, scaled to [0, 1]."""
        c = self.controls
        if not c.x_min <= x <= c.x_max:
            raise DomainError(f"x must lie in [{c.x_min}, {c.x_max}], got {x}")
        return (x - c.x_min) / (c.x_max - c.x_min)

    def drop_prob(self, x: float) -> float:
        """Drop probability at normalized queue length x; nondecreasing."""
        c = self.controls
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x must lie in [0, 1], got {x}")
        if x < c.x_min:
            return 0.0
        if x > c.x_max:
            return c.p_max
        return c.p_max * inc_beta(c.shape, self.ramp_coord(x))

    # -- dynamics ----------------------------------------------------

    def step(self, x: float) -> float:
        """One application of the map; maps [0, 1] into [0, 1]."""
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x must lie in [0, 1], got {x}")
        return _kernels.map_step(x, *self.packed())

    def slope(self, x: float, side: str | None = None) -> float:
        """Derivative of the map at x.

        At the two threshold points the derivative is one-sided and
        ``side`` ("left" or "right") must be given.  On the core the
        value is always strictly below 1 - w; it is -inf in the limit
        x -> x_max when the map jumps there and beta < 1.
        """
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x must lie in [0, 1], got {x}")
        c = self.controls
        at_kink = x == self.theta_l or x == self.theta_r
        if at_kink:
            if side not in ("left", "right"):
                raise DomainError(
                    f"x={x} is a threshold point; pass side='left' or side='right'"
                )
            core_side = (x == self.theta_l and side == "right") or (
                x == self.theta_r and side == "left"
            )
            if not core_side:
                return 1.0 - c.w
            z = self.ramp_coord(x)
            if z >= 1.0 and c.shape.beta < 1.0:
                return -math.inf
            return _kernels.core_slope(
                x, c.w, self.a1, self.a2, c.x_min, c.x_max, c.shape.alpha, c.shape.beta
            )
        return _kernels.map_slope(x, *self.packed())

    def curvature(self, x: float) -> float:
        """Second derivative of the core branch; sign equals sign(3J - 2h)."""
        if not self.theta_l < x < self.theta_r:
            raise DomainError(
                f"x must lie in the core ({self.theta_l}, {self.theta_r}), got {x}"
            )
        c = self.controls
        dx = c.x_max - c.x_min
        z = self.ramp_coord(x)
        i_val = inc_beta(c.shape, z)
        dens = _kernels.beta_pdf(c.shape.alpha, c.shape.beta, z)
        j = dens / i_val
        h = (c.shape.alpha - 1.0) / z - (c.shape.beta - 1.0) / (1.0 - z)
        return (
            c.w
            * self.a1
            / (4.0 * dx * dx)
            * dens
            / (i_val * math.sqrt(i_val))
            * (3.0 * j - 2.0 * h)
        )

    def core_edge_values(self) -> tuple[float, float]:
        """Limits of the map at the two ends of the core.

        Returns (f(theta_l), lim_{x->theta_r-} f(x)).  The left value is
        attained (the map is continuous at theta_l); the right one
        exceeds f(theta_r) by w*(a1 - a2) when a1 > a2.
        """
        c = self.controls
        left = (1.0 - c.w) * self.theta_l + c.w
        right = (1.0 - c.w) * self.theta_r + c.w * max(self.a1 - self.a2, 0.0)
        return left, right

    def with_w(self, w: float) -> "NormalizedModel":
        """Copy with a different averaging weight.

        Cheap: the thresholds and constants do not depend on w.
        """
        return replace(self, controls=replace(self.controls, w=w))

    # -- fixed point -------------------------------------------------

    def fixed_point(self) -> FixedPoint | None:
        """The unique interior fixed point, or None if there is none.

        Existence is equivalent to a1 < a2 + x_max.  The root of
        a1/sqrt(I(z(x))) = x + a2 is bracketed in the open core, where
        the left side strictly decreases and the right side strictly
        increases, so plain bisection is unconditionally convergent.
        Returns None as well if the core has collapsed below float
        resolution (possible only for extreme shape parameters).
        """
        c = self.controls
        if not self.a1 < self.a2 + c.x_max:
            return None
        a, b = c.shape.alpha, c.shape.beta
        x_lo, x_hi = c.x_min, c.x_max
        dx = x_hi - x_lo

        def gap(x: float) -> float:
            i_val = _kernels.beta_inc(a, b, (x - x_lo) / dx)
            if i_val <= 0.0:
                return math.inf
            return self.a1 / math.sqrt(i_val) - (x + self.a2)

        eps = 1e-12
        lo = self.theta_l + eps
        hi = self.theta_r - eps
        if not lo < hi:
            return None
        g_lo, g_hi = gap(lo), gap(hi)
        if not (g_lo > 0.0 and g_hi < 0.0):  # pragma: no cover - defensive
            return None
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            g = gap(mid)
            if g == 0.0:
                lo = hi = mid
                break
            if g > 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo < _BISECT_WIDTH:
                break
        x_star = 0.5 * (lo + hi)
        residual = abs(self.step(x_star) - x_star)
        if residual > _RESIDUAL_TOL:  # pragma: no cover - defensive
            return None
        return FixedPoint(x_star=x_star, residual=residual)


def make_model(a1: float, a2: float, controls: ControlParams) -> NormalizedModel:
    """Build a model directly from the dimensionless constants.

    Rejects a1 <= 0, a2 <= 0, and the infeasible region a1 >= a2 + 1.
    """
    if not (a1 > 0.0 and math.isfinite(a1)):
        raise DomainError(f"a1 must be positive and finite, got {a1}")
    if not (a2 > 0.0 and math.isfinite(a2)):
        raise DomainError(f"a2 must be positive and finite, got {a2}")
    if not a1 < a2 + 1.0:
        raise ConstraintError(
            f"infeasible constants: a1={a1:.6g} >= a2 + 1 = {a2 + 1.0:.6g}"
        )
    c = controls
    span = c.x_max - c.x_min
    z1 = (a1 / (a2 + 1.0)) ** 2
    theta_l = span * inc_beta_inv(c.shape, z1) + c.x_min
    z2 = (a1 / a2) ** 2
    if z2 <= 1.0:
        theta_r = span * inc_beta_inv(c.shape, z2) + c.x_min
    else:
        theta_r = c.x_max
    return NormalizedModel(
        a1=a1,
        a2=a2,
        controls=c,
        theta_l=theta_l,
        theta_r=theta_r,
        continuous_at_theta_r=a1 <= a2,
    )


def normalize(system: SystemParams, controls: ControlParams) -> NormalizedModel:
    """Build the dimensionless model from physical network parameters."""
    a1, a2 = dimensionless_constants(system, controls.p_max)
    return make_model(a1, a2, controls)


def dimensionless_constants(system: SystemParams, p_max: float) -> tuple[float, float]:
    """The pair (a1, a2) determined by the physical system and p_max."""
    if not 0.0 < p_max <= 1.0:
        raise DomainError(f"p_max must lie in (0, 1], got {p_max}")
    a1 = system.N * system.K / (math.sqrt(p_max) * system.B)
    a2 = system.C * system.d / (system.M * system.B)
    return a1, a2
