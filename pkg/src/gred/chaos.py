"""Orbit iteration, Lyapunov exponents, and Li-Yorke chaos certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError
from .model import NormalizedModel
from .special import inc_beta

# Diagram sampling keeps short orbits; Lyapunov averages want more
# samples for variance reduction.
DEFAULT_TRANSIENT = 500
DEFAULT_SAMPLES = 50
LYAPUNOV_SAMPLES = 5000


@dataclass(frozen=True)
class OrbitConfig:
    """Initial condition and sampling lengths for orbit statistics."""

    x0: float
    transient: int = DEFAULT_TRANSIENT
    samples: int = DEFAULT_SAMPLES

    def __post_init__(self) -> None:
        if not 0.0 <= self.x0 <= 1.0:
            raise DomainError(f"x0 must lie in [0, 1], got {self.x0}")
        if self.transient < 0:
            raise DomainError(f"transient must be >= 0, got {self.transient}")
        if self.samples < 1:
            raise DomainError(f"samples must be >= 1, got {self.samples}")


def iterate(m: NormalizedModel, cfg: OrbitConfig) -> np.ndarray:
    """States of the orbit after discarding the transient; all in [0, 1]."""
    return _kernels.orbit_sample(cfg.x0, cfg.transient, cfg.samples, *m.packed())


def lyapunov(m: NormalizedModel, cfg: OrbitConfig) -> float:
    """Average exponential divergence rate along the orbit of cfg.x0.

    Mean of log|f'| over the post-transient states.  States closer than
    1e-9 to a threshold are skipped (the derivative is one-sided there);
    a zero derivative anywhere yields -inf.
    """
    return _kernels.lyapunov_mean(cfg.x0, cfg.transient, cfg.samples, *m.packed())


@dataclass(frozen=True)
class LiYorkeCertificate:
    """Outcome of the three-step orbit-chain test for Li-Yorke chaos.

    The probe point is x0 = theta_r/(1-w), whose first two images are
    theta_r and (1-w)*theta_r by construction.  Chaos follows from the
    chain f3 >= x0 > f1 > f2, which is checked by direct evaluation and
    reported in ``exact_chain_holds`` - the authoritative flag.

    ``case_i_sufficient`` and ``case_ii_sufficient`` record two printed
    shortcut criteria (a first-order small-w bound for the case where
    the second image stays in the core, and a closed-form threshold
    bound for the case where it falls below it).  The case-I shortcut
    is informational only: it is a leading-order estimate and can
    disagree with the exact chain at finite w, so it is never used to
    assert chaos.

    The test needs the map continuous (a1 <= a2) and w < 1 - theta_r;
    otherwise ``applicable`` is False and no chain is asserted.
    """

    applicable: bool
    continuity_ok: bool
    w_ok: bool
    case: str | None = None
    x0: float | None = None
    orbit: tuple[float, float, float] | None = None
    exact_chain_holds: bool = False
    analytic_steps_ok: bool | None = None
    case_i_sufficient: bool | None = None
    case_ii_sufficient: bool | None = None

    def to_dict(self) -> dict:
        return {
            "applicable": self.applicable,
            "continuity_ok": self.continuity_ok,
            "w_ok": self.w_ok,
            "case": self.case,
            "x0": self.x0,
            "orbit": list(self.orbit) if self.orbit else None,
            "exact_chain_holds": self.exact_chain_holds,
            "analytic_steps_ok": self.analytic_steps_ok,
            "case_i_sufficient": self.case_i_sufficient,
            "case_ii_sufficient": self.case_ii_sufficient,
        }


def li_yorke_certificate(m: NormalizedModel) -> LiYorkeCertificate:
    """Evaluate the orbit-chain chaos test for this model."""
    c = m.controls
    w = c.w
    continuity_ok = m.a1 <= m.a2
    w_ok = w < 1.0 - m.theta_r
    if not (continuity_ok and w_ok):
        return LiYorkeCertificate(
            applicable=False, continuity_ok=continuity_ok, w_ok=w_ok
        )
    x0 = m.theta_r / (1.0 - w)
    f1 = m.step(x0)
    f2 = m.step(f1)
    f3 = m.step(f2)
    analytic_ok = (
        abs(f1 - m.theta_r) <= 1e-12 and abs(f2 - (1.0 - w) * m.theta_r) <= 1e-12
    )
    chain = f3 >= x0 and x0 > f1 and f1 > f2
    core_width_ratio = (m.theta_r - m.theta_l) / m.theta_r
    case = "I" if w < core_width_ratio else "II"
    z_r = (m.theta_r - c.x_min) / (c.x_max - c.x_min)
    i_r = inc_beta(c.shape, z_r)
    case_i = m.theta_r * math.sqrt(i_r) <= m.a1 / 3.0
    case_ii = m.theta_r <= (1.0 - w) / (3.0 - w + w * w)
    return LiYorkeCertificate(
        applicable=True,
        continuity_ok=continuity_ok,
        w_ok=w_ok,
        case=case,
        x0=x0,
        orbit=(f1, f2, f3),
        exact_chain_holds=chain,
        analytic_steps_ok=analytic_ok,
        case_i_sufficient=case_i,
        case_ii_sufficient=case_ii,
    )
