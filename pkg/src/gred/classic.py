"""Classic RED quantities in physical units and the average-queue map.

Works directly with packets, kB/s, and seconds.  Serves both as a
standalone model of the original drop law and as the normalization
oracle for the dimensionless map in :mod:`gred.model`: with
alpha = beta = 1, ``B * f(q/B)`` reproduces :func:`avg_queue_step`
exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConstraintError, DomainError

DEFAULT_K = math.sqrt(1.5)


@dataclass(frozen=True)
class SystemParams:
    """Physical network parameters.

    N: number of TCP connections sharing the bottleneck.  Treated as a
       positive real so parameter sweeps can vary it continuously.
    C: link capacity in kB/s.
    d: round-trip propagation delay in seconds (no queuing delay).
    M: packet size in kB.
    B: buffer size in packets (integral).
    K: throughput constant, sqrt(3/2) by default.
    """

    N: float
    C: float
    d: float
    M: float
    B: int
    K: float = DEFAULT_K

    def __post_init__(self) -> None:
        for name in ("N", "C", "d", "M", "B", "K"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive and finite, got {v}")
        if float(self.B) != int(self.B):
            raise DomainError(f"B must be integral, got {self.B}")


@dataclass(frozen=True)
class ClassicControls:
    """Operator-tunable knobs of the classic drop law (packet units)."""

    q_min: float
    q_max: float
    p_max: float
    w: float

    def __post_init__(self) -> None:
        if not 0 <= self.q_min < self.q_max:
            raise DomainError(
                f"need 0 <= q_min < q_max, got q_min={self.q_min} q_max={self.q_max}"
            )
        if not 0.0 < self.p_max <= 1.0:
            raise DomainError(f"p_max must lie in (0, 1], got {self.p_max}")
        if not 0.0 < self.w < 1.0:
            raise DomainError(f"w must lie in (0, 1), got {self.w}")


def _check_thresholds(sys: SystemParams, c: ClassicControls) -> None:
    if c.q_max > sys.B:
        raise DomainError(f"q_max={c.q_max} exceeds buffer size B={sys.B}")


def drop_probability(q_ave: float, c: ClassicControls) -> float:
    """Packet drop probability as a function of the average queue length."""
    if q_ave < c.q_min:
        return 0.0
    if q_ave > c.q_max:
        return 1.0
    return c.p_max * (q_ave - c.q_min) / (c.q_max - c.q_min)


def ewma_update(q_old_ave: float, q_cur: float, w: float) -> float:
    """Exponentially weighted moving average of the queue length."""
    return (1.0 - w) * q_old_ave + w * q_cur


def throughput(p: float, sys: SystemParams) -> float:
    """Stationary per-connection TCP throughput in kB/s (leading term).

    Scales as 1/sqrt(p); undefined at p = 0.
    """
    if not 0.0 < p <= 1.0:
        raise DomainError(f"p must lie in (0, 1], got {p}")
    return sys.M * sys.K / (math.sqrt(p) * sys.d)


def drop_prob_empty(sys: SystemParams) -> float:
    """Smallest drop probability that starves the link (next queue = 0).

    At this value the aggregate throughput of all connections exactly
    matches the link capacity.
    """
    return (sys.N * sys.M * sys.K / (sys.C * sys.d)) ** 2


def drop_prob_full(sys: SystemParams) -> float:
    """Largest drop probability that still fills the buffer (next queue = B)."""
    return (sys.N * sys.M * sys.K / (sys.B * sys.M + sys.C * sys.d)) ** 2


def avg_queue_empty(sys: SystemParams, c: ClassicControls) -> float:
    """Average queue length above which the next queue length is 0.

    Saturates at q_max when the starvation probability exceeds p_max.
    Never exceeds q_max.
    """
    _check_thresholds(sys, c)
    p_e = drop_prob_empty(sys)
    if p_e <= c.p_max:
        return (c.q_max - c.q_min) / c.p_max * p_e + c.q_min
    return c.q_max


def avg_queue_full(sys: SystemParams, c: ClassicControls) -> float:
    """Average queue length below which the next queue length is B.

    Always exceeds q_min.
    """
    _check_thresholds(sys, c)
    return (c.q_max - c.q_min) / c.p_max * drop_prob_full(sys) + c.q_min


def next_queue(p: float, sys: SystemParams) -> float:
    """Queue length produced by running the link at drop probability p.

    Piecewise: B up to the buffer-filling probability, 0 beyond the
    starvation probability, and a continuous 1/sqrt(p) law in between.
    """
    if not 0.0 < p <= 1.0:
        raise DomainError(f"p must lie in (0, 1], got {p}")
    if p <= drop_prob_full(sys):
        return float(sys.B)
    if p >= drop_prob_empty(sys):
        return 0.0
    return sys.N * sys.K / math.sqrt(p) - sys.C * sys.d / sys.M


def controls_feasible(sys: SystemParams, c: ClassicControls) -> bool:
    """Whether the buffer-filling probability stays below p_max.

    This keeps the two core thresholds ordered for every setting and is
    required for the average-queue map to be well defined.
    """
    return drop_prob_full(sys) < c.p_max


def avg_queue_step(q_ave: float, sys: SystemParams, c: ClassicControls) -> float:
    """One update of the average queue length in [0, B].

    Three branches: fill toward B below the lower core threshold, decay
    toward 0 above the upper one, and the nonlinear throughput balance
    in between.  Raises ConstraintError when the feasibility condition
    of :func:`controls_feasible` fails.
    """
    _check_thresholds(sys, c)
    if not 0 <= q_ave <= sys.B:
        raise DomainError(f"q_ave must lie in [0, B], got {q_ave}")
    if not controls_feasible(sys, c):
        raise ConstraintError(
            "infeasible controls: buffer-filling drop probability "
            f"{drop_prob_full(sys):.6g} >= p_max={c.p_max}"
        )
    q_l = avg_queue_full(sys, c)
    q_r = avg_queue_empty(sys, c)
    if q_ave <= q_l:
        return (1.0 - c.w) * q_ave + c.w * sys.B
    if q_ave >= q_r:
        return (1.0 - c.w) * q_ave
    p_n = drop_probability(q_ave, c)
    return (1.0 - c.w) * q_ave + c.w * (
        sys.N * sys.K / math.sqrt(p_n) - sys.C * sys.d / sys.M
    )
