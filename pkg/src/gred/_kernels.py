"""Scalar numerical kernels behind the public modules.

Everything here is plain float arithmetic so that the hot loops (orbit
iteration, Lyapunov sums, parameter sweeps) can be compiled with numba.
Kernels never raise: callers validate inputs, and failures surface as
nan/inf sentinels.  With ``NUMBA_DISABLE_JIT=1`` (or numba missing) the
same functions run as ordinary Python, which is handy for debugging.

Map parameters are passed as a flat 9-tuple
``(w, a1, a2, x_min, x_max, alpha, beta, theta_l, theta_r)``;
see ``gred.model.NormalizedModel.packed``.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit as _njit

    def _jit(func):
        return _njit(cache=True)(func)

except ImportError:  # pragma: no cover - numba is a declared dependency

    def _jit(func):
        return func


_CF_MAX_ITER = 400
_CF_EPS = 1e-16
_FPMIN = 1e-300

# Orbit states this close to a threshold have an ambiguous one-sided
# derivative and are skipped by the Lyapunov estimator.
KINK_TOL = 1e-9


@_jit
def beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz).

    Converges for x < (a+1)/(a+b+2); ``beta_inc`` applies the symmetry
    switch.  Returns nan if the fraction fails to converge.
    """
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    return math.nan


@_jit
def beta_inc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function for a, b > 0 and x in [0, 1].

    Strictly increasing in x with values 0 at 0 and 1 at 1.  Returns nan
    on continued-fraction failure (the public wrapper then falls back to
    an independent evaluation).
    """
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    if a == 1.0 and b == 1.0:
        return x
    if a == 1.0:
        return -math.expm1(b * math.log1p(-x))
    if b == 1.0:
        return math.exp(a * math.log(x))
    ln_beta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    front = math.exp(a * math.log(x) + b * math.log1p(-x) - ln_beta)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * beta_cf(a, b, x) / a
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b


@_jit
def beta_pdf(a: float, b: float, z: float) -> float:
    """Beta density z**(a-1) * (1-z)**(b-1) / B(a, b).

    Defined for z in (0, 1); at the endpoints it returns the limit
    (0, a finite value, or +inf depending on the exponents).
    """
    ln_beta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    t = -ln_beta
    if a != 1.0:
        t += (a - 1.0) * math.log(z)
    if b != 1.0:
        t += (b - 1.0) * math.log1p(-z)
    return math.exp(t)


@_jit
def map_step(
    x: float,
    w: float,
    a1: float,
    a2: float,
    x_lo: float,
    x_hi: float,
    al: float,
    be: float,
    th_l: float,
    th_r: float,
) -> float:
    """One update of the normalized averaged-queue map on [0, 1].

    Closed branch boundaries: x <= th_l takes the filling branch,
    x >= th_r the draining branch, the nonlinear core lies in between.
    """
    if x <= th_l:
        y = (1.0 - w) * x + w
    elif x >= th_r:
        y = (1.0 - w) * x
    else:
        z = (x - x_lo) / (x_hi - x_lo)
        i = beta_inc(al, be, z)
        if i <= 0.0:  # unreachable for valid cores; matches the z -> 0 limit
            y = 1.0
        else:
            y = (1.0 - w) * x + w * (a1 / math.sqrt(i) - a2)
    if y < 0.0:
        return 0.0
    if y > 1.0:
        return 1.0
    return y


@_jit
def core_slope(
    x: float,
    w: float,
    a1: float,
    a2: float,
    x_lo: float,
    x_hi: float,
    al: float,
    be: float,
) -> float:
    """Derivative of the nonlinear core branch; -inf where the density blows up."""
    dx = x_hi - x_lo
    z = (x - x_lo) / dx
    i = beta_inc(al, be, z)
    if i <= 0.0:  # unreachable for valid cores
        return -math.inf
    dens = beta_pdf(al, be, z)
    return 1.0 - w * (1.0 + a1 / (2.0 * dx) * dens / (i * math.sqrt(i)))


@_jit
def map_slope(
    x: float,
    w: float,
    a1: float,
    a2: float,
    x_lo: float,
    x_hi: float,
    al: float,
    be: float,
    th_l: float,
    th_r: float,
) -> float:
    """Map derivative away from the two threshold points."""
    if x < th_l or x > th_r:
        return 1.0 - w
    return core_slope(x, w, a1, a2, x_lo, x_hi, al, be)


@_jit
def orbit_sample(
    x0: float,
    transient: int,
    samples: int,
    w: float,
    a1: float,
    a2: float,
    x_lo: float,
    x_hi: float,
    al: float,
    be: float,
    th_l: float,
    th_r: float,
) -> np.ndarray:
    """Post-transient orbit states, starting from x0."""
    x = x0
    for _ in range(transient):
        x = map_step(x, w, a1, a2, x_lo, x_hi, al, be, th_l, th_r)
    out = np.empty(samples, dtype=np.float64)
    for i in range(samples):
        out[i] = x
        x = map_step(x, w, a1, a2, x_lo, x_hi, al, be, th_l, th_r)
    return out


@_jit
def orbit_diameter(
    x0: float,
    transient: int,
    samples: int,
    w: float,
    a1: float,
    a2: float,
    x_lo: float,
    x_hi: float,
    al: float,
    be: float,
    th_l: float,
    th_r: float,
) -> float:
    """Spread (max - min) of the post-transient orbit sample."""
    x = x0
    for _ in range(transient):
        x = map_step(x, w, a1, a2, x_lo, x_hi, al, be, th_l, th_r)
    lo = x
    hi = x
    for _ in range(samples - 1):
        x = map_step(x, w, a1, a2, x_lo, x_hi, al, be, th_l, th_r)
        if x < lo:
            lo = x
        if x > hi:
            hi = x
    return hi - lo


@_jit
def lyapunov_mean(
    x0: float,
    transient: int,
    samples: int,
    w: float,
    a1: float,
    a2: float,
    x_lo: float,
    x_hi: float,
    al: float,
    be: float,
    th_l: float,
    th_r: float,
) -> float:
    """Average of log|f'| along the post-transient orbit.

    States within KINK_TOL of a threshold are skipped (one-sided
    derivative only).  Returns -inf if a zero derivative is hit and nan
    if every state was skipped.
    """
    x = x0
    for _ in range(transient):
        x = map_step(x, w, a1, a2, x_lo, x_hi, al, be, th_l, th_r)
    total = 0.0
    counted = 0
    for _ in range(samples):
        if abs(x - th_l) > KINK_TOL and abs(x - th_r) > KINK_TOL:
            s = map_slope(x, w, a1, a2, x_lo, x_hi, al, be, th_l, th_r)
            if s == 0.0:
                return -math.inf
            total += math.log(abs(s))
            counted += 1
        x = map_step(x, w, a1, a2, x_lo, x_hi, al, be, th_l, th_r)
    if counted == 0:
        return math.nan
    return total / counted


@_jit
def orbit_with_lyapunov(
    x0: float,
    transient: int,
    samples: int,
    lyap_samples: int,
    w: float,
    a1: float,
    a2: float,
    x_lo: float,
    x_hi: float,
    al: float,
    be: float,
    th_l: float,
    th_r: float,
):
    """Single pass producing the orbit sample, its diameter, and the Lyapunov mean.

    Shares one transient between the two estimators, which keeps sweep
    rows cheap.  Returns (orbit, diameter, lyapunov).
    """
    x = x0
    for _ in range(transient):
        x = map_step(x, w, a1, a2, x_lo, x_hi, al, be, th_l, th_r)
    out = np.empty(samples, dtype=np.float64)
    lo = x
    hi = x
    total = 0.0
    counted = 0
    hit_zero = False
    n = samples if samples > lyap_samples else lyap_samples
    for i in range(n):
        if i < samples:
            out[i] = x
            if x < lo:
                lo = x
            if x > hi:
                hi = x
        if i < lyap_samples and not hit_zero:
            if abs(x - th_l) > KINK_TOL and abs(x - th_r) > KINK_TOL:
                s = map_slope(x, w, a1, a2, x_lo, x_hi, al, be, th_l, th_r)
                if s == 0.0:
                    hit_zero = True
                else:
                    total += math.log(abs(s))
                    counted += 1
        x = map_step(x, w, a1, a2, x_lo, x_hi, al, be, th_l, th_r)
    if hit_zero:
        lyap = -math.inf
    elif counted == 0:
        lyap = math.nan
    else:
        lyap = total / counted
    return out, hi - lo, lyap


@_jit
def converge_steps(
    x0: float,
    target: float,
    tol: float,
    max_iter: int,
    w: float,
    a1: float,
    a2: float,
    x_lo: float,
    x_hi: float,
    al: float,
    be: float,
    th_l: float,
    th_r: float,
) -> int:
    """Iterations until |x - target| <= tol, or -1 if max_iter is exhausted."""
    x = x0
    if abs(x - target) <= tol:
        return 0
    for n in range(1, max_iter + 1):
        x = map_step(x, w, a1, a2, x_lo, x_hi, al, be, th_l, th_r)
        if abs(x - target) <= tol:
            return n
    return -1


@_jit
def grid_step_values(
    n: int,
    lo: float,
    hi: float,
    w: float,
    a1: float,
    a2: float,
    x_lo: float,
    x_hi: float,
    al: float,
    be: float,
    th_l: float,
    th_r: float,
) -> np.ndarray:
    """Map values at n interior points of (lo, hi), endpoints excluded."""
    out = np.empty(n, dtype=np.float64)
    span = hi - lo
    for i in range(n):
        x = lo + span * (i + 1.0) / (n + 1.0)
        out[i] = map_step(x, w, a1, a2, x_lo, x_hi, al, be, th_l, th_r)
    return out


@_jit
def grid_slope_values(
    n: int,
    lo: float,
    hi: float,
    w: float,
    a1: float,
    a2: float,
    x_lo: float,
    x_hi: float,
    al: float,
    be: float,
) -> np.ndarray:
    """Core derivative at n interior points of (lo, hi), endpoints excluded."""
    out = np.empty(n, dtype=np.float64)
    span = hi - lo
    for i in range(n):
        x = lo + span * (i + 1.0) / (n + 1.0)
        out[i] = core_slope(x, w, a1, a2, x_lo, x_hi, al, be)
    return out


@_jit
def grid_convexity_margin(
    n: int,
    lo: float,
    hi: float,
    x_lo: float,
    x_hi: float,
    al: float,
    be: float,
) -> np.ndarray:
    """3*J - 2*h at n interior points of (lo, hi); positive means convex there.

    J is the density-to-distribution ratio and h the logarithmic slope of
    the density, both evaluated at the ramp coordinate z(x).
    """
    out = np.empty(n, dtype=np.float64)
    dx = x_hi - x_lo
    span = hi - lo
    for i in range(n):
        x = lo + span * (i + 1.0) / (n + 1.0)
        z = (x - x_lo) / dx
        i_val = beta_inc(al, be, z)
        dens = beta_pdf(al, be, z)
        j = dens / i_val
        h = (al - 1.0) / z - (be - 1.0) / (1.0 - z)
        out[i] = 3.0 * j - 2.0 * h
    return out
