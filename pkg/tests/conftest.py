"""Shared fixtures: the reference campus network and a kernel warmup."""

import numpy as np
import pytest

from gred import (
    BetaShape,
    ControlParams,
    ModelSpec,
    SweepAxis,
    SystemParams,
    WBifScan,
    bifurcation_sweep,
    normalize,
    w_bif,
)

# Reference campus-network measurement used throughout the tests:
# 1850 connections through a 321 MB/s link, 12 ms round trip, 1 kB
# packets, a 2000-packet buffer.
REF_SYSTEM = SystemParams(N=1850, C=321000, d=0.012, M=1, B=2000)


def ref_controls(p_max=0.5, x_min=0.2, x_max=0.6, w=0.15, alpha=1.0, beta=1.0):
    return ControlParams(
        p_max=p_max, x_min=x_min, x_max=x_max, w=w, shape=BetaShape(alpha, beta)
    )


@pytest.fixture
def ref_system():
    return REF_SYSTEM


@pytest.fixture
def ref_model():
    return normalize(REF_SYSTEM, ref_controls())


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    """Trigger JIT compilation once so timed tests measure steady state."""
    spec = ModelSpec(control=ref_controls(), system=REF_SYSTEM)
    bifurcation_sweep(
        spec,
        SweepAxis(parameter="x_min", lo=0.2, hi=0.3, points=2),
        transient=5,
        samples=3,
        lyap_samples=4,
        workers=1,
    )
    w_bif(
        spec,
        WBifScan(w_lo=0.1, w_hi=0.2, coarse=2, transient=5, samples=3),
    )
    m = spec.build()
    m.fixed_point()
    np.random.default_rng(0)
