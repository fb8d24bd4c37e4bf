"""Tests for the physical-units model.

Frozen values are plain arithmetic on the reference campus network
(N=1850, C=321000 kB/s, d=0.012 s, M=1 kB, B=2000), evaluated at
40 digits with mpmath during test authoring.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gred import (
    ClassicControls,
    ConstraintError,
    DomainError,
    SystemParams,
    avg_queue_empty,
    avg_queue_full,
    avg_queue_step,
    controls_feasible,
    drop_prob_empty,
    drop_prob_full,
    drop_probability,
    ewma_update,
    next_queue,
    throughput,
)
from conftest import REF_SYSTEM

REF_CONTROLS = ClassicControls(q_min=400, q_max=1200, p_max=0.5, w=0.15)

# frozen arithmetic oracles for the reference network
P_EMPTY = 0.34598889438831792
P_FULL = 0.14990843868510523
Q_EMPTY = 953.58223102130867
Q_FULL = 639.85350189616837
G_AT_QUARTER = 679.55602414887948

random_systems = st.builds(
    SystemParams,
    N=st.integers(10, 10_000).map(float),
    C=st.floats(1_000, 1_000_000),
    d=st.floats(0.001, 0.5),
    M=st.floats(0.1, 10),
    B=st.integers(100, 100_000),
)


class TestDropLaw:
    def test_below_threshold(self):
        assert drop_probability(REF_CONTROLS.q_min, REF_CONTROLS) == 0.0
        assert drop_probability(100, REF_CONTROLS) == 0.0

    def test_ramp_endpoint(self):
        assert drop_probability(REF_CONTROLS.q_max, REF_CONTROLS) == pytest.approx(0.5)

    def test_midpoint(self):
        assert drop_probability(800, REF_CONTROLS) == pytest.approx(0.25)

    def test_saturated(self):
        assert drop_probability(1201, REF_CONTROLS) == 1.0

    def test_validation(self):
        with pytest.raises(DomainError):
            ClassicControls(q_min=500, q_max=400, p_max=0.5, w=0.1)
        with pytest.raises(DomainError):
            ClassicControls(q_min=0, q_max=100, p_max=0.0, w=0.1)
        with pytest.raises(DomainError):
            ClassicControls(q_min=0, q_max=100, p_max=0.5, w=1.0)


class TestEwma:
    def test_fixed_point(self):
        for w in (0.05, 0.5, 0.9):
            assert ewma_update(500, 500, w) == pytest.approx(500)

    def test_from_zero(self):
        assert ewma_update(0, 2000, 0.15) == pytest.approx(300)

    def test_halfway(self):
        assert ewma_update(1000, 200, 0.5) == pytest.approx(600)


class TestThroughput:
    def test_unit_case(self):
        sysp = SystemParams(N=1, C=1, d=1.0, M=1, B=1, K=1.0)
        assert throughput(1.0, sysp) == pytest.approx(1.0)

    def test_capacity_share_at_starvation(self):
        # at the starvation probability each connection gets C/N exactly
        p = drop_prob_empty(REF_SYSTEM)
        assert throughput(p, REF_SYSTEM) == pytest.approx(
            REF_SYSTEM.C / REF_SYSTEM.N, rel=1e-12
        )

    def test_frozen_value(self):
        assert throughput(0.25, REF_SYSTEM) == pytest.approx(
            204.12414523193151, rel=1e-12
        )

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            throughput(0.0, REF_SYSTEM)


class TestCharacteristicProbabilities:
    def test_frozen_values(self):
        assert drop_prob_empty(REF_SYSTEM) == pytest.approx(P_EMPTY, abs=1e-12)
        assert drop_prob_full(REF_SYSTEM) == pytest.approx(P_FULL, abs=1e-12)

    def test_square_law_in_connections(self):
        doubled = SystemParams(N=3700, C=321000, d=0.012, M=1, B=2000)
        assert drop_prob_empty(doubled) == pytest.approx(4 * P_EMPTY, rel=1e-12)

    @given(random_systems)
    @settings(max_examples=100, deadline=None)
    def test_full_below_empty(self, sysp):
        assert drop_prob_full(sysp) < drop_prob_empty(sysp)


class TestCoreThresholds:
    def test_frozen_values(self):
        assert avg_queue_empty(REF_SYSTEM, REF_CONTROLS) == pytest.approx(
            Q_EMPTY, abs=1e-9
        )
        assert avg_queue_full(REF_SYSTEM, REF_CONTROLS) == pytest.approx(
            Q_FULL, abs=1e-9
        )

    def test_ordering_and_bounds(self):
        q_e = avg_queue_empty(REF_SYSTEM, REF_CONTROLS)
        q_f = avg_queue_full(REF_SYSTEM, REF_CONTROLS)
        assert REF_CONTROLS.q_min < q_f < q_e <= REF_CONTROLS.q_max

    def test_saturation_branch(self):
        # starvation probability above p_max pins the upper threshold at q_max
        c = ClassicControls(q_min=400, q_max=1200, p_max=0.3, w=0.15)
        assert drop_prob_empty(REF_SYSTEM) > 0.3
        assert avg_queue_empty(REF_SYSTEM, c) == c.q_max


class TestNextQueue:
    def test_branch_boundaries(self):
        assert next_queue(drop_prob_full(REF_SYSTEM), REF_SYSTEM) == REF_SYSTEM.B
        assert next_queue(drop_prob_empty(REF_SYSTEM), REF_SYSTEM) == 0.0

    def test_continuity_at_boundaries(self):
        for p0 in (drop_prob_full(REF_SYSTEM), drop_prob_empty(REF_SYSTEM)):
            below = next_queue(p0 * (1 - 1e-9), REF_SYSTEM)
            above = next_queue(p0 * (1 + 1e-9), REF_SYSTEM)
            assert below == pytest.approx(above, abs=1e-3)

    def test_frozen_value(self):
        assert next_queue(0.25, REF_SYSTEM) == pytest.approx(G_AT_QUARTER, abs=1e-9)

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            next_queue(0.0, REF_SYSTEM)


class TestFeasibility:
    def test_reference_feasible(self):
        assert controls_feasible(REF_SYSTEM, REF_CONTROLS)

    def test_small_p_max_infeasible(self):
        c = ClassicControls(q_min=400, q_max=1200, p_max=0.10, w=0.15)
        assert not controls_feasible(REF_SYSTEM, c)

    def test_huge_buffer_always_feasible(self):
        big = SystemParams(N=1850, C=321000, d=0.012, M=1, B=10_000_000)
        c = ClassicControls(q_min=400, q_max=1200, p_max=0.01, w=0.15)
        assert controls_feasible(big, c)


class TestAvgQueueStep:
    def test_drain_branch(self):
        q = avg_queue_empty(REF_SYSTEM, REF_CONTROLS)
        for q_ave in (q, q + 100, REF_SYSTEM.B):
            got = avg_queue_step(q_ave, REF_SYSTEM, REF_CONTROLS)
            assert got == pytest.approx(0.85 * q_ave, rel=1e-12)

    def test_fill_branch(self):
        q = avg_queue_full(REF_SYSTEM, REF_CONTROLS)
        for q_ave in (0.0, 100.0, q):
            got = avg_queue_step(q_ave, REF_SYSTEM, REF_CONTROLS)
            assert got == pytest.approx(0.85 * q_ave + 0.15 * 2000, rel=1e-12)

    def test_core_branch_frozen(self):
        # 0.85*800 + 0.15*(NK/sqrt(0.25) - Cd/M)
        got = avg_queue_step(800, REF_SYSTEM, REF_CONTROLS)
        assert got == pytest.approx(680 + 0.15 * G_AT_QUARTER, rel=1e-12)

    def test_stays_in_range(self):
        for q_ave in np.linspace(0, 2000, 400):
            got = avg_queue_step(float(q_ave), REF_SYSTEM, REF_CONTROLS)
            assert 0.0 <= got <= REF_SYSTEM.B

    def test_infeasible_controls_raise(self):
        c = ClassicControls(q_min=400, q_max=1200, p_max=0.10, w=0.15)
        with pytest.raises(ConstraintError):
            avg_queue_step(800, REF_SYSTEM, c)

    def test_domain(self):
        with pytest.raises(DomainError):
            avg_queue_step(-1, REF_SYSTEM, REF_CONTROLS)
        with pytest.raises(DomainError):
            avg_queue_step(2001, REF_SYSTEM, REF_CONTROLS)
        bad = ClassicControls(q_min=400, q_max=5000, p_max=0.5, w=0.15)
        with pytest.raises(DomainError):
            avg_queue_step(800, REF_SYSTEM, bad)


def test_system_validation():
    with pytest.raises(DomainError):
        SystemParams(N=0, C=1, d=1, M=1, B=1)
    with pytest.raises(DomainError):
        SystemParams(N=10, C=1, d=1, M=1, B=0)
    with pytest.raises(DomainError):
        SystemParams(N=10, C=1, d=1, M=1, B=10.5)
    assert SystemParams(N=10, C=1, d=1, M=1, B=10).K == pytest.approx(math.sqrt(1.5))
