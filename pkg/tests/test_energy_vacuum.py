"""能量泛函、真空阈值与无真空证书测试"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import rel_error
from madelung_lab.core.errors import DomainError
from madelung_lab.numerics.energy_vacuum import (
    CRITICAL_ENERGY,
    EMU_FIT_CEILING,
    b_tilde,
    black_soliton_energy,
    delta_tilde,
    dip_field,
    emu_lower_bound_fit,
    energy_Emu,
    energy_Es,
    energy_hydro,
    energy_hydro_fractional,
    minimality_probe,
    minimizer_q_delta,
    q_delta_energy_exact,
    small_energy_certificate,
    vacuum_certificate,
)
from madelung_lab.numerics.madelung import madelung_forward
from madelung_lab.numerics.spectral_core import ComplexField, Grid1D


class TestThresholds:
    """b~(delta) 与其逆 delta~(b)"""

    def test_known_values(self):
        assert b_tilde(0.0) == pytest.approx(CRITICAL_ENERGY, rel=1e-15)
        assert b_tilde(1.0) == 0.0
        assert b_tilde(0.5) == pytest.approx(5.0 / 12.0, rel=1e-14)

    @pytest.mark.parametrize("delta", [-0.1, 1.1, math.nan])
    def test_b_tilde_domain(self, delta):
        with pytest.raises(DomainError):
            b_tilde(delta)

    @given(delta=st.floats(min_value=0.0, max_value=1.0))
    @settings(max_examples=100, deadline=None)
    def test_inverse(self, delta):
        assert abs(delta_tilde(b_tilde(delta)) - delta) < 1e-10

    def test_inverse_endpoints(self):
        assert delta_tilde(0.0) == 1.0
        assert delta_tilde(CRITICAL_ENERGY) == 0.0

    @pytest.mark.parametrize("b", [-1e-3, 1.5])
    def test_delta_tilde_domain(self, b):
        with pytest.raises(DomainError):
            delta_tilde(b)


class TestEnergies:
    """E^s, E^mu 与流体形式"""

    def test_constant_has_zero_energy(self, grid):
        report = energy_Es(ComplexField.constant(grid), 1.0)
        assert report.total == 0.0
        assert report.to_dict()["total"] == 0.0

    def test_energy_index_domain(self, grid):
        with pytest.raises(DomainError):
            energy_Es(ComplexField.constant(grid), 0.5)
        with pytest.raises(DomainError):
            energy_Emu(ComplexField.constant(grid), 1.0)

    def test_black_soliton(self):
        assert rel_error(black_soliton_energy().total, CRITICAL_ENERGY) < 1e-8

    @pytest.mark.parametrize("delta", [0.2, 0.5, 0.8])
    def test_q_delta_exact_energy(self, delta):
        expected = b_tilde(delta)
        assert abs(q_delta_energy_exact(delta).total - expected) < 1e-6 * (1 + expected)

    def test_q_delta_spectral_energy(self):
        grid = Grid1D(60.0, 4096)
        energy = energy_Es(minimizer_q_delta(0.5, grid), 1.0).total
        assert abs(energy - b_tilde(0.5)) < 1e-2

    def test_hydro_matches_field_energy(self, gentle_field):
        state = madelung_forward(gentle_field)
        hydro = energy_hydro(state)
        field = energy_Es(gentle_field, 1.0)
        assert rel_error(hydro.total, field.total) < 1e-8
        assert rel_error(hydro.gradient_part, field.gradient_part) < 1e-8

    def test_fractional_energy_is_gauge_invariant(self, gentle_field):
        rotated = gentle_field.with_samples(np.exp(0.7j) * gentle_field.samples)
        a = energy_Emu(gentle_field, 0.75).total
        b = energy_Emu(rotated, 0.75).total
        assert rel_error(b, a) < 1e-12
        hydro = energy_hydro_fractional(madelung_forward(gentle_field), 0.75).total
        assert rel_error(hydro, a) < 1e-8

    @pytest.mark.parametrize("delta", [0.0, 1.0])
    def test_minimizer_needs_open_interval(self, grid, delta):
        with pytest.raises(DomainError):
            minimizer_q_delta(delta, grid)


class TestCertificates:
    """能量间隙证书与小能量证书"""

    def test_energy_gap_passes(self):
        cert = vacuum_certificate([0.5, 0.5], [0.9, 0.95], 0.6)
        assert cert.passed
        assert cert.threshold == pytest.approx(delta_tilde(0.6))
        assert cert.observed_min == 0.9

    def test_energy_gap_detects_dip(self):
        cert = vacuum_certificate([0.5], [0.2], 0.6)
        assert not cert.passed

    @pytest.mark.parametrize("b", [0.4, 0.5, CRITICAL_ENERGY, 2.0])
    def test_energy_bound_ordering(self, b):
        with pytest.raises(DomainError):
            vacuum_certificate([0.5], [0.9], b)

    def test_empty_inputs(self):
        with pytest.raises(DomainError):
            vacuum_certificate([], [0.9], 0.6)

    def test_small_energy_vacuous(self):
        cert = small_energy_certificate(0.01, [0.1], 0.75, epsilon=0.5, cC_product=4.0)
        assert cert.vacuous
        assert cert.passed

    def test_small_energy_threshold(self):
        passing = small_energy_certificate(0.01, [0.9], 0.75, epsilon=0.04, cC_product=1.0)
        assert passing.threshold == pytest.approx(0.8)
        assert passing.passed and not passing.vacuous
        failing = small_energy_certificate(0.01, [0.7], 0.75, epsilon=0.04, cC_product=1.0)
        assert not failing.passed

    def test_small_energy_domain(self):
        with pytest.raises(DomainError):
            small_energy_certificate(0.1, [0.9], 0.75, epsilon=0.05, cC_product=1.0)
        with pytest.raises(DomainError):
            small_energy_certificate(0.01, [0.9], 0.75, epsilon=0.05, cC_product=0.0)
        with pytest.raises(DomainError):
            small_energy_certificate(0.01, [0.9], 1.2, epsilon=0.05, cC_product=1.0)


class TestProbes:
    """极小性探针与 E^mu 下界拟合"""

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_dip_field_is_periodic(self, grid, seed):
        """凹陷场在中心的对径点附近精确等于 1, 周期延拓无跳变"""
        q = dip_field(grid, np.random.default_rng(seed), 0.5)
        samples = np.asarray(q.samples)
        center = int(np.argmin(np.abs(samples)))
        assert abs(samples[center]) <= 0.5
        n = grid.n_points
        seam = [(center + n // 2 + k) % n for k in range(-2, 3)]
        assert np.max(np.abs(samples[seam] - 1.0)) < 1e-14

    def test_minimality_has_no_counterexamples(self, grid):
        report = minimality_probe(10, 0.5, grid, seed=7)
        assert report.samples == 10
        assert report.counterexamples == 0
        assert report.min_margin > -1e-6

    def test_emu_fit_constant(self, grid):
        report = emu_lower_bound_fit([0.2, 0.5, 0.8], 0.75, grid)
        assert len(report.energies) == 3
        assert all(e > 0 for e in report.energies)
        assert math.isfinite(report.constant) and report.constant > 0

    @pytest.mark.parametrize("mu", [0.6, 0.75, 0.9])
    def test_emu_lower_bound_with_frozen_constant(self, grid, mu):
        """E^mu(q_delta) >= (1 - delta)^2 / C 对冻结常数成立, 拟合值落在冻结区间内"""
        deltas = [0.1, 0.25, 0.5, 0.75, 0.9]
        report = emu_lower_bound_fit(deltas, mu, grid)
        for delta, energy in zip(deltas, report.energies):
            assert energy >= (1.0 - delta) ** 2 / EMU_FIT_CEILING
        # E^mu <= E^1 ~ b_tilde 给出拟合常数的下限
        assert 0.6 < report.constant <= EMU_FIT_CEILING
