"""
时间演化测试

GP 分裂步、hGP 的 RK4 线方法、共轭检查与时间步加密。
"""

import math

import numpy as np
import pytest

from madelung_lab.core.errors import ConfigError, DomainError, StabilityError, VacuumBreachError
from madelung_lab.numerics.dynamics import (
    SimConfig,
    Trajectory,
    conjugation_check,
    conjugation_refinement,
    evolve_gp,
    evolve_hgp,
    linear_substep,
    nonlinear_substep,
    refinement_study,
    rhs_hgp,
    stable_dt,
    step_gp_strang,
)
from madelung_lab.numerics.initial_conditions import plane_wave
from madelung_lab.numerics.madelung import HydroState
from madelung_lab.numerics.spectral_core import ComplexField


# ============================================================
# 配置
# ============================================================

class TestSimConfig:
    """SimConfig 校验与步长规划"""

    @pytest.mark.parametrize("kwargs", [
        {"dt": 0.0, "t_end": 1.0},
        {"dt": math.nan, "t_end": 1.0},
        {"dt": 0.1, "t_end": -1.0},
        {"dt": 0.1, "t_end": 1.0, "scheme": "euler"},
        {"dt": 0.1, "t_end": 1.0, "snapshot_stride": 0},
        {"dt": 0.1, "t_end": 1.0, "rho_floor": 0.0},
        {"dt": 0.1, "t_end": 1.0, "fault": "drop-everything"},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            SimConfig(**kwargs)

    def test_step_plan(self):
        assert SimConfig(dt=0.3, t_end=1.0).step_plan() == (4, pytest.approx(0.25))
        assert SimConfig(dt=0.1, t_end=1.0).step_plan()[0] == 10
        assert SimConfig(dt=0.3, t_end=0.0).step_plan() == (0, 0.3)

    def test_fault_disables_dealiasing(self):
        assert SimConfig(dt=0.1, t_end=1.0).effective_dealias
        assert not SimConfig(dt=0.1, t_end=1.0, fault="no-dealias").effective_dealias
        assert not SimConfig(dt=0.1, t_end=1.0, dealias=False).effective_dealias


class TestTrajectory:
    """快照序列"""

    def test_times_must_increase(self, grid):
        traj = Trajectory(kind="field", grid=grid, config=SimConfig(dt=0.1, t_end=1.0))
        traj.append(0.0, ComplexField.constant(grid))
        with pytest.raises(DomainError):
            traj.append(0.0, ComplexField.constant(grid))

    def test_diagnostics_frame(self, gentle_field):
        traj = evolve_gp(gentle_field, SimConfig(dt=0.05, t_end=0.2))
        frame = traj.diagnostics_frame()
        assert list(frame.columns) == ["t", "energy", "min_modulus_or_density", "mass_like"]
        assert len(frame) == 5
        assert frame["t"].iloc[-1] == pytest.approx(0.2)

    def test_snapshot_stride_keeps_final(self, gentle_field):
        traj = evolve_gp(gentle_field, SimConfig(dt=0.05, t_end=0.25, snapshot_stride=2))
        assert traj.times == pytest.approx([0.0, 0.1, 0.2, 0.25])

    def test_vacuum_certificate(self, gentle_field):
        traj = evolve_gp(gentle_field, SimConfig(dt=0.05, t_end=0.5))
        cert = traj.vacuum_certificate()
        assert cert is not None
        assert cert.passed


# ============================================================
# GP
# ============================================================

class TestGrossPitaevskii:
    """Strang 分裂步"""

    def test_substeps_are_exact_on_constants(self, grid):
        one = np.ones(grid.n_points, dtype=np.complex128)
        assert np.all(nonlinear_substep(one, 0.3) == 1.0)
        assert np.allclose(linear_substep(one, grid, 0.3), 1.0, atol=0.0)

    def test_nonlinear_substep_keeps_modulus(self, gentle_field):
        out = nonlinear_substep(gentle_field.samples, 0.2)
        assert np.allclose(np.abs(out), gentle_field.modulus(), rtol=1e-14)

    def test_constant_is_stationary(self, grid):
        traj = evolve_gp(ComplexField.constant(grid), SimConfig(dt=0.1, t_end=1.0))
        assert np.all(traj.final.samples == 1.0)
        assert traj.energy_drift == 0.0

    def test_plane_wave_exact(self, grid):
        k = grid.frequency(2)
        q0 = plane_wave(grid, k)
        traj = evolve_gp(q0, SimConfig(dt=0.1, t_end=1.0))
        exact = np.exp(1j * (k * np.asarray(grid.x) - k * k * 1.0))
        assert np.max(np.abs(traj.final.samples - exact)) < 1e-10

    def test_mass_conserved(self, gentle_field):
        traj = evolve_gp(gentle_field, SimConfig(dt=0.05, t_end=1.0))
        assert traj.mass_drift() < 1e-10

    def test_single_step_matches_evolve(self, gentle_field):
        stepped = step_gp_strang(gentle_field, 0.1)
        evolved = evolve_gp(gentle_field, SimConfig(dt=0.1, t_end=0.1)).final
        assert np.array_equal(stepped.samples, evolved.samples)

    def test_strang_is_second_order(self, gentle_field):
        report = refinement_study(gentle_field, SimConfig(dt=0.02, t_end=0.5), levels=3)
        assert len(report.dts) == 3
        assert 1.7 < report.observed_order < 2.3

    def test_energy_drift_is_small_and_second_order(self, gentle_field):
        """能量漂移足够小, 时间步减半时约降为四分之一"""
        report = refinement_study(gentle_field, SimConfig(dt=5e-4, t_end=0.1), levels=2)
        assert report.drifts[0] < 1e-6
        assert report.drift_ratios[0] > 3.0

    def test_dropped_half_step_is_first_order(self, gentle_field):
        config = SimConfig(dt=0.02, t_end=0.5, fault="drop-half-step")
        report = refinement_study(gentle_field, config, levels=3)
        assert 0.7 < report.observed_order < 1.3

    def test_refinement_needs_two_levels(self, gentle_field):
        with pytest.raises(DomainError):
            refinement_study(gentle_field, SimConfig(dt=0.02, t_end=0.1), levels=1)


# ============================================================
# hGP
# ============================================================

class TestHydrodynamic:
    """hGP 的 RK4 线方法"""

    def test_stable_dt(self, grid):
        bound = stable_dt(grid)
        xi = grid.xi_max
        assert bound == pytest.approx(0.5 / (xi * math.sqrt(xi * xi + 4.0)))
        with pytest.raises(DomainError):
            stable_dt(grid, 0.0)

    def test_ground_state_is_stationary(self, grid):
        dt = 0.9 * stable_dt(grid)
        traj = evolve_hgp(HydroState.ground(grid), SimConfig(dt=dt, t_end=10 * dt, scheme="rk4_hgp"))
        assert np.allclose(traj.final.rho, 1.0, atol=1e-14)
        assert np.allclose(traj.final.v, 0.0, atol=1e-14)

    def test_stability_bound_enforced(self, gentle_state):
        bound = stable_dt(gentle_state.grid)
        config = SimConfig(dt=2.0 * bound, t_end=10.0 * bound, scheme="rk4_hgp")
        with pytest.raises(StabilityError) as excinfo:
            evolve_hgp(gentle_state, config)
        assert excinfo.value.bound == pytest.approx(bound)

    def test_mass_conserved(self, gentle_state):
        dt = 0.9 * stable_dt(gentle_state.grid)
        traj = evolve_hgp(gentle_state, SimConfig(dt=dt, t_end=0.05, scheme="rk4_hgp"))
        assert traj.kind == "state"
        assert traj.mass_drift() < 1e-10

    def test_vacuum_floor(self, gentle_state):
        with pytest.raises(VacuumBreachError):
            rhs_hgp(gentle_state, rho_floor=1.05)
        dt = 0.9 * stable_dt(gentle_state.grid)
        with pytest.raises(VacuumBreachError):
            evolve_hgp(gentle_state, SimConfig(dt=dt, t_end=0.01, scheme="rk4_hgp", rho_floor=1.05))

    def test_even_density_at_rest_keeps_parity(self, grid):
        """rho 偶且 v=0 时 d rho/dt = 0, dv/dt 为奇函数"""
        x = np.asarray(grid.x)
        reflect = (-np.arange(grid.n_points)) % grid.n_points
        rho = 1.0 + 0.2 * np.exp(-x ** 2 / 4.0) + 0.05 * np.cos(2.0 * np.pi * 3 * x / grid.length)
        rho = 0.5 * (rho + rho[reflect])
        drho, dv = rhs_hgp(HydroState(grid, rho, np.zeros(grid.n_points)))
        assert np.max(np.abs(drho)) < 1e-14
        assert np.max(np.abs(dv)) > 1e-3
        assert np.allclose(dv[reflect], -dv, atol=1e-10)

    def test_conjugation(self, gentle_state):
        dt = 0.9 * stable_dt(gentle_state.grid)
        report = conjugation_check(gentle_state, SimConfig(dt=dt, t_end=0.05, scheme="rk4_hgp"))
        assert report.discrepancies[0] < 1e-7
        assert report.max_discrepancy < 1e-3
        assert report.gp_dt == pytest.approx(report.hgp_dt)

    @pytest.mark.slow
    def test_conjugation_refinement(self):
        def make_state(g):
            x = np.asarray(g.x)
            return HydroState(g, 1.0 + 0.2 * np.exp(-x ** 2 / 4.0), np.zeros(g.n_points))

        report = conjugation_refinement(make_state, 40.0, [128, 256], t_end=0.02)
        assert report.n_points == [128, 256]
        assert all(math.isfinite(d) and d >= 0 for d in report.discrepancies)
        assert report.dts[1] < report.dts[0]
