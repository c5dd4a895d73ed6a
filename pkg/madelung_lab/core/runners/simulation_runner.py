"""时间演化实验执行器 (simulate-gp / simulate-hgp / conjugation)"""

from ...numerics.dynamics import (
    SimConfig,
    conjugation_check,
    conjugation_refinement,
    evolve_gp,
    evolve_hgp,
    refinement_study,
    stable_dt,
)
from ...numerics.madelung import madelung_forward
from ...numerics.spectral_core import Grid1D
from ..reports import RunReport
from .base_runner import BaseExperimentRunner


GP_DRIFT_TOLERANCE = 1e-6
HGP_DRIFT_TOLERANCE = 1e-4
HGP_MASS_TOLERANCE = 1e-8
CONJUGATION_TOLERANCE = 1e-3
AUTO_DT_FRACTION = 0.9
GP_DEFAULT_DT = 1e-3


class SimulationRunner(BaseExperimentRunner):
    """时间演化实验执行器"""

    def run(self) -> RunReport:
        command = self.config.command
        if command == "simulate-hgp":
            return self.run_hgp()
        if command == "conjugation":
            return self.run_conjugation()
        return self.run_gp()

    def _dt(self, grid: Grid1D, hydro: bool) -> float:
        dt = self.config.dt
        if dt == "auto":
            return AUTO_DT_FRACTION * stable_dt(grid) if hydro else GP_DEFAULT_DT
        return float(dt)

    def _sim_config(self, grid: Grid1D, scheme: str) -> SimConfig:
        hydro = scheme == "rk4_hgp"
        return SimConfig(
            dt=self._dt(grid, hydro),
            t_end=float(self.config.T),
            scheme=scheme,
            snapshot_stride=int(self.config.snapshot_stride),
            rho_floor=float(self.config.get("rho_floor") or 1e-6),
            dealias=bool(self.config.get("dealias", True)),
            fault=self.config.get("fault"),
        )

    def _manifest(self, cfg: SimConfig) -> dict:
        return {"command": self.config.command, "init": self.config.init, "seed": int(self.config.seed),
                "config": cfg.to_dict()}

    def run_gp(self) -> RunReport:
        report = self.new_report()
        grid = self.grid()
        q0 = self.field(self.config.init, grid)
        cfg = self._sim_config(grid, "strang_gp")
        n_steps = cfg.step_plan()[0]

        callback = self.progress("gp", n_steps, "GP Strang")
        traj = evolve_gp(q0, cfg, progress=callback)
        self.done("gp")
        self.writer.write_trajectory("trajectory", traj, self._manifest(cfg))

        results = {"energy_initial": traj.energies[0], "energy_drift": traj.energy_drift,
                   "mass_drift": traj.mass_drift(), "min_modulus": min(traj.min_moduli),
                   "steps": n_steps, "dt": cfg.step_plan()[1]}
        report.check("energy_drift", traj.energy_drift, GP_DRIFT_TOLERANCE, "<", "PAPER",
                     note="relative E^1 drift")

        certificate = traj.vacuum_certificate(margin=float(self.config.get("margin") or 0.01))
        if certificate is not None:
            results["vacuum_certificate"] = certificate.to_dict()
            report.check("no_vacuum_certificate", certificate.passed, None, "true", "PAPER",
                         note=f"min |q| > delta_tilde({certificate.energy_bound:.6f})")

        if not self.config.quick:
            with self.context("GP dt refinement"):
                study = refinement_study(q0, cfg, levels=2)
            results["refinement"] = study.to_dict()
            ratio = study.drift_ratios[0]
            report.check("drift_ratio_at_least_3", ratio, 3.0, ">=", "DERIVED",
                         note="second order: halving dt reduces drift about 4x")
        report.results = results
        return report

    def run_hgp(self) -> RunReport:
        report = self.new_report()
        grid = self.grid()
        state0 = madelung_forward(self.field(self.config.init, grid))
        cfg = self._sim_config(grid, "rk4_hgp")
        n_steps = cfg.step_plan()[0]

        callback = self.progress("hgp", n_steps, "hGP RK4")
        traj = evolve_hgp(state0, cfg, progress=callback)
        self.done("hgp")
        self.writer.write_trajectory("trajectory", traj, self._manifest(cfg))

        results = {"energy_initial": traj.energies[0], "energy_drift": traj.energy_drift,
                   "mass_drift": traj.mass_drift(), "min_density": min(d["min_modulus_or_density"]
                                                                       for d in traj.diagnostics),
                   "steps": n_steps, "dt": cfg.step_plan()[1], "stable_dt": stable_dt(grid)}
        report.check("hydro_energy_drift", traj.energy_drift, HGP_DRIFT_TOLERANCE, "<", "DERIVED")
        report.check("mass_conservation", traj.mass_drift(), HGP_MASS_TOLERANCE, "<", "DERIVED")
        certificate = traj.vacuum_certificate()
        if certificate is not None:
            results["vacuum_certificate"] = certificate.to_dict()
        report.results = results
        return report

    def run_conjugation(self) -> RunReport:
        report = self.new_report()
        grid = self.grid()
        s = float(self.config.s)
        init = self.config.init
        state0 = madelung_forward(self.field(init, grid))
        cfg = self._sim_config(grid, "rk4_hgp")

        callback = self.progress("conjugation", cfg.step_plan()[0], "hGP RK4 + GP")
        single = conjugation_check(state0, cfg, s=s, progress=callback)
        self.done("conjugation")
        report.check("conjugation_discrepancy", single.final_discrepancy, CONJUGATION_TOLERANCE, "<",
                     "DERIVED", note="theta^s between the GP route and the hGP route")
        results = {"single": single.to_dict()}

        levels = list(self.config.levels)
        if self.config.quick:
            levels = levels[:2]
        if len(levels) >= 2:
            with self.context("conjugation refinement"):
                study = conjugation_refinement(
                    lambda g: madelung_forward(self.field(init, g)),
                    grid.length, levels, float(self.config.T), s=s, fault=self.config.get("fault"))
            results["refinement"] = study.to_dict()
            report.check("conjugation_refinement_monotone", study.monotone, None, "true", "DERIVED")
        report.results = results
        return report
