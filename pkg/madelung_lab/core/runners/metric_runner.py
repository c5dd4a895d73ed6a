"""度量实验执行器 (metric / bilipschitz)"""

import math

import numpy as np

from ...core.errors import VacuumError
from ...numerics.initial_conditions import random_hydro_state, random_pairs
from ...numerics.madelung import madelung_forward
from ...numerics.metrics import (
    ball_localization_ratio,
    bilipschitz_probe,
    energy_distance_probe,
    localization_probe,
    metric_ds,
    metric_ds_tilde,
    metric_theta,
    per_ball_distances,
    shrinking_family_ratios,
)
from ...numerics.spectral_core import Ball
from ..reports import RunReport
from .base_runner import BaseExperimentRunner


SEED_STABILITY = 0.2
REFINEMENT_SLACK = 1.05


def _relative_spread(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b))


class MetricRunner(BaseExperimentRunner):
    """度量实验执行器"""

    def run(self) -> RunReport:
        if self.config.command == "bilipschitz":
            return self.run_bilipschitz()
        return self.run_metric()

    def run_metric(self) -> RunReport:
        report = self.new_report()
        grid = self.grid()
        s = float(self.config.s)
        q = self.field(self.config.left, grid)
        p = self.field(self.config.right, grid)

        name = "y_quadrature"
        callback = self.progress(name, grid.n_points // int(self.config.y_stride), "d^s y-nodes")
        metric = metric_ds(q, p, s, y_stride=int(self.config.y_stride), progress=callback)
        self.done(name)
        metric.seed = int(self.config.seed)
        try:
            metric.theta_s = metric_theta(madelung_forward(q), madelung_forward(p), s)
        except VacuumError as exc:
            self.info(f"⚠️ 存在真空, 不计算 theta^s: {exc}")
        if self.config.get("radius"):
            metric.per_ball = per_ball_distances(q, p, s, float(self.config.radius))

        results = {"metric": metric.to_dict(),
                   "d_s_tilde": metric_ds_tilde(q, p, s, y_stride=int(self.config.y_stride))}
        results["energy_distance"] = energy_distance_probe([("left", q), ("right", p)], s).to_dict()
        if self.config.get("radius"):
            radius = float(self.config.radius)
            results["localization"] = localization_probe(q, p, s, radius).to_dict()
            results["ball_localization_ratio"] = ball_localization_ratio(q, p, s, Ball(0.0, radius))
        report.results = results
        report.check("d_s_nonnegative", metric.d_s, 0.0, ">=", "TRIVIAL")
        return report

    def _probe(self, n_points: int, seed: int):
        grid = self.grid(n_points=n_points)
        pairs = random_pairs(grid, int(self.config.samples), seed)
        return bilipschitz_probe(pairs, float(self.config.s), float(self.config.energy_cap),
                                 y_stride=int(self.config.y_stride))

    def run_bilipschitz(self) -> RunReport:
        report = self.new_report()
        seed = int(self.config.seed)
        n = int(self.config.N)
        s = float(self.config.s)

        with self.context("bilipschitz seed A"):
            first = self._probe(n, seed)
        with self.context("bilipschitz seed B"):
            second = self._probe(n, seed + 1000)
        with self.context("bilipschitz N -> 2N"):
            refined = self._probe(2 * n, seed)

        grid = self.grid()
        rng = np.random.default_rng(seed)
        state = random_hydro_state(grid, rng)
        direction = random_hydro_state(grid, rng)
        shrinking = shrinking_family_ratios(state, direction.rho - 1.0, direction.v, s)

        report.results = {
            "seed_a": first.to_dict(), "seed_b": second.to_dict(), "refined": refined.to_dict(),
            "shrinking_family": [{"eps": e, "theta_over_d": a, "d_over_theta": b} for e, a, b in shrinking],
        }
        report.check("accepted_pairs", first.accepted, 0, ">", "DERIVED")
        report.check("max_theta_over_d_finite", first.max_theta_over_d, None, "finite", "PAPER")
        report.check("max_d_over_theta_finite", first.max_d_over_theta, None, "finite", "PAPER")
        report.check("theta_over_d_seed_stability",
                     _relative_spread(first.max_theta_over_d, second.max_theta_over_d),
                     SEED_STABILITY, "<", "DERIVED")
        report.check("d_over_theta_seed_stability",
                     _relative_spread(first.max_d_over_theta, second.max_d_over_theta),
                     SEED_STABILITY, "<", "DERIVED")
        report.check("theta_over_d_refinement", refined.max_theta_over_d / first.max_theta_over_d,
                     REFINEMENT_SLACK, "<=", "DERIVED")
        report.check("d_over_theta_refinement", refined.max_d_over_theta / first.max_d_over_theta,
                     REFINEMENT_SLACK, "<=", "DERIVED")
        limits = [a for _, a, _ in shrinking]
        report.check("shrinking_family_finite", max(limits) if limits else math.nan, None, "finite", "DERIVED")
        return report
