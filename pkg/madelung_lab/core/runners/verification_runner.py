"""调和分析工具验证执行器 (verify-lp / verify-products)"""

import numpy as np

from ...numerics.initial_conditions import random_phases, random_state_pairs
from ...numerics.littlewood_paley import (
    DyadicPartition,
    besov_equivalence,
    bony_residual,
    decompose,
    product_estimate_probe,
    random_probe_field,
)
from ...numerics.madelung import amplitude_equivalence_probe
from ...numerics.metrics import phase_exponential_probe
from ...numerics.spectral_core import (
    ComplexField,
    l2_norm,
    partition_norm_equivalence_probe,
)
from ..reports import RunReport
from .base_runner import BaseExperimentRunner


PARTITION_TOLERANCE = 1e-12
BONY_TOLERANCE = 1e-10
RECONSTRUCTION_TOLERANCE = 1e-12
PROBE_REFINEMENT_SPREAD = 0.1
BESOV_FIELDS = 50


class VerificationRunner(BaseExperimentRunner):
    """Littlewood-Paley 与乘积估计验证"""

    def run(self) -> RunReport:
        if self.config.command == "verify-products":
            return self.run_products()
        return self.run_lp()

    def run_lp(self) -> RunReport:
        report = self.new_report()
        grid = self.grid()
        partition = DyadicPartition.for_grid(grid)
        residual = partition.residual(grid.xi)
        report.check("partition_of_unity", residual, PARTITION_TOLERANCE, "<", "PAPER")

        seed = int(self.config.seed)
        rng = np.random.default_rng(seed)
        worst_bony = 0.0
        worst_reconstruction = 0.0
        for _ in range(int(self.config.samples)):
            f = ComplexField(grid, random_probe_field(grid, 1.0, rng))
            g = ComplexField(grid, random_probe_field(grid, 1.0, rng) + 1j * random_probe_field(grid, 1.0, rng))
            dec = decompose(g)
            worst_reconstruction = max(worst_reconstruction,
                                       l2_norm(dec.reconstruct() - g) / max(l2_norm(g), 1e-300))
            worst_bony = max(worst_bony, bony_residual(f, g))
        report.check("block_reconstruction", worst_reconstruction, RECONSTRUCTION_TOLERANCE, "<", "TRIVIAL")
        report.check("bony_reconstruction", worst_bony, BONY_TOLERANCE, "<", "PAPER",
                     note="against the pointwise product of band-limited fields")

        besov_rows = []
        for s in self.config.s_list:
            if s < 0:
                continue
            equivalence = besov_equivalence(BESOV_FIELDS, s, grid, seed)
            besov_rows.append(equivalence.to_dict())
            report.check(f"besov_lower_ratio[s={s}]", equivalence.min_ratio, equivalence.lower_bound, ">=", "DERIVED")
            report.check(f"besov_upper_ratio[s={s}]", equivalence.max_ratio, equivalence.upper_bound, "<=", "DERIVED")

        f = ComplexField(grid, random_probe_field(grid, 1.0, np.random.default_rng(seed)))
        radius = grid.length / 8.0
        partition_rows = []
        for s in (0.0, 1.0):
            probe = partition_norm_equivalence_probe(f, s, radius)
            partition_rows.append(probe.to_dict())
            report.check(f"partition_lower_ratio[s={s}]", probe.lower_ratio, 1.0 + 1e-9, "<=", "PAPER")
            report.check(f"partition_upper_ratio_finite[s={s}]", probe.upper_ratio, None, "finite", "PAPER")

        report.results = {"j_max": partition.j_max, "partition_residual": residual,
                          "bony_residual": worst_bony, "reconstruction_residual": worst_reconstruction,
                          "besov": besov_rows, "partition_probe": partition_rows}
        return report

    def run_products(self) -> RunReport:
        report = self.new_report()
        grid = self.grid()
        fine = self.grid(n_points=2 * int(self.config.N))
        samples = int(self.config.samples)
        seed = int(self.config.seed)
        rows = []
        for s in self.config.s_list:
            if s <= 0.5:
                continue
            band = int(self.config.N) // 8
            coarse = product_estimate_probe(samples, s, grid, seed, band_modes=band)
            refined = product_estimate_probe(samples, s, fine, seed, band_modes=band)
            rows.append({"coarse": coarse.to_dict(), "refined": refined.to_dict()})
            for key in ("max_ratio_eq13", "max_ratio_eq14"):
                a, b = getattr(coarse, key), getattr(refined, key)
                report.check(f"{key}_finite[s={s}]", a, None, "finite", "PAPER")
                report.check(f"{key}_refinement[s={s}]", abs(a - b) / max(a, b),
                             PROBE_REFINEMENT_SPREAD, "<", "DERIVED")

        s = float(self.config.s)
        phase_report = phase_exponential_probe(random_phases(grid, samples, seed), grid, s)
        report.check("phase_exponential_finite", phase_report.max_ratio, None, "finite", "PAPER")
        small = phase_exponential_probe(random_phases(grid, 1, seed, amplitude=1e-4), grid, s)
        report.check("phase_exponential_linearization", small.linear_ratios[0] - 1.0, 1e-3, "abs<", "DERIVED",
                     note="e^{i phi} ~ 1 + i phi for small phi")

        equivalence = amplitude_equivalence_probe(random_state_pairs(grid, samples, seed), s)
        report.check("rho_amplitude_equivalence", max(equivalence.max_rho_over_amp, equivalence.max_amp_over_rho),
                     None, "finite", "DERIVED")
        report.results = {"products": rows, "phase_exponential": phase_report.to_dict(),
                          "amplitude_equivalence": equivalence.to_dict()}
        return report
