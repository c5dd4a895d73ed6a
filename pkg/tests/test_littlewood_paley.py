"""
Littlewood-Paley 工具测试

二进单位分解、块重构、Besov 范数、Bony 分解与乘积估计探针。
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from madelung_lab.core.errors import DomainError, DyadicIndexError, InvalidGridError
from madelung_lab.numerics.littlewood_paley import (
    CHI_INNER,
    CHI_OUTER,
    DyadicPartition,
    besov_equivalence,
    besov_hs_bounds,
    besov_norm,
    bony_decompose,
    bony_residual,
    chi,
    decompose,
    low_pass,
    phi,
    product_estimate_probe,
    product_ratios,
    random_probe_field,
    required_j_max,
    smooth_step,
)
from madelung_lab.numerics.spectral_core import ComplexField, Grid1D, l2_norm


# ============================================================
# 测试策略定义
# ============================================================

seed_strategy = st.integers(min_value=0, max_value=2 ** 31 - 1)

frequency_strategy = st.floats(min_value=-200.0, max_value=200.0, allow_nan=False, allow_infinity=False)


def _probe_pair(grid, seed, band_modes=None):
    rng = np.random.default_rng(seed)
    f = ComplexField(grid, random_probe_field(grid, 1.0, rng, band_modes=band_modes))
    g = ComplexField(grid, random_probe_field(grid, 1.0, rng, band_modes=band_modes)
                     + 1j * random_probe_field(grid, 1.0, rng, band_modes=band_modes))
    return f, g


# ============================================================
# 截断函数
# ============================================================

class TestCutoffs:
    """chi / phi 的支撑与光滑阶跃"""

    def test_smooth_step_limits(self):
        t = np.array([-1.0, 0.0, 0.5, 1.0, 2.0])
        assert smooth_step(t).tolist() == pytest.approx([0.0, 0.0, 0.5, 1.0, 1.0])

    def test_chi_plateau_and_support(self):
        xi = np.array([0.0, 0.5, CHI_INNER, CHI_OUTER, 2.0, -0.3])
        assert chi(xi).tolist() == pytest.approx([1.0, 1.0, 1.0, 0.0, 0.0, 1.0])

    @given(xi=frequency_strategy)
    @settings(max_examples=200, deadline=None)
    def test_phi_annulus(self, xi):
        value = float(phi(np.array([xi]))[0])
        assert -1e-15 <= value <= 1.0 + 1e-15
        if abs(xi) <= CHI_INNER or abs(xi) >= 2 * CHI_OUTER:
            assert value == 0.0

    @given(xi=frequency_strategy)
    @settings(max_examples=200, deadline=None)
    def test_telescoping_sum(self, xi):
        partition = DyadicPartition(j_max=required_j_max(abs(xi) + 1.0))
        assert partition.residual(np.array([xi])) < 1e-14

    def test_required_j_max(self):
        assert required_j_max(1.0) == 0
        assert CHI_INNER * 2.0 ** (required_j_max(40.0) + 1) >= 40.0
        assert CHI_INNER * 2.0 ** required_j_max(40.0) < 40.0


# ============================================================
# 二进分解
# ============================================================

class TestDecomposition:
    """块分解与重构"""

    def test_partition_of_unity_on_grid(self, fine_grid):
        partition = DyadicPartition.for_grid(fine_grid)
        assert partition.j_max >= 3
        assert partition.residual(fine_grid.xi) < 1e-12

    @given(seed=seed_strategy)
    @settings(max_examples=10, deadline=None)
    def test_reconstruction(self, seed):
        grid = Grid1D(40.0, 512)
        _, g = _probe_pair(grid, seed)
        dec = decompose(g)
        assert l2_norm(dec.reconstruct() - g) <= 1e-12 * l2_norm(g)

    def test_real_blocks_stay_real(self, fine_grid, rng):
        f = ComplexField(fine_grid, random_probe_field(fine_grid, 1.0, rng))
        dec = decompose(f)
        assert all(block.is_real for block in dec.blocks)

    def test_low_pass_top_level_is_identity(self, fine_grid, rng):
        f = ComplexField(fine_grid, random_probe_field(fine_grid, 1.0, rng))
        top = DyadicPartition.for_grid(fine_grid).j_max + 1
        assert l2_norm(low_pass(f, top) - f) <= 1e-12 * l2_norm(f)
        assert l2_norm(low_pass(f, -1)) == 0.0

    def test_constant_lives_in_lowest_block(self, fine_grid):
        dec = decompose(ComplexField.constant(fine_grid))
        assert np.allclose(dec.block(-1).samples, 1.0, atol=1e-14)
        for j in dec.partition.levels[1:]:
            assert np.max(np.abs(dec.block(j).samples)) < 1e-14

    @pytest.mark.parametrize("m", [3, 20, 60])
    def test_single_mode_occupies_neighbouring_blocks(self, fine_grid, m):
        xi = fine_grid.frequency(m)
        wave = ComplexField(fine_grid, np.exp(1j * xi * np.asarray(fine_grid.x)))
        dec = decompose(wave)
        occupied = [j for j in dec.partition.levels if l2_norm(dec.block(j)) > 1e-12]
        j0 = math.floor(math.log2(xi))
        assert occupied
        assert set(occupied) <= {j0 - 1, j0, j0 + 1}

    def test_block_index_out_of_range(self, fine_grid):
        dec = decompose(ComplexField.constant(fine_grid))
        with pytest.raises(DyadicIndexError):
            dec.block(dec.partition.j_max + 1)
        with pytest.raises(DyadicIndexError):
            dec.block(-2)

    def test_coarse_grid_rejected(self):
        with pytest.raises(InvalidGridError):
            decompose(ComplexField.constant(Grid1D(40.0, 16)))

    def test_dyadic_index_error_is_domain_error(self):
        assert issubclass(DyadicIndexError, DomainError)


# ============================================================
# Besov 范数
# ============================================================

class TestBesov:
    """B^s_{p,r} 范数"""

    def test_b022_brackets_l2(self, fine_grid, rng):
        f = ComplexField(fine_grid, random_probe_field(fine_grid, 1.0, rng))
        value = besov_norm(f, 0.0, 2, 2)
        norm = l2_norm(f)
        assert norm / math.sqrt(2.0) * (1 - 1e-12) <= value <= norm * (1 + 1e-12)

    @pytest.mark.parametrize("p,r", [(1, 1), (2, math.inf), (math.inf, 1), (math.inf, math.inf)])
    def test_supported_exponents(self, fine_grid, rng, p, r):
        f = ComplexField(fine_grid, random_probe_field(fine_grid, 1.0, rng))
        value = besov_norm(f, 1.0, p, r)
        assert math.isfinite(value) and value > 0

    def test_unsupported_exponent(self, fine_grid):
        with pytest.raises(DomainError):
            besov_norm(ComplexField.constant(fine_grid), 1.0, 3, 2)

    @pytest.mark.parametrize("s", [0.0, 0.75, 1.0, 1.5])
    def test_b22_is_equivalent_to_hs(self, fine_grid, s):
        report = besov_equivalence(50, s, fine_grid, seed=0)
        lower, upper = besov_hs_bounds(s)
        assert report.samples == 50
        assert lower <= report.min_ratio <= report.max_ratio <= upper
        assert report.within_bounds
        assert report.to_dict()["max_ratio"] == report.max_ratio

    def test_bounds_need_nonnegative_index(self):
        assert besov_hs_bounds(0.0) == (pytest.approx(1.0 / math.sqrt(2.0)), 1.0)
        with pytest.raises(DomainError):
            besov_hs_bounds(-0.5)


# ============================================================
# Bony 分解
# ============================================================

class TestBony:
    """T_f g + R(f, g) + T_g f = f g"""

    @given(seed=seed_strategy)
    @settings(max_examples=5, deadline=None)
    def test_parts_sum_to_pointwise_product(self, seed):
        grid = Grid1D(40.0, 256)
        f, g = _probe_pair(grid, seed, band_modes=16)
        parts = bony_decompose(f, g)
        product = f.samples * g.samples
        residual = np.sqrt(np.sum(np.abs(parts.total().samples - product) ** 2))
        assert residual <= 1e-10 * np.sqrt(np.sum(np.abs(product) ** 2))
        assert bony_residual(f, g) < 1e-10

    def test_single_mode_square(self, grid):
        f = ComplexField(grid, np.cos(grid.frequency(5) * np.asarray(grid.x)))
        parts = bony_decompose(f, f)
        assert np.max(np.abs(parts.total().samples - f.samples ** 2)) < 1e-12

    def test_real_inputs_give_real_parts(self, grid, rng):
        f = ComplexField(grid, random_probe_field(grid, 1.0, rng))
        g = ComplexField(grid, random_probe_field(grid, 1.0, rng))
        parts = bony_decompose(f, g)
        assert parts.paraproduct_fg.is_real and parts.remainder.is_real and parts.paraproduct_gf.is_real


# ============================================================
# 乘积估计探针
# ============================================================

class TestProductProbe:
    """随机场与乘积估计比值"""

    def test_probe_field_is_normalised(self, grid, rng):
        f = random_probe_field(grid, 1.0, rng)
        assert np.max(np.abs(f)) <= 1.0 + 1e-12
        assert not np.iscomplexobj(f)

    def test_band_is_resolution_independent(self):
        coarse = Grid1D(40.0, 256)
        fine = Grid1D(40.0, 512)
        a = random_probe_field(coarse, 1.0, np.random.default_rng(5), band_modes=32)
        b = random_probe_field(fine, 1.0, np.random.default_rng(5), band_modes=32)
        scale = float(np.dot(b[::2], a) / np.dot(a, a))
        assert scale > 0
        assert np.max(np.abs(b[::2] - scale * a)) < 1e-12

    @pytest.mark.parametrize("band", [0, 1000])
    def test_band_out_of_range(self, grid, rng, band):
        with pytest.raises(DomainError):
            random_probe_field(grid, 1.0, rng, band_modes=band)

    @pytest.mark.parametrize("s", [0.75, 1.0, 1.5])
    def test_ratios_finite(self, grid, s):
        report = product_estimate_probe(5, s, grid, seed=3)
        assert report.skipped == 0
        assert len(report.ratios_eq13) == 5
        assert math.isfinite(report.max_ratio_eq13) and report.max_ratio_eq13 > 0
        assert math.isfinite(report.max_ratio_eq14) and report.max_ratio_eq14 > 0

    def test_record_keys(self, grid):
        record = product_estimate_probe(3, 1.0, grid, seed=4).to_dict()
        assert {"s", "samples", "max_ratio_eq13", "max_ratio_eq14", "seed"} <= set(record)
        assert record["samples"] == 3 and record["seed"] == 4

    def test_ratios_vanish_for_zero_factor(self, grid):
        zero = ComplexField(grid, np.zeros(grid.n_points))
        assert product_ratios(zero, zero, 1.0) == (None, None)

    def test_probe_is_deterministic(self, grid):
        a = product_estimate_probe(3, 1.0, grid, seed=11)
        b = product_estimate_probe(3, 1.0, grid, seed=11)
        assert a.ratios_eq13 == b.ratios_eq13

    def test_invalid_arguments(self, grid):
        with pytest.raises(DomainError):
            product_estimate_probe(0, 1.0, grid)
        with pytest.raises(DomainError):
            product_estimate_probe(3, 0.5, grid)
