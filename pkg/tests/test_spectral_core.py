"""
谱方法核心测试

覆盖网格、DFT 缩放、谱导数、H^s 范数、去混叠乘积与球上 W^{s,2} 范数。
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from madelung_lab.core.errors import DomainError, InvalidGridError, NumericError
from madelung_lab.numerics.littlewood_paley import random_probe_field
from madelung_lab.numerics.spectral_core import (
    Ball,
    BallQuadrature,
    ComplexField,
    Grid1D,
    ball_cells,
    check_same_grid,
    dealiased_product,
    dft,
    h_s_inner,
    h_s_norm,
    hdot_s_norm,
    idft,
    l2_norm,
    partition_centers,
    partition_norm_equivalence_probe,
    spectral_derivative,
    split_index,
    w_s2_ball_norm,
)

from conftest import rel_error


# ============================================================
# 测试策略定义
# ============================================================

seed_strategy = st.integers(min_value=0, max_value=2 ** 31 - 1)

sobolev_strategy = st.floats(min_value=-1.0, max_value=2.5, allow_nan=False, allow_infinity=False)

exponent_strategy = st.integers(min_value=4, max_value=10)


def _random_field(grid, seed):
    rng = np.random.default_rng(seed)
    return ComplexField(grid, rng.standard_normal(grid.n_points) + 1j * rng.standard_normal(grid.n_points))


# ============================================================
# 网格
# ============================================================

class TestGrid:
    """Grid1D 构造与节点"""

    @given(p=exponent_strategy)
    @settings(max_examples=20, deadline=None)
    def test_power_of_two_accepted(self, p: int):
        grid = Grid1D(10.0, 2 ** p)
        assert grid.n_points == 2 ** p
        assert grid.x.shape == (2 ** p,)
        assert grid.xi.shape == (2 ** p,)

    @pytest.mark.parametrize("n", [0, 1, 3, 100, 1000])
    def test_non_power_of_two_rejected(self, n):
        with pytest.raises(InvalidGridError):
            Grid1D(10.0, n)

    @pytest.mark.parametrize("length", [0.0, -1.0, math.inf, math.nan])
    def test_bad_length_rejected(self, length):
        with pytest.raises(InvalidGridError):
            Grid1D(length, 64)

    def test_origin_node_is_zero(self, grid):
        assert grid.x[0] == pytest.approx(-20.0)
        assert grid.x[grid.origin_index] == pytest.approx(0.0, abs=1e-12)
        assert grid.spacing == pytest.approx(40.0 / 256)

    def test_frequencies(self, grid):
        assert grid.xi[1] == pytest.approx(2 * math.pi / 40.0)
        assert grid.xi_max == pytest.approx(math.pi * 256 / 40.0)
        assert np.all(grid.xi_real >= 0)

    def test_grid_mismatch(self, grid):
        other = Grid1D(40.0, 128)
        with pytest.raises(InvalidGridError):
            check_same_grid(ComplexField.constant(grid), ComplexField.constant(other))


class TestComplexField:
    """ComplexField 不变量"""

    def test_length_mismatch(self, grid):
        with pytest.raises(InvalidGridError):
            ComplexField(grid, np.ones(grid.n_points + 1))

    def test_non_finite_rejected(self, grid):
        samples = np.ones(grid.n_points)
        samples[3] = np.nan
        with pytest.raises(NumericError):
            ComplexField(grid, samples)

    def test_real_input_stays_real(self, grid):
        field = ComplexField(grid, np.cos(grid.x))
        assert field.is_real
        assert not np.iscomplexobj(field.samples)

    def test_samples_are_read_only(self, grid):
        field = ComplexField.constant(grid)
        with pytest.raises(ValueError):
            field.samples[0] = 2.0


# ============================================================
# DFT 与谱导数
# ============================================================

class TestTransforms:
    """DFT 缩放与谱导数精度"""

    @given(seed=seed_strategy)
    @settings(max_examples=25, deadline=None)
    def test_plancherel(self, seed):
        grid = Grid1D(40.0, 128)
        field = _random_field(grid, seed)
        spec = dft(field)
        assert rel_error(float(np.sum(np.abs(spec) ** 2)), l2_norm(field) ** 2) < 1e-12

    @given(seed=seed_strategy)
    @settings(max_examples=25, deadline=None)
    def test_inverse_transform(self, seed):
        grid = Grid1D(40.0, 128)
        field = _random_field(grid, seed)
        back = idft(dft(field), grid)
        assert np.max(np.abs(back.samples - field.samples)) < 1e-12

    def test_constant_spectrum(self, grid):
        spec = dft(ComplexField.constant(grid))
        assert abs(spec[0]) == pytest.approx(math.sqrt(grid.length))
        assert np.max(np.abs(spec[1:])) < 1e-12

    def test_gaussian_derivative(self, grid):
        x = np.asarray(grid.x)
        field = ComplexField(grid, np.exp(-x ** 2))
        d1 = spectral_derivative(field, 1).samples
        d2 = spectral_derivative(field, 2).samples
        assert np.max(np.abs(d1 - (-2 * x * np.exp(-x ** 2)))) < 1e-10
        assert np.max(np.abs(d2 - (4 * x ** 2 - 2) * np.exp(-x ** 2))) < 1e-9

    def test_real_derivative_is_real(self, grid):
        field = ComplexField(grid, np.sin(2 * math.pi * 3 * np.asarray(grid.x) / grid.length))
        assert not np.iscomplexobj(spectral_derivative(field, 1).samples)

    def test_plane_wave_derivative(self, grid):
        k = grid.frequency(5)
        field = ComplexField(grid, np.exp(1j * k * np.asarray(grid.x)))
        assert np.max(np.abs(spectral_derivative(field, 1).samples - 1j * k * field.samples)) < 1e-11

    def test_nyquist_dropped_for_odd_orders(self, grid):
        field = ComplexField(grid, np.cos(math.pi * np.arange(grid.n_points)))
        assert np.max(np.abs(spectral_derivative(field, 1).samples)) < 1e-12

    @pytest.mark.parametrize("order", [0, -1, 1.5, True])
    def test_invalid_order(self, grid, order):
        with pytest.raises(DomainError):
            spectral_derivative(ComplexField.constant(grid), order)


# ============================================================
# Sobolev 范数
# ============================================================

class TestSobolevNorms:
    """H^s 与齐次范数"""

    @given(seed=seed_strategy, s1=sobolev_strategy, s2=sobolev_strategy)
    @settings(max_examples=40, deadline=None)
    def test_monotone_in_index(self, seed, s1, s2):
        grid = Grid1D(20.0, 64)
        field = _random_field(grid, seed)
        lo, hi = sorted((s1, s2))
        assert h_s_norm(field, lo) <= h_s_norm(field, hi) * (1 + 1e-12)

    @given(seed=seed_strategy, s=sobolev_strategy)
    @settings(max_examples=40, deadline=None)
    def test_inner_product_cauchy_schwarz(self, seed, s):
        grid = Grid1D(20.0, 64)
        f = _random_field(grid, seed)
        g = _random_field(grid, seed + 1)
        assert abs(h_s_inner(f, g, s)) <= h_s_norm(f, s) * h_s_norm(g, s) * (1 + 1e-12)
        assert h_s_inner(f, f, s).real == pytest.approx(h_s_norm(f, s) ** 2, rel=1e-12)

    def test_l2_at_zero(self, grid, rng):
        field = ComplexField(grid, rng.standard_normal(grid.n_points))
        assert rel_error(h_s_norm(field, 0.0), l2_norm(field)) < 1e-12

    @pytest.mark.parametrize("s", [-0.5, 0.0, 0.75, 2.0])
    def test_constant_norm(self, grid, s):
        assert h_s_norm(ComplexField.constant(grid), s) == pytest.approx(math.sqrt(grid.length), rel=1e-12)

    @pytest.mark.parametrize("s", [0.0, 1.0, 1.5])
    def test_plane_wave_norm(self, grid, s):
        k = grid.frequency(3)
        field = ComplexField(grid, np.exp(1j * k * np.asarray(grid.x)))
        expected = math.sqrt((1 + k * k) ** s * grid.length)
        assert h_s_norm(field, s) == pytest.approx(expected, rel=1e-12)

    def test_homogeneous_ignores_mean(self, grid):
        assert hdot_s_norm(ComplexField.constant(grid, 3.0), 1.0) < 1e-12

    def test_non_finite_index(self, grid):
        with pytest.raises(DomainError):
            h_s_norm(ComplexField.constant(grid), math.nan)


# ============================================================
# 去混叠乘积
# ============================================================

class TestDealiasedProduct:
    """3/2 补零乘积"""

    def test_resolved_product_is_exact(self, grid):
        x = np.asarray(grid.x)
        a = np.cos(grid.frequency(3) * x)
        b = np.sin(grid.frequency(5) * x)
        out = dealiased_product(a, b)
        assert not np.iscomplexobj(out)
        assert np.max(np.abs(out - a * b)) < 1e-12

    def test_aliased_modes_are_removed(self, grid):
        m = grid.n_points // 4 + 4
        wave = np.exp(1j * grid.frequency(m) * np.asarray(grid.x))
        assert np.max(np.abs(wave * wave)) == pytest.approx(1.0)
        assert np.max(np.abs(dealiased_product(wave, wave))) < 1e-12


# ============================================================
# 球上 W^{s,2} 范数
# ============================================================

class TestBallNorms:
    """球上求积单元与 Sobolev-Slobodeckij 范数"""

    def test_cells_cover_ball(self, grid):
        idx, offsets, weights = ball_cells(grid, Ball(0.0, 2.5))
        assert idx.size == 33
        assert offsets[0] == pytest.approx(-2.5) and offsets[-1] == pytest.approx(2.5)
        assert weights[0] == pytest.approx(0.5 * grid.spacing)
        assert math.fsum(weights) == pytest.approx(5.0)
        assert np.all(np.diff(offsets) > 0)

    def test_cells_clip_off_grid_radius(self, grid):
        _, _, weights = ball_cells(grid, Ball(0.0, 1.0))
        assert math.fsum(weights) == pytest.approx(2.0)
        assert np.all(weights <= grid.spacing + 1e-15)

    def test_wrapped_ball(self, grid):
        idx, offsets, weights = ball_cells(grid, Ball(-20.0, 2.5))
        assert idx.size == 33
        assert math.fsum(weights) == pytest.approx(5.0)
        assert np.all(np.diff(offsets) > 0)

    def test_whole_period(self, grid):
        _, _, weights = ball_cells(grid, Ball(0.0, 20.0))
        assert weights.size == grid.n_points
        assert np.all(weights == grid.spacing)

    def test_ball_too_large(self, grid):
        with pytest.raises(DomainError):
            ball_cells(grid, Ball(0.0, 25.0))

    @pytest.mark.parametrize("radius", [0.0, -1.0, math.inf])
    def test_invalid_radius(self, radius):
        with pytest.raises(DomainError):
            Ball(0.0, radius)

    def test_constant_l2_on_ball(self, grid):
        assert w_s2_ball_norm(ComplexField.constant(grid), Ball(0.0, 2.5), 0.0) == pytest.approx(math.sqrt(5.0))

    def test_integer_index_is_derivative_sum(self, grid):
        x = np.asarray(grid.x)
        field = ComplexField(grid, np.exp(-x ** 2 / 2.0))
        ball = Ball(0.0, 2.5)
        idx, _, weights = ball_cells(grid, ball)
        deriv = spectral_derivative(field, 1).samples
        expected = np.sum(weights * (field.samples[idx] ** 2 + deriv[idx] ** 2))
        assert w_s2_ball_norm(field, ball, 1.0) ** 2 == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("n_points", [256, 1024])
    @pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
    def test_fractional_norm_of_linear_function(self, n_points, s):
        # f = x on (-1, 1): ||f||^2 = 2/3 + int int |x - y|^(1 - 2s) dx dy
        grid = Grid1D(40.0, n_points)
        p = 1.0 - 2.0 * s
        exact = math.sqrt(2.0 / 3.0 + 2.0 * 2.0 ** (p + 2.0) / ((p + 1.0) * (p + 2.0)))
        value = w_s2_ball_norm(ComplexField(grid, np.asarray(grid.x)), Ball(0.0, 1.0), s)
        assert rel_error(value, exact) < 1e-2

    def test_fractional_norm_of_quadratic_matches_dense_grid(self):
        # g = x^2 on (-1, 1), s = 1/2: the 4x denser grid is the reference
        def norm(n_points):
            grid = Grid1D(40.0, n_points)
            return w_s2_ball_norm(ComplexField(grid, np.asarray(grid.x) ** 2), Ball(0.0, 1.0), 0.5)

        assert rel_error(norm(256), norm(1024)) < 1e-2

    @pytest.mark.parametrize("s", [0.5, 0.75, 1.25])
    def test_batched_quadrature_matches_pairwise(self, grid, rng, s):
        field = ComplexField(grid, random_probe_field(grid, 1.0, rng) + 1j * random_probe_field(grid, 1.0, rng))
        ball = Ball(1.0, 3.0)
        quad = BallQuadrature(grid, ball, s)
        batched = quad.sq_norm(quad.restrict(field.samples))[0]
        assert rel_error(batched, w_s2_ball_norm(field, ball, s) ** 2) < 1e-10

    def test_split_index(self):
        assert split_index(1.0) == (1, 0.0)
        assert split_index(1.5) == (1, 0.5)
        assert split_index(2.0 - 1e-14) == (2, 0.0)
        with pytest.raises(DomainError):
            split_index(-0.5)


# ============================================================
# 分块范数等价探针
# ============================================================

class TestPartitionProbe:
    """平铺球 (R/2) 与覆盖球 (R) 的求和"""

    @pytest.mark.parametrize("s", [0.0, 1.0])
    def test_tiling_is_exact_for_integer_index(self, grid, rng, s):
        field = ComplexField(grid, random_probe_field(grid, 1.0, rng))
        report = partition_norm_equivalence_probe(field, s, 5.0)
        assert not report.degenerate
        assert report.lower_ratio == pytest.approx(1.0, abs=1e-9)
        assert report.upper_ratio == pytest.approx(0.5, abs=1e-9)

    def test_fractional_index_is_finite(self, grid, rng):
        field = ComplexField(grid, random_probe_field(grid, 1.0, rng))
        report = partition_norm_equivalence_probe(field, 0.5, 5.0)
        assert math.isfinite(report.lower_ratio) and report.lower_ratio > 0
        assert math.isfinite(report.upper_ratio) and report.upper_ratio > 0

    def test_centers(self, grid):
        centers = partition_centers(grid, 5.0)
        assert centers.shape == (8,)
        assert centers[0] == pytest.approx(-20.0)

    def test_radius_must_divide_length(self, grid):
        with pytest.raises(DomainError):
            partition_centers(grid, 3.0)
