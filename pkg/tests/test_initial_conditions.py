"""初值迷你语言与随机生成器测试"""

import math

import numpy as np
import pytest

from madelung_lab.common.data_io import write_snapshot
from madelung_lab.core.errors import ConfigError, DomainError, InvalidGridError
from madelung_lab.numerics.energy_vacuum import minimizer_q_delta
from madelung_lab.numerics.initial_conditions import (
    parse_init,
    random_hydro_state,
    random_pairs,
    random_phases,
    random_vacuum_free_field,
)
from madelung_lab.numerics.madelung import HydroState, madelung_forward
from madelung_lab.numerics.spectral_core import Grid1D


class TestParseInit:
    """one / qdelta / plane / file / perturb"""

    def test_one(self, grid):
        q = parse_init("one", grid)
        assert np.all(q.samples == 1.0)

    def test_qdelta(self, grid):
        q = parse_init("qdelta:0.5", grid)
        assert np.array_equal(q.samples, minimizer_q_delta(0.5, grid).samples)
        assert np.min(np.abs(q.samples)) == pytest.approx(0.5)

    def test_plane(self, grid):
        k = 2 * math.pi * 3 / grid.length
        q = parse_init(f"plane:{k!r}", grid)
        assert np.allclose(np.abs(q.samples), 1.0)
        assert madelung_forward(q).v == pytest.approx(np.full(grid.n_points, k), abs=1e-10)

    def test_non_periodic_plane(self, grid):
        with pytest.raises(DomainError):
            parse_init("plane:1.0", grid)

    @pytest.mark.parametrize("spec", [
        "qdelta:1.5", "qdelta:abc", "qdelta:nan", "perturb:0.1", "perturb:0.1:-1",
        "perturb:0.1:1.5", "bogus", "", "one:extra",
    ])
    def test_malformed(self, grid, spec):
        with pytest.raises(ConfigError):
            parse_init(spec, grid)

    def test_perturb_is_deterministic(self, grid):
        a = parse_init("perturb:0.1:7", grid)
        b = parse_init("perturb:0.1:7", grid)
        c = parse_init("perturb:0.1:8", grid)
        assert np.array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, c.samples)
        assert np.max(np.abs(a.samples - 1.0)) <= 0.1 * math.sqrt(2.0) + 1e-12

    def test_file_round_trip(self, grid, tmp_path, gentle_field):
        path = tmp_path / "q0.csv"
        write_snapshot(str(path), gentle_field)
        q = parse_init(f"file:{path}", grid)
        assert np.array_equal(q.samples, gentle_field.samples)

    def test_file_grid_mismatch(self, grid, tmp_path, gentle_field):
        path = tmp_path / "q0.csv"
        write_snapshot(str(path), gentle_field)
        with pytest.raises(InvalidGridError):
            parse_init(f"file:{path}", Grid1D(40.0, 512))

    def test_state_file_becomes_field(self, grid, tmp_path, gentle_state):
        path = tmp_path / "state.csv"
        write_snapshot(str(path), gentle_state)
        q = parse_init(f"file:{path}", grid)
        assert np.allclose(q.modulus_squared(), gentle_state.rho, rtol=1e-12)


class TestGenerators:
    """探针用的随机生成器"""

    def test_vacuum_free_field(self, grid, rng):
        q = random_vacuum_free_field(grid, rng)
        assert np.min(np.abs(q.samples)) >= 0.7 - 1e-12

    def test_hydro_state(self, grid, rng):
        state = random_hydro_state(grid, rng)
        assert isinstance(state, HydroState)
        assert np.min(state.rho) >= 0.6 - 1e-12
        assert abs(state.mean_velocity) < 1e-12

    def test_pairs_are_reproducible(self, grid):
        first = [(q.samples, p.samples) for q, p in random_pairs(grid, 4, seed=9)]
        second = [(q.samples, p.samples) for q, p in random_pairs(grid, 4, seed=9)]
        assert len(first) == 4
        for (a, b), (c, d) in zip(first, second):
            assert np.array_equal(a, c) and np.array_equal(b, d)

    def test_phases_fixed_amplitude(self, grid):
        phases = list(random_phases(grid, 3, seed=1, amplitude=0.0))
        assert all(np.all(p == 0.0) for p in phases)
