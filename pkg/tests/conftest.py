"""测试共享夹具"""

import numpy as np
import pytest

from madelung_lab.core.logging import cleanup_logging
from madelung_lab.numerics.madelung import HydroState
from madelung_lab.numerics.spectral_core import ComplexField, Grid1D, spectral_derivative


def rel_error(actual: float, expected: float) -> float:
    """相对误差; expected 为 0 时退化为绝对误差"""
    scale = abs(expected)
    return abs(actual - expected) / scale if scale > 0 else abs(actual - expected)


@pytest.fixture
def grid() -> Grid1D:
    """L=40, N=256: h = 0.15625 为二进制精确值"""
    return Grid1D(40.0, 256)


@pytest.fixture
def fine_grid() -> Grid1D:
    return Grid1D(40.0, 512)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def gentle_field(grid) -> ComplexField:
    """宽高斯扰动, 远离真空, 频谱在网格上完全解析"""
    x = np.asarray(grid.x)
    bump = np.exp(-x ** 2 / 8.0)
    return ComplexField(grid, (1.0 + 0.1 * bump) * np.exp(0.3j * bump))


@pytest.fixture
def gentle_state(grid) -> HydroState:
    x = np.asarray(grid.x)
    rho = 1.0 + 0.2 * np.exp(-x ** 2 / 4.0)
    phase = ComplexField(grid, 0.3 * np.exp(-x ** 2 / 4.0))
    v = np.real(spectral_derivative(phase, 1).samples)
    return HydroState(grid, rho, v)


@pytest.fixture(autouse=True)
def _reset_global_logger():
    yield
    cleanup_logging()
