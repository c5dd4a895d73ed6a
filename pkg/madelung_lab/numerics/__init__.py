"""
数值核心

- spectral_core: 周期网格、DFT、Sobolev 范数、球上 W^{s,2} 范数
- littlewood_paley: 二进分解、Besov 范数、Bony 分解
- madelung: Madelung 变换及其逆
- energy_vacuum: 能量、q_delta 极小元、无真空阈值
- metrics: d^s / theta^s 度量与探针
- dynamics: GP 与流体 GP 时间演化
- initial_conditions: 初值迷你语言与随机场
"""

from .spectral_core import Ball, ComplexField, Grid1D, h_s_norm
from .madelung import HydroState, madelung_forward, madelung_inverse
from .energy_vacuum import b_tilde, delta_tilde, energy_Es, minimizer_q_delta
from .metrics import metric_ds, metric_theta
from .dynamics import SimConfig, evolve_gp, evolve_hgp
from .initial_conditions import parse_init

__all__ = [
    "Ball",
    "ComplexField",
    "Grid1D",
    "h_s_norm",
    "HydroState",
    "madelung_forward",
    "madelung_inverse",
    "b_tilde",
    "delta_tilde",
    "energy_Es",
    "minimizer_q_delta",
    "metric_ds",
    "metric_theta",
    "SimConfig",
    "evolve_gp",
    "evolve_hgp",
    "parse_init",
]
