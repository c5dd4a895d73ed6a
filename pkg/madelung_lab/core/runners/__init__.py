"""
实验执行器模块

每个命令对应一个执行器：
- 能量与真空阈值 (energy / soliton-energy / vacuum-sweep)
- 度量 (metric / bilipschitz)
- 时间演化 (simulate-gp / simulate-hgp / conjugation)
- 调和分析验证 (verify-lp / verify-products)
- 验收套件 (acceptance)
"""

from .base_runner import BaseExperimentRunner
from .energy_runner import EnergyRunner
from .metric_runner import MetricRunner
from .simulation_runner import SimulationRunner
from .verification_runner import VerificationRunner
from .acceptance_runner import AcceptanceRunner

RUNNERS = {
    "energy": EnergyRunner,
    "soliton-energy": EnergyRunner,
    "vacuum-sweep": EnergyRunner,
    "metric": MetricRunner,
    "bilipschitz": MetricRunner,
    "simulate-gp": SimulationRunner,
    "simulate-hgp": SimulationRunner,
    "conjugation": SimulationRunner,
    "verify-lp": VerificationRunner,
    "verify-products": VerificationRunner,
    "acceptance": AcceptanceRunner,
}

__all__ = [
    "BaseExperimentRunner",
    "EnergyRunner",
    "MetricRunner",
    "SimulationRunner",
    "VerificationRunner",
    "AcceptanceRunner",
    "RUNNERS",
]
