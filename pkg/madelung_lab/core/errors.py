"""异常体系

配置错误与数值错误使用不同的退出码：
- 1: 断言未通过（不是异常，由报告决定）
- 2: 配置 / 参数错误
- 3: 数值错误（真空、爆破、稳定性、周期性）
"""

from __future__ import annotations

from typing import Any, Dict, Optional


EXIT_OK = 0
EXIT_ASSERTION_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERIC_ERROR = 3


class LabError(Exception):
    """所有实验室异常的基类"""

    exit_code: int = EXIT_NUMERIC_ERROR

    def details(self) -> Dict[str, Any]:
        """可序列化的附加信息（写入 error.json）"""
        return {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": str(self),
            "exit_code": self.exit_code,
            **self.details(),
        }


class ConfigError(LabError, ValueError):
    """实验配置无效"""

    exit_code = EXIT_CONFIG_ERROR


class InvalidGridError(ConfigError):
    """网格参数无效或两个场不在同一网格上"""


class DomainError(LabError, ValueError):
    """参数超出函数定义域"""

    exit_code = EXIT_CONFIG_ERROR


class DyadicIndexError(DomainError, IndexError):
    """二进块下标越界"""


class NumericError(LabError, ArithmeticError):
    """非有限数值"""

    exit_code = EXIT_NUMERIC_ERROR


class VacuumError(NumericError):
    """|q| 或 ρ 触及真空下界"""

    def __init__(self, message: str, location: Optional[float] = None, value: Optional[float] = None):
        super().__init__(message)
        self.location = location
        self.value = value

    def details(self) -> Dict[str, Any]:
        return {"location": self.location, "value": self.value}


class VacuumBreachError(VacuumError):
    """演化过程中密度低于 rho_floor"""

    def __init__(self, message: str, location: Optional[float] = None,
                 value: Optional[float] = None, time: Optional[float] = None):
        super().__init__(message, location=location, value=value)
        self.time = time

    def details(self) -> Dict[str, Any]:
        return {**super().details(), "time": self.time}


class BlowUpError(NumericError):
    """时间推进中出现 NaN / Inf"""

    def __init__(self, message: str, time: Optional[float] = None):
        super().__init__(message)
        self.time = time

    def details(self) -> Dict[str, Any]:
        return {"time": self.time}


class StabilityError(NumericError):
    """时间步长超过显式格式的稳定性上界"""

    def __init__(self, message: str, dt: Optional[float] = None, bound: Optional[float] = None):
        super().__init__(message)
        self.dt = dt
        self.bound = bound

    def details(self) -> Dict[str, Any]:
        return {"dt": self.dt, "bound": self.bound}


class PeriodicityError(NumericError):
    """速度均值过大，重建相位在周期边界不连续"""

    def __init__(self, message: str, mean_velocity: Optional[float] = None):
        super().__init__(message)
        self.mean_velocity = mean_velocity

    def details(self) -> Dict[str, Any]:
        return {"mean_velocity": self.mean_velocity}
