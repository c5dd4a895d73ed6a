"""
Madelung Lab 核心模块

- 异常体系与退出码
- 日志管理系统
- 运行报告
- 实验管理器与执行器（按需从子模块导入）
"""

from .errors import LabError, ConfigError, NumericError
from .logging import setup_logging, cleanup_logging, get_logger

__all__ = [
    "LabError",
    "ConfigError",
    "NumericError",
    "setup_logging",
    "cleanup_logging",
    "get_logger",
]
