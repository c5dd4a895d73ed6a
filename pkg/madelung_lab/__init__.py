"""
Madelung Lab - 一维 Gross-Pitaevskii 与流体 GP 数值实验平台

主要模块：
- numerics: 谱方法核心、能量、度量、时间演化、Littlewood-Paley 工具
- core: 异常、日志、报告、实验管理与执行器
- common: 通用工具与数据IO
- fs: 文件系统抽象（原子写）
- cli: 命令行接口
"""

__version__ = "1.0.0"

from .core.errors import LabError
from .core.logging import setup_logging, cleanup_logging, get_logger

__all__ = [
    "LabError",
    "setup_logging",
    "cleanup_logging",
    "get_logger",
]
