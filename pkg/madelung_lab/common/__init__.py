"""
通用工具模块

- 工具函数（JSON 规范化、摘要、FFT 线程数）
- 数据IO操作（快照、轨迹、报告；从 common.data_io 导入）
"""

from .utils import canonical_json, digest, to_jsonable

__all__ = [
    "canonical_json",
    "digest",
    "to_jsonable",
]
