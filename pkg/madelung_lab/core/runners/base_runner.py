"""基础实验执行器"""

from contextlib import nullcontext
from typing import Any, Callable, Optional

from ...common.data_io import DataWriter
from ...fs.base import FSConfig
from ...numerics.initial_conditions import parse_init
from ...numerics.spectral_core import ComplexField, Grid1D
from ..reports import RunReport


class BaseExperimentRunner:
    """实验执行器基类"""

    def __init__(self, config: Any, logger: Any, fs_cfg: FSConfig, writer: DataWriter):
        """
        Args:
            config: 实验配置（EasyDict）
            logger: 日志管理器
            fs_cfg: 输出目录配置
            writer: 产物写入器（原子写）
        """
        self.config = config
        self.logger = logger
        self.fs_cfg = fs_cfg
        self.writer = writer

    def run(self) -> RunReport:
        """运行实验（子类实现）"""
        raise NotImplementedError("Subclass must implement run() method")

    def new_report(self) -> RunReport:
        skip = {"output_dir", "log_dir", "log_level", "experiment_name"}
        echo = {k: v for k, v in sorted(self.config.items()) if k not in skip}
        return RunReport(command=self.config.command, config=echo)

    def grid(self, n_points: Optional[int] = None, length: Optional[float] = None) -> Grid1D:
        return Grid1D(float(length if length is not None else self.config.L),
                      int(n_points if n_points is not None else self.config.N))

    def field(self, spec: str, grid: Optional[Grid1D] = None) -> ComplexField:
        return parse_init(spec, grid or self.grid(), s=float(self.config.s))

    def progress(self, name: str, total: int, desc: str) -> Optional[Callable[[int], None]]:
        if self.logger is None:
            return None
        self.logger.create_progress_bar(name, total, desc)
        return self.logger.progress_callback(name)

    def done(self, name: str) -> None:
        if self.logger is not None:
            self.logger.close_progress_bar(name)

    def context(self, name: str):
        if self.logger is None:
            return nullcontext()
        return self.logger.check_context(name)

    def info(self, message: str) -> None:
        if self.logger is not None:
            self.logger.info(message)

    def warning(self, message: str) -> None:
        if self.logger is not None:
            self.logger.warning(message)
