"""统一日志管理系统"""

import sys
import logging
import time
from datetime import datetime
from pathlib import Path
from typing import Dict, Any, Optional, List
from dataclasses import dataclass, field
from contextlib import contextmanager

import jsonlines
from tqdm import tqdm

from ..common.utils import save_stat_json, to_jsonable
from .errors import ConfigError


@dataclass
class RunStats:
    """运行统计信息"""
    total_checks: int = 0
    processed_checks: int = 0
    passed_checks: int = 0
    failed_checks: int = 0
    accepted_samples: int = 0
    rejected_samples: int = 0
    start_time: float = field(default_factory=time.time)

    @property
    def elapsed_time(self) -> float:
        return time.time() - self.start_time

    @property
    def pass_rate(self) -> float:
        if self.processed_checks == 0:
            return 0.0
        return self.passed_checks / self.processed_checks * 100

    def to_dict(self) -> Dict[str, Any]:
        return {
            "total_checks": self.total_checks,
            "processed_checks": self.processed_checks,
            "passed_checks": self.passed_checks,
            "failed_checks": self.failed_checks,
            "accepted_samples": self.accepted_samples,
            "rejected_samples": self.rejected_samples,
            "elapsed_time": self.elapsed_time,
            "pass_rate": self.pass_rate,
        }


class _ExperimentFilter(logging.Filter):
    def __init__(self, experiment: str):
        super().__init__()
        self.experiment = experiment

    def filter(self, record):
        record.experiment = self.experiment
        return True


class LabLogger:
    """实验日志管理器"""

    def __init__(self,
                 experiment_name: str,
                 log_dir: str = "./logs",
                 log_level: str = "INFO",
                 console: bool = True):

        self.experiment_name = experiment_name

        # 每个实验一个日志子目录
        self.log_dir = Path(log_dir) / experiment_name
        level = getattr(logging, str(log_level).upper(), None)
        if not isinstance(level, int):
            raise ConfigError(f"未知日志级别: {log_level}")
        self.log_level = level
        self.log_dir.mkdir(parents=True, exist_ok=True)

        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        self.log_file = self.log_dir / f"{experiment_name}_{timestamp}.log"

        self.stats = RunStats()
        self.progress_bars: Dict[str, tqdm] = {}

        # 样本日志缓存
        self.sample_logs: List[Dict[str, Any]] = []
        self.batch_size = 100
        self.sample_log_file = self.log_dir / f"{experiment_name}_samples.jsonl"

        self._console = console
        self._setup_logger()

        self.info(f"🚀 实验启动: {experiment_name}")

    def _setup_logger(self):
        self.logger = logging.getLogger(f"madelung_lab.{self.experiment_name}")
        self.logger.setLevel(self.log_level)
        self.logger.propagate = False

        for handler in self.logger.handlers[:]:
            self.logger.removeHandler(handler)
            handler.close()

        file_handler = logging.FileHandler(self.log_file, encoding='utf-8')
        file_handler.setLevel(self.log_level)
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s | %(levelname)s | %(experiment)s | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))
        file_handler.addFilter(_ExperimentFilter(self.experiment_name))
        self.logger.addHandler(file_handler)

        if self._console:
            console_handler = logging.StreamHandler(sys.stdout)
            console_handler.setLevel(self.log_level)
            console_handler.setFormatter(logging.Formatter(
                '%(asctime)s | %(levelname)s | %(message)s',
                datefmt='%H:%M:%S'
            ))
            self.logger.addHandler(console_handler)

        # numerics 模块的 logging.getLogger(__name__) 输出写入同一文件
        package_logger = logging.getLogger("madelung_lab.numerics")
        package_logger.setLevel(self.log_level)
        for handler in package_logger.handlers[:]:
            package_logger.removeHandler(handler)
        package_logger.addHandler(file_handler)

    def debug(self, message: str):
        self.logger.debug(message)

    def info(self, message: str):
        self.logger.info(message)

    def warning(self, message: str):
        self.logger.warning(message)

    def error(self, message: str, exc_info: bool = False):
        self.logger.error(message, exc_info=exc_info)

    def critical(self, message: str):
        self.logger.critical(message)

    def create_progress_bar(self, name: str, total: int, desc: str = None, unit: str = "steps") -> tqdm:
        """创建进度条"""
        bar = tqdm(
            total=total,
            desc=desc or name,
            unit=unit,
            dynamic_ncols=True,
            position=len(self.progress_bars),
            leave=False,
            disable=not self._console,
        )
        self.progress_bars[name] = bar
        return bar

    def update_progress(self, name: str, n: int = 1):
        if name in self.progress_bars:
            self.progress_bars[name].update(n)

    def progress_callback(self, name: str):
        """给 numerics 的 progress 参数用的回调"""
        return lambda n: self.update_progress(name, n)

    def close_progress_bar(self, name: str):
        if name in self.progress_bars:
            self.progress_bars[name].close()
            del self.progress_bars[name]

    def log_sample(self, record: Dict[str, Any]):
        """记录单个探针样本（接受/拒绝/跳过）"""
        self.sample_logs.append({
            "timestamp": datetime.now().isoformat(),
            **to_jsonable(record)
        })
        status = record.get("status")
        if status == "success":
            self.increment_stats(accepted_samples=1)
        elif status == "rejected":
            self.increment_stats(rejected_samples=1)

        if len(self.sample_logs) >= self.batch_size:
            self.flush_sample_logs()

    def flush_sample_logs(self):
        """输出样本日志"""
        if not self.sample_logs:
            return

        total = len(self.sample_logs)
        accepted = sum(1 for r in self.sample_logs if r.get("status") == "success")
        rejected = sum(1 for r in self.sample_logs if r.get("status") == "rejected")
        self.info(f"📊 样本批次: {total} 个, 接受 {accepted}, 拒绝 {rejected}")

        with jsonlines.open(self.sample_log_file, mode='a') as writer:
            writer.write_all(self.sample_logs)

        self.sample_logs.clear()

    def update_stats(self, **kwargs):
        for key, value in kwargs.items():
            if hasattr(self.stats, key):
                setattr(self.stats, key, value)

    def increment_stats(self, **kwargs):
        for key, value in kwargs.items():
            if hasattr(self.stats, key):
                setattr(self.stats, key, getattr(self.stats, key) + value)

    def log_check(self, name: str, passed: bool, detail: str = ""):
        """记录单项断言结果"""
        mark = "✅" if passed else "❌"
        self.info(f"{mark} {name} {detail}".rstrip())
        self.increment_stats(processed_checks=1)
        if passed:
            self.increment_stats(passed_checks=1)
        else:
            self.increment_stats(failed_checks=1)

    def log_periodic_stats(self):
        stats = self.stats.to_dict()

        self.info("=" * 60)
        self.info("📊 当前统计:")
        self.info(f"   断言进度: {stats['processed_checks']}/{stats['total_checks']}")
        self.info(f"   通过率: {stats['pass_rate']:.1f}%")
        self.info(f"   样本: 接受 {stats['accepted_samples']}, 拒绝 {stats['rejected_samples']}")
        self.info(f"   运行时间: {stats['elapsed_time']:.1f} 秒")
        self.info("=" * 60)

    @contextmanager
    def check_context(self, name: str):
        """断言组上下文管理器"""
        start_time = time.time()
        self.info(f"🔬 开始: {name}")

        try:
            yield
            self.info(f"✅ 完成: {name} (用时: {time.time() - start_time:.1f}s)")
        except Exception as e:
            self.error(f"❌ 失败: {name} - {e}")
            raise

    def save_final_stats(self):
        stats_file = self.log_dir / f"{self.experiment_name}_final_stats.json"
        save_stat_json(str(stats_file), {
            "experiment_name": self.experiment_name,
            "completion_time": datetime.now().isoformat(),
            "stats": self.stats.to_dict(),
        })
        self.info(f"📊 最终统计已保存: {stats_file}")

    def finalize(self):
        self.flush_sample_logs()

        for name in list(self.progress_bars.keys()):
            self.close_progress_bar(name)

        self.log_periodic_stats()
        self.save_final_stats()

        self.info(f"🎉 实验结束: {self.experiment_name}")
        self.info(f"📄 日志文件: {self.log_file}")

        for handler in self.logger.handlers[:]:
            self.logger.removeHandler(handler)
            handler.close()
        package_logger = logging.getLogger("madelung_lab.numerics")
        for handler in package_logger.handlers[:]:
            package_logger.removeHandler(handler)


# 全局日志管理器实例
_global_logger: Optional[LabLogger] = None


def get_logger() -> Optional[LabLogger]:
    """获取全局日志管理器"""
    return _global_logger


def setup_logging(experiment_name: str, log_dir: str = "./logs", log_level: str = "INFO",
                  console: bool = True) -> LabLogger:
    """设置全局日志管理器"""
    global _global_logger
    if _global_logger is not None:
        _global_logger.finalize()
    _global_logger = LabLogger(
        experiment_name=experiment_name,
        log_dir=log_dir,
        log_level=log_level,
        console=console,
    )
    return _global_logger


def cleanup_logging():
    """清理日志管理器"""
    global _global_logger
    if _global_logger:
        _global_logger.finalize()
        _global_logger = None
