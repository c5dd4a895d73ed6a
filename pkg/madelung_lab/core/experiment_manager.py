"""实验管理器 - 统一实验配置和执行"""

from __future__ import annotations

import os
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml
from easydict import EasyDict

from ..common.data_io import DataWriter
from ..fs.base import FSConfig
from ..fs.local import LocalFileSystem
from .errors import ConfigError, LabError
from .logging import cleanup_logging, setup_logging
from .reports import RunReport


COMMANDS = (
    "energy", "metric", "simulate-gp", "simulate-hgp", "conjugation", "vacuum-sweep",
    "verify-lp", "verify-products", "bilipschitz", "soliton-energy", "acceptance",
)

COMMON_DEFAULTS: Dict[str, Any] = {
    "L": 60.0,
    "N": 1024,
    "s": 1.0,
    "seed": 0,
    "output_dir": "./outputs/{command}/{timestamp}",
    "log_dir": "./logs",
    "log_level": "INFO",
    "experiment_name": None,
    "fault": None,
    "quick": False,
}

COMMAND_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "energy": {"init": "qdelta:0.5", "mu": None, "N": 4096},
    "soliton-energy": {"delta": 0.5, "N": 4096},
    "vacuum-sweep": {"deltas": [0.1, 0.25, 0.5, 0.75, 0.9], "N": 4096, "sweep_points": 1000},
    "metric": {"left": "one", "right": "qdelta:0.5", "L": 40.0, "N": 512, "y_stride": 1, "radius": None},
    "bilipschitz": {"samples": 100, "energy_cap": 1.2, "L": 40.0, "N": 256, "y_stride": 2},
    "simulate-gp": {"init": "qdelta:0.5", "dt": 1e-3, "T": 1.0, "N": 2048, "snapshot_stride": 100,
                    "margin": 0.01},
    "simulate-hgp": {"init": "qdelta:0.5", "dt": "auto", "T": 0.5, "N": 1024, "snapshot_stride": 1000,
                     "rho_floor": 1e-6, "dealias": True},
    "conjugation": {"init": "qdelta:0.5", "dt": "auto", "T": 0.5, "N": 2048, "snapshot_stride": 1000,
                    "levels": [512, 1024, 2048], "rho_floor": 1e-6, "dealias": True},
    "verify-lp": {"L": 40.0, "N": 512, "s_list": [0.75, 1.0, 1.5], "samples": 20},
    "verify-products": {"L": 40.0, "N": 512, "s_list": [0.75, 1.0, 1.5], "samples": 50},
    "acceptance": {},
}

FLOAT_KEYS = {"L", "s", "mu", "delta", "T", "rho_floor", "energy_cap", "radius", "margin"}
INT_KEYS = {"N", "seed", "samples", "snapshot_stride", "y_stride", "sweep_points"}
BOOL_KEYS = {"dealias", "quick"}
FLOAT_LIST_KEYS = {"deltas", "s_list"}
INT_LIST_KEYS = {"levels"}
INIT_KEYS = {"init", "left", "right"}
FAULTS = ("no-dealias", "drop-half-step")

# s 的可行域 (下界, 是否包含下界)
S_RANGES: Dict[str, tuple] = {
    "energy": (0.5, False),
    "metric": (0.5, False),
    "bilipschitz": (1.0, True),
    "conjugation": (1.0, True),
    "verify-products": (0.5, False),
}


def parse_key_value_file(path: str) -> Dict[str, str]:
    """加载 key=value 配置文件（兼容 export 前缀和引号）"""
    values: Dict[str, str] = {}
    with open(path, 'r', encoding='utf-8') as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            if line.startswith('export '):
                line = line[7:]
            if '=' not in line:
                raise ConfigError(f"{path}:{lineno}: 缺少 '=': {line!r}")
            key, value = line.split('=', 1)
            value = value.split(' #', 1)[0].strip()
            values[key.strip()] = value.strip('"\'')
    return values


def load_config_file(path: str) -> Dict[str, Any]:
    """读取实验配置文件: .yaml/.yml 用 PyYAML (展开一层), 其余按 key=value"""
    if not os.path.exists(path):
        raise ConfigError(f"配置文件不存在: {path}")
    if Path(path).suffix in (".yaml", ".yml"):
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: YAML 顶层必须是映射")
        flat: Dict[str, Any] = {}
        for key, value in data.items():
            if isinstance(value, dict):
                flat.update(value)
            else:
                flat[key] = value
        return flat
    return parse_key_value_file(path)


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _coerce(key: str, value: Any) -> Any:
    if value is None:
        return None
    try:
        if key in FLOAT_KEYS:
            if isinstance(value, str) and value.strip().lower() in ("", "none", "null"):
                return None
            return float(value)
        if key in INT_KEYS:
            as_float = float(value)
            if as_float != int(as_float):
                raise ValueError(value)
            return int(as_float)
        if key in BOOL_KEYS:
            if isinstance(value, bool):
                return value
            text = str(value).strip().lower()
            if text in ("1", "true", "yes", "on"):
                return True
            if text in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if key in FLOAT_LIST_KEYS or key in INT_LIST_KEYS:
            cast = float if key in FLOAT_LIST_KEYS else int
            items = value if isinstance(value, (list, tuple)) else str(value).split(",")
            return [cast(float(v)) if cast is int else cast(v) for v in items if str(v).strip()]
        if key == "dt":
            if isinstance(value, str) and value.strip().lower() == "auto":
                return "auto"
            return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"配置项 {key} 的值无效: {value!r}") from None
    return value


def build_config(command: str, file_values: Optional[Mapping[str, Any]] = None,
                 overrides: Optional[Mapping[str, Any]] = None) -> EasyDict:
    """默认值 < 配置文件 < 命令行参数"""
    file_values = dict(file_values or {})
    command = file_values.pop("command", None) if command is None else command
    if command not in COMMANDS:
        raise ConfigError(f"未知命令: {command!r}; 可选: {', '.join(COMMANDS)}")
    merged: Dict[str, Any] = {**COMMON_DEFAULTS, **COMMAND_DEFAULTS[command]}
    merged.update(file_values)
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    merged.pop("command", None)
    config = {key: _coerce(key, value) for key, value in merged.items()}
    config["command"] = command
    validate_config(config)
    return EasyDict(config)


def validate_config(config: Mapping[str, Any]) -> None:
    command = config["command"]
    n = config.get("N")
    if not isinstance(n, int) or not _is_power_of_two(n) or n < 16:
        raise ConfigError(f"N 必须是 >= 16 的 2 的幂, 实际为 {n}")
    if not config.get("L") or config["L"] <= 0:
        raise ConfigError(f"L 必须为正, 实际为 {config.get('L')}")
    if command in S_RANGES:
        low, inclusive = S_RANGES[command]
        s = config["s"]
        if s < low or (s == low and not inclusive):
            bound = f">= {low}" if inclusive else f"> {low}"
            raise ConfigError(f"命令 {command} 需要 s {bound}, 实际为 {s}")
    mu = config.get("mu")
    if mu is not None and not 0.5 < mu < 1.0:
        raise ConfigError(f"mu 必须在 (1/2, 1) 内, 实际为 {mu}")
    dt = config.get("dt")
    if dt is not None and dt != "auto" and not dt > 0:
        raise ConfigError(f"dt 必须为正或 auto, 实际为 {dt}")
    if config.get("fault") is not None and config["fault"] not in FAULTS:
        raise ConfigError(f"未知 fault: {config['fault']!r}")
    for key in ("T", "rho_floor", "energy_cap", "radius"):
        value = config.get(key)
        if value is not None and value < 0:
            raise ConfigError(f"{key} 不能为负: {value}")
    for key in ("samples", "snapshot_stride", "y_stride", "sweep_points"):
        value = config.get(key)
        if value is not None and value < 1:
            raise ConfigError(f"{key} 必须 >= 1: {value}")
    for key in INIT_KEYS:
        spec = config.get(key)
        if spec is None:
            continue
        head, _, rest = str(spec).partition(":")
        if head not in ("one", "qdelta", "plane", "file", "perturb"):
            raise ConfigError(f"{key}={spec!r}: 未知初值类型")
        if head == "file" and not os.path.exists(rest):
            raise ConfigError(f"{key}={spec!r}: 文件不存在")


class ExperimentManager:
    """实验管理器"""

    def __init__(self, config: EasyDict):
        self.config = config
        self.output_dir = self._resolve_output_dir()
        self.fs_cfg = FSConfig(root=self.output_dir)
        self.writer = DataWriter(LocalFileSystem(self.fs_cfg))

    @classmethod
    def from_sources(cls, command: Optional[str], config_path: Optional[str] = None,
                     overrides: Optional[Mapping[str, Any]] = None) -> "ExperimentManager":
        file_values = load_config_file(config_path) if config_path else {}
        return cls(build_config(command, file_values, overrides))

    @property
    def experiment_name(self) -> str:
        return self.config.get("experiment_name") or self.config.command.replace("-", "_")

    def _resolve_output_dir(self) -> str:
        """解析输出目录, 支持 {timestamp} 和 {command} 占位符"""
        replacements = {
            "{timestamp}": datetime.now().strftime("%Y%m%d_%H%M%S"),
            "{command}": self.config.command,
        }
        path = str(self.config.output_dir)
        for key, value in replacements.items():
            path = path.replace(key, value)
        return path

    def _create_runner(self, logger):
        from .runners import RUNNERS

        runner_cls = RUNNERS[self.config.command]
        return runner_cls(config=self.config, logger=logger, fs_cfg=self.fs_cfg, writer=self.writer)

    def write_report(self, report: RunReport) -> None:
        self.writer.write_json("report.json", report.to_dict())
        self.writer.fs.write_atomic("payload.json", (report.payload_text() + "\n").encode("utf-8"))

    def write_error(self, exc: LabError) -> None:
        self.writer.write_json("error.json", exc.to_dict())

    def run(self, console: bool = True) -> RunReport:
        """运行实验, 写出 report.json / payload.json"""
        logger = setup_logging(
            experiment_name=self.experiment_name,
            log_dir=self.config.log_dir,
            log_level=self.config.log_level,
            console=console,
        )
        try:
            logger.info(f"📋 命令: {self.config.command}")
            logger.info(f"📁 输出目录: {self.output_dir}")
            runner = self._create_runner(logger)
            report = runner.run()
            report.stop_clock()
            self.write_report(report)
            for assertion in report.assertions:
                logger.log_check(assertion.name, assertion.passed,
                                 f"value={assertion.value} {assertion.comparison} {assertion.threshold}")
            if report.passed:
                logger.info(f"🎉 实验 {self.experiment_name} 完成, 全部断言通过")
            else:
                logger.warning(f"⚠️ 未通过的断言: {', '.join(report.failures)}")
            return report
        except LabError as exc:
            logger.error(f"❌ {type(exc).__name__}: {exc}", exc_info=True)
            self.write_error(exc)
            raise
        finally:
            cleanup_logging()

    def print_config_summary(self) -> None:
        """打印配置摘要"""
        c = self.config
        print(f"\n📋 实验配置摘要:")
        print(f"   命令: {c.command}")
        print(f"   网格: L={c.L}, N={c.N}")
        print(f"   Sobolev 指数: s={c.s}")
        print(f"   随机种子: {c.seed}")
        for key in ("init", "left", "right", "delta", "dt", "T", "samples", "energy_cap"):
            if c.get(key) is not None:
                print(f"   {key}: {c[key]}")
        if c.get("fault"):
            print(f"   注入故障: {c.fault}")
        print(f"   输出目录: {self.output_dir}")


def load_experiment_manager(config_path: str, overrides: Optional[Mapping[str, Any]] = None) -> ExperimentManager:
    """从配置文件加载实验管理器 (command 取自文件)"""
    return ExperimentManager.from_sources(None, config_path, overrides)
