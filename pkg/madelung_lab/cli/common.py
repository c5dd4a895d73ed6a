"""CLI 共享工具函数"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Dict, Optional

from ..core.errors import EXIT_ASSERTION_FAILED, EXIT_OK, LabError


# 可由命令行覆盖的配置键（与实验配置键同名）
OVERRIDE_KEYS = (
	"L", "N", "s", "seed", "output_dir", "log_dir", "log_level", "experiment_name", "fault", "quick",
	"init", "mu", "delta", "deltas", "sweep_points", "left", "right", "y_stride", "radius",
	"samples", "energy_cap", "dt", "T", "snapshot_stride", "margin", "rho_floor", "dealias",
	"levels", "s_list",
)


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
	"""所有实验命令共享的参数"""
	parser.add_argument("--config", type=str, default=None, help="key=value or YAML config file; flags override it")
	parser.add_argument("--L", type=float, default=None, help="Box length")
	parser.add_argument("--N", type=int, default=None, help="Grid points (power of two)")
	parser.add_argument("--s", type=float, default=None, help="Sobolev index")
	parser.add_argument("--seed", type=int, default=None, help="Random seed")
	parser.add_argument("--output_dir", type=str, default=None, help="Output directory ({command}/{timestamp} placeholders)")
	parser.add_argument("--log_dir", type=str, default=None, help="Log directory")
	parser.add_argument("--log_level", type=str, default=None, help="DEBUG / INFO / WARNING / ERROR")
	parser.add_argument("--experiment_name", type=str, default=None, help="Name used for log files")
	# 反例对照用, 不在帮助中显示
	parser.add_argument("--fault", type=str, default=None, help=argparse.SUPPRESS)


def add_simulation_arguments(parser: argparse.ArgumentParser) -> None:
	parser.add_argument("--init", type=str, default=None, help="one | qdelta:<d> | plane:<k> | file:<path> | perturb:<amp>:<seed>")
	parser.add_argument("--dt", type=str, default=None, help="Time step or 'auto'")
	parser.add_argument("--T", type=float, default=None, help="Final time")
	parser.add_argument("--snapshot_stride", type=int, default=None, help="Steps between snapshots")
	parser.add_argument("--rho_floor", type=float, default=None, help="hGP density floor")
	parser.add_argument("--no_dealias", dest="dealias", action="store_const", const=False, default=None,
						help="Disable 3/2 dealiasing of hGP products")


def collect_overrides(args: argparse.Namespace) -> Dict[str, Any]:
	"""从命令行参数中取出显式给出的配置项"""
	return {key: getattr(args, key) for key in OVERRIDE_KEYS if getattr(args, key, None) is not None}


def run_experiment(command: Optional[str], args: argparse.Namespace) -> None:
	"""构建配置并运行; 退出码: 0 通过, 1 断言失败, 2 配置错误, 3 数值错误"""
	from ..core.experiment_manager import ExperimentManager

	try:
		manager = ExperimentManager.from_sources(command, getattr(args, "config", None), collect_overrides(args))
		manager.print_config_summary()
		report = manager.run()
	except LabError as exc:
		print(json.dumps(exc.to_dict(), ensure_ascii=False, default=str), file=sys.stderr)
		sys.exit(exc.exit_code)

	status = "PASS" if report.passed else "FAIL"
	print(f"\n{status}: {len(report.assertions) - len(report.failures)}/{len(report.assertions)} assertions, "
		  f"report -> {manager.output_dir}/report.json")
	if not report.passed:
		print(f"Failed: {', '.join(report.failures)}", file=sys.stderr)
		sys.exit(EXIT_ASSERTION_FAILED)
	sys.exit(EXIT_OK)
