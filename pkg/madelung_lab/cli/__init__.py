"""Madelung Lab CLI - 命令行接口

- common.py: 共享参数与运行逻辑
- energy.py: 能量命令（energy, soliton-energy, vacuum-sweep）
- metric.py: 度量命令（metric, bilipschitz）
- simulate.py: 时间演化命令（simulate-gp, simulate-hgp, conjugation）
- verify.py: 验证命令（verify-lp, verify-products）
- experiment.py: 实验执行命令（run-experiment, acceptance）
"""

from __future__ import annotations

import argparse

from dotenv import load_dotenv

from .energy import register_energy_parsers
from .metric import register_metric_parsers
from .simulate import register_simulate_parsers
from .verify import register_verify_parsers
from .experiment import register_experiment_parsers


def main() -> None:
	"""CLI 主入口"""
	load_dotenv()

	parser = argparse.ArgumentParser(description="Madelung Lab: 1D Gross-Pitaevskii / hydrodynamic GP numerics")
	subparsers = parser.add_subparsers(dest="command", help="Available commands")

	# 注册所有命令的参数解析器
	register_energy_parsers(subparsers)
	register_metric_parsers(subparsers)
	register_simulate_parsers(subparsers)
	register_verify_parsers(subparsers)
	register_experiment_parsers(subparsers)

	# 解析参数并执行命令
	args = parser.parse_args()

	if hasattr(args, 'func'):
		args.func(args)
	else:
		parser.print_help()


if __name__ == "__main__":
	main()
