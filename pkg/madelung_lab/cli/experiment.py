"""实验执行命令（run-experiment / acceptance）"""

from __future__ import annotations

from .common import add_common_arguments, run_experiment


def cmd_run_experiment(args) -> None:
	"""Run an experiment described entirely by a config file (the file names the command)."""
	run_experiment(None, args)


def cmd_acceptance(args) -> None:
	"""Run all acceptance criteria and aggregate them into one report."""
	run_experiment("acceptance", args)


def register_experiment_parsers(subparsers):
	"""注册实验执行命令的参数解析器"""
	run_parser = subparsers.add_parser("run-experiment", help="Run an experiment from a config file")
	run_parser.add_argument("config", type=str, help="Config file with a 'command' key")
	run_parser.add_argument("--output_dir", type=str, default=None, help="Override the output directory")
	run_parser.add_argument("--log_level", type=str, default=None, help="Override the log level")
	run_parser.set_defaults(func=cmd_run_experiment)

	acceptance_parser = subparsers.add_parser("acceptance", help="Run the acceptance suite")
	add_common_arguments(acceptance_parser)
	acceptance_parser.add_argument("--quick", action="store_const", const=True, default=None,
								   help="Smaller grids and samples, tolerances x10")
	acceptance_parser.set_defaults(func=cmd_acceptance)
