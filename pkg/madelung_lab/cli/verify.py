"""调和分析验证命令（verify-lp / verify-products）"""

from __future__ import annotations

from .common import add_common_arguments, run_experiment


def cmd_verify_lp(args) -> None:
	run_experiment("verify-lp", args)


def cmd_verify_products(args) -> None:
	run_experiment("verify-products", args)


def register_verify_parsers(subparsers):
	"""注册验证命令的参数解析器"""
	for name, func, help_text in (
		("verify-lp", cmd_verify_lp, "Partition of unity, block and Bony reconstruction"),
		("verify-products", cmd_verify_products, "Product and phase-exponential estimate probes"),
	):
		parser = subparsers.add_parser(name, help=help_text)
		add_common_arguments(parser)
		parser.add_argument("--samples", type=int, default=None, help="Random samples per probe")
		parser.add_argument("--s_list", type=str, default=None, help="Comma separated Sobolev indices")
		parser.set_defaults(func=func)
