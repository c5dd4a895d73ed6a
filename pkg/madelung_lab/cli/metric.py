"""度量命令（metric / bilipschitz）"""

from __future__ import annotations

from .common import add_common_arguments, run_experiment


def cmd_metric(args) -> None:
	"""d^s, d_tilde^s and theta^s between two initial conditions."""
	run_experiment("metric", args)


def cmd_bilipschitz(args) -> None:
	run_experiment("bilipschitz", args)


def register_metric_parsers(subparsers):
	"""注册度量命令的参数解析器"""
	metric_parser = subparsers.add_parser("metric", help="Distance between two fields")
	add_common_arguments(metric_parser)
	metric_parser.add_argument("--left", type=str, default=None, help="First field spec")
	metric_parser.add_argument("--right", type=str, default=None, help="Second field spec")
	metric_parser.add_argument("--y_stride", type=int, default=None, help="Use every k-th grid node in the y-integral")
	metric_parser.add_argument("--radius", type=float, default=None, help="Ball radius for per-ball distances")
	metric_parser.set_defaults(func=cmd_metric)

	bilip_parser = subparsers.add_parser("bilipschitz", help="theta^s / d^s ratio probe")
	add_common_arguments(bilip_parser)
	bilip_parser.add_argument("--samples", type=int, default=None, help="Number of random pairs")
	bilip_parser.add_argument("--energy_cap", type=float, default=None, help="Reject pairs with E >= cap")
	bilip_parser.add_argument("--y_stride", type=int, default=None, help="Use every k-th grid node in the y-integral")
	bilip_parser.set_defaults(func=cmd_bilipschitz)
