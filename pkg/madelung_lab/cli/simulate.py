"""时间演化命令（simulate-gp / simulate-hgp / conjugation）"""

from __future__ import annotations

from .common import add_common_arguments, add_simulation_arguments, run_experiment


def cmd_simulate_gp(args) -> None:
	"""Strang split-step evolution of GP."""
	run_experiment("simulate-gp", args)


def cmd_simulate_hgp(args) -> None:
	"""RK4 pseudo-spectral evolution of the hydrodynamic system."""
	run_experiment("simulate-hgp", args)


def cmd_conjugation(args) -> None:
	run_experiment("conjugation", args)


def register_simulate_parsers(subparsers):
	"""注册时间演化命令的参数解析器"""
	gp_parser = subparsers.add_parser("simulate-gp", help="Evolve GP with Strang splitting")
	add_common_arguments(gp_parser)
	add_simulation_arguments(gp_parser)
	gp_parser.add_argument("--margin", type=float, default=None, help="b = E(q0) + margin for the vacuum certificate")
	gp_parser.set_defaults(func=cmd_simulate_gp)

	hgp_parser = subparsers.add_parser("simulate-hgp", help="Evolve hGP with RK4")
	add_common_arguments(hgp_parser)
	add_simulation_arguments(hgp_parser)
	hgp_parser.set_defaults(func=cmd_simulate_hgp)

	conj_parser = subparsers.add_parser("conjugation", help="GP vs hGP through the Madelung transform")
	add_common_arguments(conj_parser)
	add_simulation_arguments(conj_parser)
	conj_parser.add_argument("--levels", type=str, default=None, help="Comma separated N for the refinement study")
	conj_parser.add_argument("--quick", action="store_const", const=True, default=None, help="Only the first two levels")
	conj_parser.set_defaults(func=cmd_conjugation)
