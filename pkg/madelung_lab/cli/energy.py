"""能量命令（energy / soliton-energy / vacuum-sweep）"""

from __future__ import annotations

from .common import add_common_arguments, run_experiment


def cmd_energy(args) -> None:
	"""E^s, E^mu and the hydrodynamic energy of an initial condition."""
	run_experiment("energy", args)


def cmd_soliton_energy(args) -> None:
	"""Energy of the minimizer q_delta against b_tilde(delta), plus E(tanh)."""
	run_experiment("soliton-energy", args)


def cmd_vacuum_sweep(args) -> None:
	run_experiment("vacuum-sweep", args)


def register_energy_parsers(subparsers):
	"""注册能量相关命令的参数解析器"""
	energy_parser = subparsers.add_parser("energy", help="Energies of one field")
	add_common_arguments(energy_parser)
	energy_parser.add_argument("--init", type=str, default=None, help="Initial condition spec")
	energy_parser.add_argument("--mu", type=float, default=None, help="Fractional energy index in (1/2, 1)")
	energy_parser.set_defaults(func=cmd_energy)

	soliton_parser = subparsers.add_parser("soliton-energy", help="E(q_delta) vs b_tilde(delta)")
	add_common_arguments(soliton_parser)
	soliton_parser.add_argument("--delta", type=float, default=None, help="Minimizer depth in (0, 1)")
	soliton_parser.set_defaults(func=cmd_soliton_energy)

	sweep_parser = subparsers.add_parser("vacuum-sweep", help="b_tilde / delta_tilde sweep and minimality probe")
	add_common_arguments(sweep_parser)
	sweep_parser.add_argument("--deltas", type=str, default=None, help="Comma separated depths")
	sweep_parser.add_argument("--sweep_points", type=int, default=None, help="Points of the inverse sweep")
	sweep_parser.add_argument("--mu", type=float, default=None, help="Also fit the E^mu lower bound")
	sweep_parser.set_defaults(func=cmd_vacuum_sweep)
