"""Time evolution: Strang split-step Fourier for GP, RK4 method of lines for hGP, and the conjugation harness."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import scipy.fft as sfft

from ..common.utils import fft_workers
from ..core.errors import (
    BlowUpError,
    ConfigError,
    DomainError,
    StabilityError,
    VacuumBreachError,
)
from .energy_vacuum import CRITICAL_ENERGY, VacuumCertificate, energy_Es, energy_hydro, vacuum_certificate
from .madelung import HydroState, madelung_forward, madelung_inverse
from .metrics import metric_theta
from .spectral_core import ComplexField, Grid1D, dealiased_product, periodic_trapezoid


log = logging.getLogger(__name__)

SCHEMES = ("strang_gp", "rk4_hgp")
FAULTS = ("no-dealias", "drop-half-step")
DEFAULT_C_CFL = 0.5
DEFAULT_RHO_FLOOR = 1e-6

Progress = Optional[Callable[[int], None]]


@dataclass
class SimConfig:
    dt: float
    t_end: float
    scheme: str = "strang_gp"
    snapshot_stride: int = 1
    rho_floor: float = DEFAULT_RHO_FLOOR
    dealias: bool = True
    fault: Optional[str] = None
    c_cfl: float = DEFAULT_C_CFL

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"dt must be a positive number, got {self.dt}")
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise ConfigError(f"t_end must be a non-negative number, got {self.t_end}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if int(self.snapshot_stride) != self.snapshot_stride or self.snapshot_stride < 1:
            raise ConfigError(f"snapshot_stride must be a positive integer, got {self.snapshot_stride}")
        if not self.rho_floor > 0:
            raise ConfigError(f"rho_floor must be positive, got {self.rho_floor}")
        if self.fault is not None and self.fault not in FAULTS:
            raise ConfigError(f"unknown fault {self.fault!r}; expected one of {FAULTS}")
        self.snapshot_stride = int(self.snapshot_stride)

    @property
    def effective_dealias(self) -> bool:
        return self.dealias and self.fault != "no-dealias"

    def step_plan(self) -> Tuple[int, float]:
        """(number of steps, step size) covering [0, t_end] exactly."""
        if self.t_end == 0:
            return 0, self.dt
        n = max(1, math.ceil(self.t_end / self.dt - 1e-9))
        return n, self.t_end / n

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Trajectory:
    kind: str  # "field" for GP, "state" for hGP
    grid: Grid1D
    config: SimConfig
    times: List[float] = field(default_factory=list)
    states: List[Union[ComplexField, HydroState]] = field(default_factory=list)
    diagnostics: List[Dict[str, float]] = field(default_factory=list)

    def append(self, t: float, state: Union[ComplexField, HydroState]) -> None:
        if self.times and t <= self.times[-1]:
            raise DomainError(f"snapshot time {t} is not after {self.times[-1]}")
        self.times.append(float(t))
        self.states.append(state)
        self.diagnostics.append(_diagnostics(t, state))

    @property
    def final(self) -> Union[ComplexField, HydroState]:
        return self.states[-1]

    @property
    def energies(self) -> List[float]:
        return [d["energy"] for d in self.diagnostics]

    @property
    def min_moduli(self) -> List[float]:
        """min |q| per snapshot; for hGP snapshots sqrt(min rho)."""
        key = "min_modulus_or_density"
        if self.kind == "field":
            return [d[key] for d in self.diagnostics]
        return [math.sqrt(max(d[key], 0.0)) for d in self.diagnostics]

    @property
    def energy_drift(self) -> float:
        """max_t |E(t) - E(0)| / |E(0)|, absolute when E(0) = 0."""
        energies = np.asarray(self.energies)
        e0 = energies[0]
        diff = float(np.max(np.abs(energies - e0)))
        return diff / abs(e0) if e0 != 0 else diff

    def mass_drift(self) -> float:
        mass = np.asarray([d["mass_like"] for d in self.diagnostics])
        return float(np.max(np.abs(mass - mass[0])))

    def diagnostics_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.diagnostics, columns=["t", "energy", "min_modulus_or_density", "mass_like"])

    def vacuum_certificate(self, margin: float = 0.01) -> Optional[VacuumCertificate]:
        """Certificate with b = E(q0) + margin; None when b is not below the critical energy."""
        b = self.energies[0] + margin
        if b >= CRITICAL_ENERGY or b <= self.energies[0]:
            return None
        return vacuum_certificate(self.energies, self.min_moduli, b)


def _diagnostics(t: float, state: Union[ComplexField, HydroState]) -> Dict[str, float]:
    if isinstance(state, HydroState):
        return {
            "t": float(t),
            "energy": energy_hydro(state).total,
            "min_modulus_or_density": float(np.min(state.rho)),
            "mass_like": periodic_trapezoid(state.rho - 1.0, state.grid),
        }
    return {
        "t": float(t),
        "energy": energy_Es(state, 1.0).total,
        "min_modulus_or_density": float(np.min(state.modulus())),
        "mass_like": periodic_trapezoid(state.modulus_squared() - 1.0, state.grid),
    }


# ---------------------------------------------------------------------------
# GP: split-step Fourier
# ---------------------------------------------------------------------------

def nonlinear_substep(samples: np.ndarray, tau: float) -> np.ndarray:
    """Exact flow of i q_t = 2(|q|^2 - 1) q over time tau; |q| is unchanged pointwise."""
    return samples * np.exp(-2j * tau * (np.abs(samples) ** 2 - 1.0))


def linear_substep(samples: np.ndarray, grid: Grid1D, tau: float) -> np.ndarray:
    """Exact flow of q_t = i q_xx; the mean is split off so constants are fixed exactly."""
    workers = fft_workers()
    mean = np.mean(samples)
    mult = np.exp(-1j * grid.xi ** 2 * tau)
    return mean + sfft.ifft(mult * sfft.fft(samples - mean, workers=workers), workers=workers)


def step_gp_strang(q: ComplexField, dt: float, fault: Optional[str] = None,
                   time: Optional[float] = None) -> ComplexField:
    samples = np.asarray(q.samples, dtype=np.complex128)
    if fault == "drop-half-step":
        out = linear_substep(nonlinear_substep(samples, dt), q.grid, dt)
    else:
        out = nonlinear_substep(samples, 0.5 * dt)
        out = linear_substep(out, q.grid, dt)
        out = nonlinear_substep(out, 0.5 * dt)
    if not np.all(np.isfinite(out)):
        raise BlowUpError("non-finite values in GP step", time=time)
    return ComplexField(q.grid, out)


def evolve_gp(q0: ComplexField, config: SimConfig, progress: Progress = None) -> Trajectory:
    n_steps, dt = config.step_plan()
    traj = Trajectory(kind="field", grid=q0.grid, config=config)
    traj.append(0.0, q0)
    q = q0
    for k in range(1, n_steps + 1):
        q = step_gp_strang(q, dt, fault=config.fault, time=k * dt)
        if k % config.snapshot_stride == 0 or k == n_steps:
            traj.append(k * dt, q)
        if progress is not None:
            progress(1)
    log.debug("GP run finished: %d steps, dt=%.3e, drift=%.3e", n_steps, dt, traj.energy_drift)
    return traj


# ---------------------------------------------------------------------------
# hGP: spectral method of lines
# ---------------------------------------------------------------------------

def bogoliubov_frequency(xi: np.ndarray) -> np.ndarray:
    return xi * np.sqrt(xi * xi + 4.0)


def stable_dt(grid: Grid1D, c_cfl: float = DEFAULT_C_CFL) -> float:
    """c_cfl / max |omega(xi)| over the grid frequencies."""
    if not c_cfl > 0:
        raise DomainError(f"c_cfl must be positive, got {c_cfl}")
    return c_cfl / float(np.max(np.abs(bogoliubov_frequency(grid.xi))))


def _dx(u: np.ndarray, grid: Grid1D, order: int = 1) -> np.ndarray:
    workers = fft_workers()
    mult = (1j * grid.xi_real) ** order
    if order % 2 == 1:
        mult[-1] = 0.0
    return sfft.irfft(mult * sfft.rfft(u, workers=workers), n=grid.n_points, workers=workers)


def _hgp_rhs_arrays(rho: np.ndarray, v: np.ndarray, grid: Grid1D, dealias: bool,
                    rho_floor: float, time: Optional[float]) -> Tuple[np.ndarray, np.ndarray]:
    j = int(np.argmin(rho))
    if not rho[j] > rho_floor:
        raise VacuumBreachError(
            f"density {rho[j]:.3e} below floor {rho_floor:.1e} at x={grid.x[j]:.6f}",
            location=float(grid.x[j]), value=float(rho[j]), time=time)
    prod = dealiased_product if dealias else np.multiply
    drho = -2.0 * _dx(prod(rho, v), grid)
    g = 0.5 * prod(_dx(rho, grid), 1.0 / rho)
    dv = _dx(-prod(v, v) - 2.0 * (rho - 1.0) + _dx(g, grid) + prod(g, g), grid)
    return drho, dv


def rhs_hgp(state: HydroState, dealias: bool = True, rho_floor: float = DEFAULT_RHO_FLOOR,
            time: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """(d rho/dt, dv/dt) of the hydrodynamic system."""
    return _hgp_rhs_arrays(state.rho, state.v, state.grid, dealias, rho_floor, time)


def _rk4_step(rho: np.ndarray, v: np.ndarray, grid: Grid1D, dt: float, dealias: bool,
              rho_floor: float, time: float) -> Tuple[np.ndarray, np.ndarray]:
    def f(r, u):
        return _hgp_rhs_arrays(r, u, grid, dealias, rho_floor, time)

    k1r, k1v = f(rho, v)
    k2r, k2v = f(rho + 0.5 * dt * k1r, v + 0.5 * dt * k1v)
    k3r, k3v = f(rho + 0.5 * dt * k2r, v + 0.5 * dt * k2v)
    k4r, k4v = f(rho + dt * k3r, v + dt * k3v)
    rho_next = rho + dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
    v_next = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return rho_next, v_next


def evolve_hgp(state0: HydroState, config: SimConfig, progress: Progress = None) -> Trajectory:
    grid = state0.grid
    bound = stable_dt(grid, config.c_cfl)
    n_steps, dt = config.step_plan()
    if n_steps and dt > bound:
        raise StabilityError(f"dt={dt:.3e} exceeds the stability bound {bound:.3e}", dt=dt, bound=bound)
    traj = Trajectory(kind="state", grid=grid, config=config)
    traj.append(0.0, state0)
    if traj.energies[0] >= CRITICAL_ENERGY:
        log.warning("initial hydrodynamic energy %.6f is not below 4/3", traj.energies[0])
    rho, v = np.array(state0.rho), np.array(state0.v)
    dealias = config.effective_dealias
    for k in range(1, n_steps + 1):
        t = k * dt
        rho, v = _rk4_step(rho, v, grid, dt, dealias, config.rho_floor, t)
        if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(v))):
            raise BlowUpError("non-finite values in hGP step", time=t)
        j = int(np.argmin(rho))
        if not rho[j] > config.rho_floor:
            raise VacuumBreachError(
                f"density {rho[j]:.3e} below floor {config.rho_floor:.1e} at t={t:.6f}",
                location=float(grid.x[j]), value=float(rho[j]), time=t)
        if k % config.snapshot_stride == 0 or k == n_steps:
            traj.append(t, HydroState(grid, rho, v))
        if progress is not None:
            progress(1)
    log.debug("hGP run finished: %d steps, dt=%.3e, drift=%.3e", n_steps, dt, traj.energy_drift)
    return traj


# ---------------------------------------------------------------------------
# conjugation and refinement
# ---------------------------------------------------------------------------

@dataclass
class ConjugationReport:
    s: float
    times: List[float]
    discrepancies: List[float]
    gp_dt: float
    hgp_dt: float

    @property
    def final_discrepancy(self) -> float:
        return self.discrepancies[-1]

    @property
    def max_discrepancy(self) -> float:
        return max(self.discrepancies)

    def to_dict(self) -> dict:
        return {"s": self.s, "times": self.times, "discrepancies": self.discrepancies,
                "final_discrepancy": self.final_discrepancy, "max_discrepancy": self.max_discrepancy,
                "gp_dt": self.gp_dt, "hgp_dt": self.hgp_dt}


def conjugation_check(state0: HydroState, config: SimConfig, s: float = 1.0,
                      gp_dt: Optional[float] = None, progress: Progress = None) -> ConjugationReport:
    """theta^s(M(Phi_GP^t(M^-1 state0)), Phi_hGP^t(state0)) at every snapshot time."""
    hgp_cfg = SimConfig(dt=config.dt, t_end=config.t_end, scheme="rk4_hgp",
                        snapshot_stride=config.snapshot_stride, rho_floor=config.rho_floor,
                        dealias=config.dealias, fault=config.fault, c_cfl=config.c_cfl)
    hgp = evolve_hgp(state0, hgp_cfg, progress=progress)
    gp_cfg = SimConfig(dt=gp_dt or config.dt, t_end=config.t_end, scheme="strang_gp",
                       snapshot_stride=1, fault=config.fault)
    q = madelung_inverse(state0)
    n_gp, dt_gp = gp_cfg.step_plan()
    gp_index = 0
    discrepancies: List[float] = []
    for t, hstate in zip(hgp.times, hgp.states):
        target = int(round(t / dt_gp)) if n_gp else 0
        while gp_index < target:
            gp_index += 1
            q = step_gp_strang(q, dt_gp, fault=gp_cfg.fault, time=gp_index * dt_gp)
        discrepancies.append(metric_theta(madelung_forward(q, config.rho_floor ** 0.5), hstate, s))
    return ConjugationReport(s=float(s), times=list(hgp.times), discrepancies=discrepancies,
                             gp_dt=dt_gp, hgp_dt=hgp_cfg.step_plan()[1])


@dataclass
class RefinementReport:
    kind: str
    dts: List[float]
    drifts: List[float]
    self_differences: List[float]

    @property
    def drift_ratios(self) -> List[float]:
        return [a / b if b > 0 else math.inf for a, b in zip(self.drifts, self.drifts[1:])]

    @property
    def difference_ratios(self) -> List[float]:
        d = self.self_differences
        return [a / b if b > 0 else math.inf for a, b in zip(d, d[1:])]

    @property
    def observed_order(self) -> Optional[float]:
        ratios = [r for r in self.difference_ratios if math.isfinite(r) and r > 0]
        return math.log2(ratios[-1]) if ratios else None

    def to_dict(self) -> dict:
        return {"kind": self.kind, "dts": self.dts, "drifts": self.drifts,
                "self_differences": self.self_differences, "drift_ratios": self.drift_ratios,
                "difference_ratios": self.difference_ratios, "observed_order": self.observed_order}


def _terminal_difference(a: Union[ComplexField, HydroState], b: Union[ComplexField, HydroState]) -> float:
    h = a.grid.spacing
    if isinstance(a, HydroState):
        return math.sqrt(h * float(np.sum((a.rho - b.rho) ** 2 + (a.v - b.v) ** 2)))
    return math.sqrt(h * float(np.sum(np.abs(a.samples - b.samples) ** 2)))


def refinement_study(initial: Union[ComplexField, HydroState], config: SimConfig,
                     levels: int = 3) -> RefinementReport:
    """Run at dt, dt/2, ...; report energy drift and the terminal self-difference between levels."""
    if levels < 2:
        raise DomainError(f"refinement needs at least two levels, got {levels}")
    evolve = evolve_hgp if config.scheme == "rk4_hgp" else evolve_gp
    dts: List[float] = []
    drifts: List[float] = []
    finals = []
    for level in range(levels):
        cfg = SimConfig(**{**config.to_dict(), "dt": config.dt / 2 ** level,
                           "snapshot_stride": 2 ** level * config.snapshot_stride})
        traj = evolve(initial, cfg)
        dts.append(cfg.step_plan()[1])
        drifts.append(traj.energy_drift)
        finals.append(traj.final)
    diffs = [_terminal_difference(a, b) for a, b in zip(finals, finals[1:])]
    return RefinementReport(kind=config.scheme, dts=dts, drifts=drifts, self_differences=diffs)


@dataclass
class ConjugationRefinementReport:
    s: float
    n_points: List[int]
    dts: List[float]
    discrepancies: List[float]

    @property
    def monotone(self) -> bool:
        d = self.discrepancies
        return all(b < a for a, b in zip(d, d[1:]))

    def to_dict(self) -> dict:
        return {"s": self.s, "N": self.n_points, "dts": self.dts,
                "discrepancies": self.discrepancies, "monotone": self.monotone}


def conjugation_refinement(make_state: Callable[[Grid1D], HydroState], length: float,
                           n_levels: Sequence[int], t_end: float, s: float = 1.0,
                           dt_fraction: float = 0.9, fault: Optional[str] = None) -> ConjugationRefinementReport:
    """Final conjugation discrepancy under simultaneous (dt, h) refinement; dt follows the stability bound."""
    dts: List[float] = []
    values: List[float] = []
    for n in n_levels:
        grid = Grid1D(length, int(n))
        dt = dt_fraction * stable_dt(grid)
        cfg = SimConfig(dt=dt, t_end=t_end, scheme="rk4_hgp", snapshot_stride=10 ** 9, fault=fault)
        report = conjugation_check(make_state(grid), cfg, s=s)
        dts.append(dt)
        values.append(report.final_discrepancy)
        log.info("conjugation level N=%d dt=%.3e discrepancy=%.3e", n, dt, report.final_discrepancy)
    return ConjugationRefinementReport(s=float(s), n_points=[int(n) for n in n_levels],
                                       dts=dts, discrepancies=values)
