"""Energy functionals, vacuum thresholds, the minimizer family q_delta and no-vacuum certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import bisect

from ..core.errors import DomainError
from .madelung import HydroState, madelung_inverse, vacuum_scan
from .spectral_core import ComplexField, Grid1D, h_s_norm, periodic_trapezoid, spectral_derivative


CRITICAL_ENERGY = 4.0 / 3.0
BISECTION_XTOL = 1e-12
# frozen C_emp: E^mu(q_delta) >= (1 - delta)^2 / C for mu in (1/2, 1) and delta in (0, 1)
EMU_FIT_CEILING = 2.5


@dataclass(frozen=True)
class EnergyReport:
    s: float
    gradient_part: float
    amplitude_part: float
    length: Optional[float] = None
    n_points: Optional[int] = None

    @property
    def total(self) -> float:
        return self.gradient_part + self.amplitude_part

    def to_dict(self) -> Dict[str, float]:
        return {
            "s": self.s, "total": self.total, "gradient_part": self.gradient_part,
            "amplitude_part": self.amplitude_part, "L": self.length, "N": self.n_points,
        }


@dataclass(frozen=True)
class VacuumCertificate:
    energy_bound: float
    threshold: float
    observed_min: float
    passed: bool
    vacuous: bool = False

    def to_dict(self) -> Dict[str, float]:
        return {
            "energy_bound": self.energy_bound, "threshold": self.threshold,
            "observed_min": self.observed_min, "passed": self.passed, "vacuous": self.vacuous,
        }


# ---------------------------------------------------------------------------
# energies
# ---------------------------------------------------------------------------

def energy_Es(q: ComplexField, s: float = 1.0) -> EnergyReport:
    """E^s(q) = 1/2 ||q'||^2_{H^{s-1}} + 1/2 || |q|^2 - 1 ||^2_{H^{s-1}}."""
    if not (math.isfinite(s) and s > 0.5):
        raise DomainError(f"energy index must satisfy s > 1/2, got {s!r}")
    dq = spectral_derivative(q, 1)
    defect = q.with_samples(q.modulus_squared() - 1.0)
    return EnergyReport(
        s=float(s),
        gradient_part=0.5 * h_s_norm(dq, s - 1.0) ** 2,
        amplitude_part=0.5 * h_s_norm(defect, s - 1.0) ** 2,
        length=q.grid.length, n_points=q.grid.n_points)


def energy_Emu(q: ComplexField, mu: float) -> EnergyReport:
    if not (0.5 < mu < 1.0):
        raise DomainError(f"mu must lie in (1/2, 1), got {mu!r}")
    return energy_Es(q, mu)


def energy_hydro(state: HydroState) -> EnergyReport:
    """1/2 int rho'^2/(4 rho) + rho v^2 + (rho - 1)^2 by the periodic trapezoid rule.

    gradient_part collects the rho'^2/(4 rho) + rho v^2 terms so the split matches energy_Es at s = 1.
    """
    grid = state.grid
    rho = state.rho
    drho = spectral_derivative(ComplexField(grid, rho), 1).samples
    kinetic = drho * drho / (4.0 * rho) + rho * state.v * state.v
    potential = (rho - 1.0) ** 2
    return EnergyReport(
        s=1.0,
        gradient_part=0.5 * periodic_trapezoid(kinetic, grid),
        amplitude_part=0.5 * periodic_trapezoid(potential, grid),
        length=grid.length, n_points=grid.n_points)


def energy_hydro_fractional(state: HydroState, mu: float) -> EnergyReport:
    """Hydrodynamic E^mu, defined through the inverse transform (gauge invariant)."""
    return energy_Es(madelung_inverse(state), mu)


def energy_nonperiodic(q_fn: Callable[[np.ndarray], np.ndarray],
                       dq_fn: Callable[[np.ndarray], np.ndarray],
                       length: float, n_points: int = 40001,
                       breakpoints: Sequence[float] = ()) -> EnergyReport:
    """E^1 on [-L/2, L/2] with an analytic derivative, composite Simpson on each smooth segment."""
    if length <= 0:
        raise DomainError(f"length must be positive, got {length!r}")
    a, b = -0.5 * length, 0.5 * length
    cuts = [a] + sorted(p for p in breakpoints if a < p < b) + [b]
    grad_parts: List[float] = []
    amp_parts: List[float] = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        nodes = max(int(round(n_points * (hi - lo) / length)), 3)
        if nodes % 2 == 0:
            nodes += 1
        x = np.linspace(lo, hi, nodes)
        q = np.asarray(q_fn(x))
        dq = np.asarray(dq_fn(x))
        grad_parts.append(float(simpson(np.abs(dq) ** 2, x=x)))
        amp_parts.append(float(simpson((np.abs(q) ** 2 - 1.0) ** 2, x=x)))
    return EnergyReport(
        s=1.0,
        gradient_part=0.5 * math.fsum(grad_parts),
        amplitude_part=0.5 * math.fsum(amp_parts),
        length=float(length), n_points=int(n_points))


def black_soliton_energy(length: float = 40.0, n_points: int = 40001) -> EnergyReport:
    """E(tanh) via the non-periodic path with d/dx tanh = sech^2."""
    return energy_nonperiodic(np.tanh, lambda x: 1.0 / np.cosh(x) ** 2, length, n_points)


# ---------------------------------------------------------------------------
# thresholds
# ---------------------------------------------------------------------------

def b_tilde(delta: float) -> float:
    """4/3 - 2 delta + (2/3) delta^3, evaluated as (2/3)(1 - delta)^2 (2 + delta)."""
    if not (0.0 <= delta <= 1.0):
        raise DomainError(f"b_tilde needs delta in [0, 1], got {delta!r}")
    return (2.0 / 3.0) * (1.0 - delta) ** 2 * (2.0 + delta)


def delta_tilde(b: float) -> float:
    """Inverse of b_tilde by bisection on [0, 1]."""
    if not (0.0 <= b <= CRITICAL_ENERGY):
        raise DomainError(f"delta_tilde needs b in [0, 4/3], got {b!r}")
    if b == 0.0:
        return 1.0
    if b == CRITICAL_ENERGY:
        return 0.0
    return float(bisect(lambda d: b_tilde(d) - b, 0.0, 1.0, xtol=BISECTION_XTOL, maxiter=200))


# ---------------------------------------------------------------------------
# minimizers
# ---------------------------------------------------------------------------

def _check_open_delta(delta: float) -> None:
    if not (0.0 < delta < 1.0):
        raise DomainError(f"q_delta needs delta in (0, 1), got {delta!r}")


def q_delta_profile(x: np.ndarray, delta: float) -> np.ndarray:
    return np.tanh(np.abs(x) + math.atanh(delta))


def q_delta_derivative(x: np.ndarray, delta: float) -> np.ndarray:
    """sign(x) sech^2(|x| + atanh delta); one-sided values differ at x = 0."""
    return np.sign(x) / np.cosh(np.abs(x) + math.atanh(delta)) ** 2


def minimizer_q_delta(delta: float, grid: Grid1D) -> ComplexField:
    """tanh(|x| + atanh delta) sampled on the grid: real, even, minimum delta at x = 0."""
    _check_open_delta(delta)
    return ComplexField(grid, q_delta_profile(np.asarray(grid.x), delta))


def q_delta_energy_exact(delta: float, length: float = 60.0, n_points: int = 40001) -> EnergyReport:
    """Energy of q_delta with the kink at 0 treated as a breakpoint."""
    _check_open_delta(delta)
    return energy_nonperiodic(
        lambda x: q_delta_profile(x, delta),
        lambda x: q_delta_derivative(x, delta),
        length, n_points, breakpoints=(0.0,))


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

def vacuum_certificate(energies: Sequence[float], min_moduli: Sequence[float], b: float) -> VacuumCertificate:
    """Energy-gap certificate: E(q0) < b < 4/3 implies inf |q| > delta_tilde(b)."""
    energies = np.asarray(energies, dtype=float)
    mins = np.asarray(min_moduli, dtype=float)
    if energies.size == 0 or mins.size == 0:
        raise DomainError("certificate needs at least one energy and one min |q| sample")
    e0 = float(energies[0])
    if not (e0 < b < CRITICAL_ENERGY):
        raise DomainError(f"energy bound b={b!r} must satisfy E(q0)={e0:.6g} < b < 4/3")
    threshold = delta_tilde(b)
    observed = float(np.min(mins))
    return VacuumCertificate(energy_bound=float(b), threshold=threshold,
                             observed_min=observed, passed=bool(np.all(mins > threshold)))


def small_energy_certificate(initial_emu: float, min_moduli: Sequence[float], mu: float,
                             epsilon: float, cC_product: float) -> VacuumCertificate:
    """Small-energy variant: E^mu(q0) < eps gives inf |q| > 1 - sqrt(eps) sqrt(c C~) with user-supplied c C~."""
    if not (0.5 < mu < 1.0):
        raise DomainError(f"mu must lie in (1/2, 1), got {mu!r}")
    if not cC_product > 0:
        raise DomainError(f"constant product c*C~ must be positive, got {cC_product!r}")
    if not (initial_emu < epsilon):
        raise DomainError(f"epsilon={epsilon!r} must exceed E^mu(q0)={initial_emu!r}")
    mins = np.asarray(min_moduli, dtype=float)
    threshold = 1.0 - math.sqrt(epsilon) * math.sqrt(cC_product)
    observed = float(np.min(mins))
    vacuous = threshold <= 0.0
    return VacuumCertificate(energy_bound=float(epsilon), threshold=threshold, observed_min=observed,
                             passed=bool(vacuous or np.all(mins > threshold)), vacuous=vacuous)


# ---------------------------------------------------------------------------
# probes
# ---------------------------------------------------------------------------

@dataclass
class MinimalityReport:
    delta: float
    samples: int
    bound: float
    min_energy: float
    min_margin: float
    counterexamples: int
    energies: List[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "delta": self.delta, "samples": self.samples, "b_tilde": self.bound,
            "min_energy": self.min_energy, "min_margin": self.min_margin,
            "counterexamples": self.counterexamples,
        }


def dip_field(grid: Grid1D, rng: np.random.Generator, depth_min: float) -> ComplexField:
    """Smooth field whose modulus dips to a value <= depth_min at a grid node."""
    x = np.asarray(grid.x)
    center_index = int(rng.integers(grid.n_points // 4, 3 * grid.n_points // 4))
    offset = grid.periodic_offset(x[center_index])
    # both profiles vanish to round-off at the antipode
    width = rng.uniform(0.5, min(3.0, grid.length / 18.0))
    bottom = rng.uniform(0.0, depth_min)
    profile = np.exp(-0.5 * (offset / width) ** 2)
    modulus = 1.0 - (1.0 - bottom) * profile
    twist = rng.uniform(-1.0, 1.0) * np.pi
    envelope = np.exp(-0.5 * (offset / (0.25 * grid.length)) ** 16)
    phase = twist * 0.5 * (1.0 + np.tanh(offset / width)) * envelope
    return ComplexField(grid, modulus * np.exp(1j * phase))


def minimality_probe(samples: int, delta: float, grid: Grid1D, seed: int = 0,
                     tol: float = 1e-6) -> MinimalityReport:
    """Random fields with min |q| <= delta must satisfy E(q) >= b_tilde(delta) - tol."""
    bound = b_tilde(delta)
    energies: List[float] = []
    for i in range(samples):
        rng = np.random.default_rng(seed + i)
        q = dip_field(grid, rng, delta)
        if vacuum_scan(q).min_modulus > delta:
            continue
        energies.append(energy_Es(q, 1.0).total)
    margins = [e - bound for e in energies]
    return MinimalityReport(
        delta=float(delta), samples=len(energies), bound=bound,
        min_energy=min(energies) if energies else math.nan,
        min_margin=min(margins) if margins else math.nan,
        counterexamples=sum(1 for m in margins if m < -tol),
        energies=energies)


@dataclass
class EmuFitReport:
    mu: float
    constant: float
    deltas: List[float]
    energies: List[float]

    def to_dict(self) -> dict:
        return {"mu": self.mu, "C_emp": self.constant, "deltas": self.deltas, "energies": self.energies}


def emu_lower_bound_fit(deltas: Iterable[float], mu: float, grid: Grid1D) -> EmuFitReport:
    """Smallest C with E^mu(q_delta) >= (1 - delta)^2 / C over the given deltas."""
    ds = [float(d) for d in deltas]
    energies = [energy_Emu(minimizer_q_delta(d, grid), mu).total for d in ds]
    constant = max((1.0 - d) ** 2 / e for d, e in zip(ds, energies))
    return EmuFitReport(mu=float(mu), constant=constant, deltas=ds, energies=energies)
