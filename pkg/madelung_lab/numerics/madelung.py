"""Madelung transform, its phase-integrating inverse and vacuum scans."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Tuple

import numpy as np
import scipy.fft as sfft
from scipy.integrate import cumulative_trapezoid

from ..common.utils import fft_workers
from ..core.errors import InvalidGridError, NumericError, PeriodicityError, VacuumError
from .spectral_core import ComplexField, Grid1D, h_s_norm, spectral_derivative


DEFAULT_DELTA_MIN = 1e-6
PHASE_COMPATIBILITY_TOL = 1e-6


@dataclass(frozen=True)
class HydroState:
    """Density rho > 0 and velocity v sampled on a grid."""

    grid: Grid1D
    rho: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=np.float64, copy=True)
        v = np.array(self.v, dtype=np.float64, copy=True)
        n = self.grid.n_points
        if rho.shape != (n,) or v.shape != (n,):
            raise InvalidGridError(f"state arrays {rho.shape}/{v.shape} do not match n_points={n}")
        if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(v))):
            raise NumericError("non-finite density or velocity samples")
        j = int(np.argmin(rho))
        if rho[j] <= 0.0:
            raise VacuumError(
                f"density {rho[j]:.3e} <= 0 at x={self.grid.x[j]:.6f}",
                location=float(self.grid.x[j]), value=float(rho[j]))
        rho.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "v", v)

    @classmethod
    def ground(cls, grid: Grid1D) -> "HydroState":
        return cls(grid, np.ones(grid.n_points), np.zeros(grid.n_points))

    @property
    def mean_velocity(self) -> float:
        return float(np.mean(self.v))

    @property
    def phase_compatible(self) -> bool:
        return abs(self.mean_velocity) * self.grid.length < PHASE_COMPATIBILITY_TOL

    @property
    def amplitude(self) -> np.ndarray:
        return amplitude(self)

    def density_field(self) -> ComplexField:
        return ComplexField(self.grid, self.rho)

    def velocity_field(self) -> ComplexField:
        return ComplexField(self.grid, self.v)


@dataclass(frozen=True)
class PhaseLift:
    """Primitive phi of v with phi(0) = 0."""

    grid: Grid1D
    phi: np.ndarray


@dataclass(frozen=True)
class VacuumScan:
    min_modulus: float
    location: float
    index: int


def amplitude(state: HydroState) -> np.ndarray:
    """A = sqrt(rho), computed on demand."""
    return np.sqrt(state.rho)


def vacuum_scan(q: ComplexField) -> VacuumScan:
    mod = q.modulus()
    j = int(np.argmin(mod))
    return VacuumScan(min_modulus=float(mod[j]), location=float(q.grid.x[j]), index=j)


def vacuum_scan_segment(samples: np.ndarray, x: np.ndarray) -> VacuumScan:
    """Non-periodic variant over arbitrary nodes (for fields such as tanh that do not periodize)."""
    mod = np.abs(np.asarray(samples))
    j = int(np.argmin(mod))
    return VacuumScan(min_modulus=float(mod[j]), location=float(np.asarray(x)[j]), index=j)


def madelung_forward(q: ComplexField, delta_min: float = DEFAULT_DELTA_MIN) -> HydroState:
    """(|q|^2, Im(q'/q)) with the spectral derivative; real q gives v identically 0."""
    scan = vacuum_scan(q)
    if scan.min_modulus <= delta_min:
        raise VacuumError(
            f"min |q| = {scan.min_modulus:.3e} <= {delta_min:.1e} at x={scan.location:.6f}",
            location=scan.location, value=scan.min_modulus)
    dq = spectral_derivative(q, 1).samples
    rho = q.modulus_squared()
    if q.is_real and not np.iscomplexobj(dq):
        v = np.zeros(q.grid.n_points)
    else:
        v = np.imag(dq / q.samples)
    return HydroState(q.grid, rho, v)


def phase_lift(v: np.ndarray, grid: Grid1D, method: str = "spectral") -> PhaseLift:
    """phi(x) = int_0^x v.

    ``spectral``: exact antiderivative of the trigonometric interpolant of v - mean(v), plus
    mean(v) * x on the lifted (non-wrapped) coordinate. ``trapezoid``: cumulative trapezoid
    from the origin node.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (grid.n_points,):
        raise InvalidGridError(f"velocity length {v.shape} does not match n_points={grid.n_points}")
    if not np.all(np.isfinite(v)):
        raise NumericError("non-finite velocity samples")
    x = np.asarray(grid.x)
    origin = grid.origin_index
    if method == "trapezoid":
        phi = cumulative_trapezoid(v, x, initial=0.0)
        phi = phi - phi[origin]
    elif method == "spectral":
        mean = float(np.mean(v))
        spec = sfft.rfft(v - mean, workers=fft_workers())
        xi = grid.xi_real
        anti = np.zeros_like(spec)
        anti[1:-1] = spec[1:-1] / (1j * xi[1:-1])
        phi = sfft.irfft(anti, n=grid.n_points, workers=fft_workers())
        phi = phi + mean * x
        phi = phi - phi[origin]
    else:
        raise ValueError(f"unknown phase lift method: {method}")
    phi.flags.writeable = False
    return PhaseLift(grid, phi)


def madelung_inverse(state: HydroState, tol: float = PHASE_COMPATIBILITY_TOL,
                     method: str = "spectral") -> ComplexField:
    """sqrt(rho) exp(i phi) with phi(0) = 0; the S^1 representative is fixed by that choice."""
    drift = abs(state.mean_velocity) * state.grid.length
    if drift >= tol:
        raise PeriodicityError(
            f"|mean(v)| * L = {drift:.3e} >= {tol:.1e}; reconstructed phase would not be periodic",
            mean_velocity=state.mean_velocity)
    lift = phase_lift(state.v, state.grid, method=method)
    return ComplexField(state.grid, np.sqrt(state.rho) * np.exp(1j * lift.phi))


# ---------------------------------------------------------------------------
# rho / A equivalence probe
# ---------------------------------------------------------------------------

@dataclass
class AmplitudeEquivalenceReport:
    s: float
    pairs: int
    skipped: int
    max_rho_over_amp: float
    max_amp_over_rho: float
    ratios: List[Tuple[float, float]] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "s": self.s, "pairs": self.pairs, "skipped": self.skipped,
            "max_rho_over_amp": self.max_rho_over_amp,
            "max_amp_over_rho": self.max_amp_over_rho,
        }


def amplitude_equivalence_probe(pairs: Iterable[Tuple[HydroState, HydroState]], s: float) -> AmplitudeEquivalenceReport:
    """Ratios ||rho - eta||_{H^s} / ||A - B||_{H^s} and the reverse over vacuum-free pairs."""
    ratios: List[Tuple[float, float]] = []
    skipped = 0
    count = 0
    for a, b in pairs:
        count += 1
        d_rho = h_s_norm(ComplexField(a.grid, a.rho - b.rho), s)
        d_amp = h_s_norm(ComplexField(a.grid, amplitude(a) - amplitude(b)), s)
        if d_rho == 0.0 or d_amp == 0.0:
            skipped += 1
            continue
        ratios.append((d_rho / d_amp, d_amp / d_rho))
    return AmplitudeEquivalenceReport(
        s=float(s), pairs=count, skipped=skipped,
        max_rho_over_amp=max((r[0] for r in ratios), default=math.nan),
        max_amp_over_rho=max((r[1] for r in ratios), default=math.nan),
        ratios=ratios)
