"""Initial data: the init mini-language and random generators for probes."""

from __future__ import annotations

import math
from typing import Iterator, Optional, Tuple

import numpy as np

from ..core.errors import ConfigError, DomainError, InvalidGridError
from .energy_vacuum import minimizer_q_delta
from .littlewood_paley import random_probe_field
from .madelung import HydroState
from .spectral_core import ComplexField, Grid1D, spectral_derivative


INIT_FORMS = ("one", "qdelta:<delta>", "plane:<k>", "file:<path>", "perturb:<amp>:<seed>")


def _number(text: str, spec: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"malformed init spec {spec!r}: {text!r} is not a number") from None
    if not math.isfinite(value):
        raise ConfigError(f"malformed init spec {spec!r}: {text!r} is not finite")
    return value


def plane_wave(grid: Grid1D, k: float) -> ComplexField:
    """exp(i k x); k must be a multiple of 2 pi / L."""
    m = k * grid.length / (2.0 * math.pi)
    if abs(m - round(m)) > 1e-9 * max(1.0, abs(m)):
        raise DomainError(f"plane wave k={k} is not periodic on L={grid.length}")
    return ComplexField.from_function(grid, lambda x: np.exp(1j * k * x))


def random_perturbation(grid: Grid1D, amplitude: float, seed: int, s: float = 1.0) -> ComplexField:
    """1 + amplitude * (decaying complex field with sup norm <= sqrt 2)."""
    rng = np.random.default_rng(seed)
    pert = random_probe_field(grid, s, rng) + 1j * random_probe_field(grid, s, rng)
    return ComplexField(grid, 1.0 + amplitude * pert)


def parse_init(spec: str, grid: Grid1D, s: float = 1.0) -> ComplexField:
    """Resolve ``one``, ``qdelta:<d>``, ``plane:<k>``, ``file:<path>`` or ``perturb:<amp>:<seed>``."""
    spec = (spec or "").strip()
    head, _, rest = spec.partition(":")
    if head == "one" and not rest:
        return ComplexField.constant(grid, 1.0)
    if head == "qdelta" and rest:
        delta = _number(rest, spec)
        try:
            return minimizer_q_delta(delta, grid)
        except DomainError as exc:
            raise ConfigError(f"malformed init spec {spec!r}: {exc}") from exc
    if head == "plane" and rest:
        return plane_wave(grid, _number(rest, spec))
    if head == "file" and rest:
        from ..common.data_io import read_snapshot

        snapshot = read_snapshot(rest)
        if not snapshot.grid.same_as(grid):
            raise InvalidGridError(
                f"snapshot grid (L={snapshot.grid.length}, N={snapshot.grid.n_points}) "
                f"does not match (L={grid.length}, N={grid.n_points})")
        if isinstance(snapshot.value, HydroState):
            from .madelung import madelung_inverse

            return madelung_inverse(snapshot.value)
        return snapshot.value
    if head == "perturb":
        parts = rest.split(":")
        if len(parts) != 2:
            raise ConfigError(f"malformed init spec {spec!r}: expected perturb:<amp>:<seed>")
        amp = _number(parts[0], spec)
        seed = _number(parts[1], spec)
        if seed != int(seed) or seed < 0:
            raise ConfigError(f"malformed init spec {spec!r}: seed must be a non-negative integer")
        return random_perturbation(grid, amp, int(seed), s)
    raise ConfigError(f"malformed init spec {spec!r}; expected one of {', '.join(INIT_FORMS)}")


# ---------------------------------------------------------------------------
# random generators for probes
# ---------------------------------------------------------------------------

def _bumps(grid: Grid1D, rng: np.random.Generator, count: int, spread: float) -> np.ndarray:
    x = np.asarray(grid.x)
    out = np.zeros(grid.n_points)
    for _ in range(count):
        center = rng.uniform(-spread, spread) * grid.length
        width = rng.uniform(0.5, 1.5)
        out += rng.uniform(-1.0, 1.0) * np.exp(-0.5 * ((x - center) / width) ** 2)
    return out


def random_vacuum_free_field(grid: Grid1D, rng: np.random.Generator, amplitude: float = 0.3,
                             phase_amplitude: float = 0.6, bumps: int = 3) -> ComplexField:
    """(1 + a) exp(i phi) with a and phi sums of Gaussian bumps near the middle of the box."""
    a = _bumps(grid, rng, bumps, 0.15)
    scale = np.max(np.abs(a))
    a = a / scale if scale > 0 else a
    phase = phase_amplitude * _bumps(grid, rng, bumps, 0.15)
    return ComplexField(grid, (1.0 + amplitude * a) * np.exp(1j * phase))


def random_hydro_state(grid: Grid1D, rng: np.random.Generator, amplitude: float = 0.4,
                       velocity_amplitude: float = 0.5) -> HydroState:
    """rho = 1 + bumps with min rho >= 1 - amplitude; v = phi' for a decaying phi, so mean(v) = 0."""
    a = _bumps(grid, rng, 3, 0.15)
    scale = np.max(np.abs(a))
    rho = 1.0 + amplitude * (a / scale if scale > 0 else a)
    phi = velocity_amplitude * _bumps(grid, rng, 3, 0.15)
    v = spectral_derivative(ComplexField(grid, phi), 1).samples
    return HydroState(grid, rho, np.real(v))


def random_pairs(grid: Grid1D, count: int, seed: int,
                 close_fraction: float = 0.5, closeness: float = 0.05) -> Iterator[Tuple[ComplexField, ComplexField]]:
    """Vacuum-free field pairs; a fraction are small perturbations of each other."""
    rng = np.random.default_rng(seed)
    n_close = int(round(close_fraction * count))
    for i in range(count):
        q = random_vacuum_free_field(grid, rng)
        if i < n_close:
            bump = random_vacuum_free_field(grid, rng, amplitude=closeness, phase_amplitude=closeness)
            p = q.with_samples(q.samples * bump.samples)
        else:
            p = random_vacuum_free_field(grid, rng)
        yield q, p


def random_state_pairs(grid: Grid1D, count: int, seed: int) -> Iterator[Tuple[HydroState, HydroState]]:
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield random_hydro_state(grid, rng), random_hydro_state(grid, rng)


def random_phases(grid: Grid1D, count: int, seed: int, amplitude: Optional[float] = None) -> Iterator[np.ndarray]:
    """Decaying real phases; amplitudes log-uniform in [1e-2, 10] unless fixed."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        amp = amplitude if amplitude is not None else 10.0 ** rng.uniform(-2.0, 1.0)
        yield amp * _bumps(grid, rng, 3, 0.15)
