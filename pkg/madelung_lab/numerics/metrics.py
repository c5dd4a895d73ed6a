"""The sech-localized phase-quotient metric d^s, its variants and the hydrodynamic metric theta^s.

The S^1 infimum is solved in closed form. For a Hermitian form <.,.> the objective
``||l a - b||^2 = ||a||^2 + ||b||^2 - 2 Re(l c)`` with ``c = <a, b>`` is minimized by
``l* = conj(c) / |c|`` (``l* = 1`` when ``c = 0``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from ..core.errors import DomainError, InvalidGridError, VacuumError
from ..core.logging import get_logger
from .energy_vacuum import energy_Es
from .madelung import DEFAULT_DELTA_MIN, HydroState, madelung_forward, madelung_inverse, vacuum_scan
from .spectral_core import (
    Ball,
    BallQuadrature,
    ComplexField,
    Grid1D,
    check_same_grid,
    dft,
    dft_rows,
    h_s_norm,
    partition_centers,
    spectral_derivative,
    w_s2_ball_inner,
    w_s2_ball_norm,
)


SECH_WINDOW = 35.0
SECH_FLOOR = 1e-14
PHASE_SCAN_SAMPLES = 3600
# frozen C_0: d^1(1, q_delta) <= C_0 sqrt(E(q_delta)) for delta in (0, 1)
ENERGY_DISTANCE_CEILING = 3.0
# rows per batched FFT in the y-quadrature
_Y_CHUNK = 128


@dataclass
class MetricReport:
    s: float
    d_s: float
    theta_s: Optional[float] = None
    per_ball: List[Tuple[int, float]] = field(default_factory=list)
    length: Optional[float] = None
    n_points: Optional[int] = None
    y_nodes: Dict[str, float] = field(default_factory=dict)
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "s": self.s, "d_s": self.d_s, "theta_s": self.theta_s,
            "per_ball": [[k, v] for k, v in self.per_ball],
            "L": self.length, "N": self.n_points, "y_nodes": self.y_nodes, "seed": self.seed,
        }


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

def sech_weight(grid: Grid1D, y: np.ndarray, sqrt_weight: bool = False) -> np.ndarray:
    """sech(y - x) on the minimal periodic offset, zero outside |y - x| < min(L/2, 35) and below 1e-14.

    Returns an array of shape (len(y), N).
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    x = np.asarray(grid.x)
    half = 0.5 * grid.length
    offset = np.mod(x[None, :] - y[:, None] + half, grid.length) - half
    window = min(half, SECH_WINDOW)
    w = np.zeros_like(offset)
    inside = np.abs(offset) <= window
    w[inside] = 1.0 / np.cosh(offset[inside])
    w[w < SECH_FLOOR] = 0.0
    return np.sqrt(w) if sqrt_weight else w


# ---------------------------------------------------------------------------
# phase alignment
# ---------------------------------------------------------------------------

def optimal_phase(c: complex) -> complex:
    mag = abs(c)
    if mag == 0.0:
        return 1.0 + 0.0j
    return complex(np.conj(c) / mag)


def phase_align(a: ComplexField, b: ComplexField, s: float,
                weight: Optional[np.ndarray] = None) -> Tuple[complex, float]:
    """argmin / min over unit l of ||w (l a - b)||_{H^s}."""
    grid = check_same_grid(a, b)
    w = np.ones(grid.n_points) if weight is None else np.asarray(weight, dtype=float)
    if w.shape != (grid.n_points,):
        raise InvalidGridError(f"weight length {w.shape} does not match n_points={grid.n_points}")
    if np.any(w < 0):
        raise DomainError("weight must be non-negative")
    spec_a = dft(a.with_samples(w * a.samples))
    spec_b = dft(b.with_samples(w * b.samples))
    hs_w = (1.0 + grid.xi ** 2) ** s
    lam = optimal_phase(complex(np.sum(hs_w * spec_a * np.conj(spec_b))))
    diff = lam * spec_a - spec_b
    value = math.sqrt(float(np.sum(hs_w * (diff.real ** 2 + diff.imag ** 2))))
    return lam, value


def _refine_scan(objective: Callable[[float], float], values: np.ndarray, thetas: np.ndarray) -> Tuple[float, float]:
    k = int(np.argmin(values))
    step = thetas[1] - thetas[0]
    res = minimize_scalar(objective, bounds=(thetas[k] - step, thetas[k] + step),
                          method="bounded", options={"xatol": 1e-12})
    if res.fun < values[k]:
        return float(res.x), float(res.fun)
    return float(thetas[k]), float(values[k])


def phase_scan_min(a: ComplexField, b: ComplexField, s: float,
                   weight: Optional[np.ndarray] = None,
                   samples: int = PHASE_SCAN_SAMPLES) -> Tuple[complex, float]:
    """Brute-force oracle: equispaced phase scan, then bounded refinement around the best sample."""
    grid = check_same_grid(a, b)
    w = np.ones(grid.n_points) if weight is None else np.asarray(weight, dtype=float)
    spec_a = dft(a.with_samples(w * a.samples))
    spec_b = dft(b.with_samples(w * b.samples))
    hs_w = (1.0 + grid.xi ** 2) ** s

    def sq(theta: float) -> float:
        d = np.exp(1j * theta) * spec_a - spec_b
        return float(np.sum(hs_w * (d.real ** 2 + d.imag ** 2)))

    thetas = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    rows = np.exp(1j * thetas)[:, None] * spec_a[None, :] - spec_b[None, :]
    values = np.sum(hs_w[None, :] * (rows.real ** 2 + rows.imag ** 2), axis=1)
    theta, best = _refine_scan(sq, values, thetas)
    return complex(np.exp(1j * theta)), math.sqrt(max(best, 0.0))


def phase_align_ball(q: ComplexField, p: ComplexField, s: float, ball: Ball) -> Tuple[complex, float]:
    """Closed-form alignment in the W^{s,2}(B) inner product."""
    check_same_grid(q, p)
    lam = optimal_phase(w_s2_ball_inner(q, p, ball, s))
    return lam, w_s2_ball_norm(q.with_samples(lam * q.samples - p.samples), ball, s)


def phase_scan_min_ball(q: ComplexField, p: ComplexField, s: float, ball: Ball,
                        samples: int = PHASE_SCAN_SAMPLES) -> Tuple[complex, float]:
    grid = check_same_grid(q, p)
    quad = BallQuadrature(grid, ball, s)
    qs = quad.restrict(q.samples)
    ps = quad.restrict(p.samples)

    def sq_rows(thetas: np.ndarray) -> np.ndarray:
        lam = np.exp(1j * thetas)[:, None]
        diffs = [lam * u - v for u, v in zip(qs, ps)]
        return quad.sq_norm(diffs)

    thetas = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    values = np.concatenate([sq_rows(thetas[i:i + 512]) for i in range(0, samples, 512)])
    theta, best = _refine_scan(lambda t: float(sq_rows(np.array([t]))[0]), values, thetas)
    return complex(np.exp(1j * theta)), math.sqrt(max(best, 0.0))


# ---------------------------------------------------------------------------
# d^s and variants
# ---------------------------------------------------------------------------

def _y_nodes(grid: Grid1D, y_stride: int) -> Tuple[np.ndarray, float]:
    if y_stride < 1 or grid.n_points % y_stride != 0:
        raise DomainError(f"y_stride must divide N={grid.n_points}, got {y_stride}")
    return np.asarray(grid.x)[::y_stride], grid.spacing * y_stride


def _weighted_alignment_values(q: ComplexField, p: ComplexField, s: float,
                               y: np.ndarray, sqrt_weight: bool,
                               progress: Optional[Callable[[int], None]] = None) -> np.ndarray:
    """min over l of ||w_y (l q - p)||^2_{H^s} for every y node."""
    grid = check_same_grid(q, p)
    hs_w = (1.0 + grid.xi ** 2) ** s
    qa = np.asarray(q.samples, dtype=np.complex128)
    pa = np.asarray(p.samples, dtype=np.complex128)
    out = np.empty(y.shape[0])
    for start in range(0, y.shape[0], _Y_CHUNK):
        ys = y[start:start + _Y_CHUNK]
        w = sech_weight(grid, ys, sqrt_weight=sqrt_weight)
        spec_a = dft_rows(w * qa[None, :], grid)
        spec_b = dft_rows(w * pa[None, :], grid)
        c = np.sum(hs_w[None, :] * spec_a * np.conj(spec_b), axis=1)
        mag = np.abs(c)
        lam = np.where(mag > 0.0, np.conj(c) / np.where(mag > 0.0, mag, 1.0), 1.0 + 0.0j)
        diff = lam[:, None] * spec_a - spec_b
        out[start:start + ys.shape[0]] = np.sum(hs_w[None, :] * (diff.real ** 2 + diff.imag ** 2), axis=1)
        if progress is not None:
            progress(ys.shape[0])
    return out


def _y_description(grid: Grid1D, y_stride: int, count: int, weight: str) -> Dict[str, float]:
    return {"rule": "trapezoid", "count": count, "spacing": grid.spacing * y_stride,
            "weight": weight, "window": min(0.5 * grid.length, SECH_WINDOW)}


def metric_ds(q: ComplexField, p: ComplexField, s: float, y_stride: int = 1,
              progress: Optional[Callable[[int], None]] = None) -> MetricReport:
    """(int inf_l ||sech(y - .)(l q - p)||^2_{H^s} dy)^{1/2}, trapezoid over y-nodes."""
    grid = check_same_grid(q, p)
    y, dy = _y_nodes(grid, y_stride)
    values = _weighted_alignment_values(q, p, s, y, sqrt_weight=False, progress=progress)
    d = math.sqrt(dy * math.fsum(values))
    return MetricReport(s=float(s), d_s=d, length=grid.length, n_points=grid.n_points,
                        y_nodes=_y_description(grid, y_stride, y.shape[0], "sech"))


def metric_ds_tilde(q: ComplexField, p: ComplexField, s: float, y_stride: int = 1) -> float:
    """d^s with sqrt(sech) in place of sech."""
    grid = check_same_grid(q, p)
    y, dy = _y_nodes(grid, y_stride)
    values = _weighted_alignment_values(q, p, s, y, sqrt_weight=True)
    return math.sqrt(dy * math.fsum(values))


def metric_ds_star_ball(q: ComplexField, p: ComplexField, s: float, ball: Ball) -> float:
    """inf over l of ||l q - p||_{W^{s,2}(B)}."""
    if s <= 0.5:
        raise DomainError(f"localized metric needs s > 1/2, got {s}")
    return phase_align_ball(q, p, s, ball)[1]


def metric_ds_ball(q: ComplexField, p: ComplexField, s: float, ball: Ball, y_stride: int = 1) -> float:
    """(int inf_l ||sech(y - .)(l q - p)||^2_{W^{s,2}(B)} dy)^{1/2}."""
    if s <= 0.5:
        raise DomainError(f"localized metric needs s > 1/2, got {s}")
    grid = check_same_grid(q, p)
    y, dy = _y_nodes(grid, y_stride)
    quad = BallQuadrature(grid, ball, s)
    qa = np.asarray(q.samples, dtype=np.complex128)
    pa = np.asarray(p.samples, dtype=np.complex128)
    values: List[float] = []
    for start in range(0, y.shape[0], _Y_CHUNK):
        w = sech_weight(grid, y[start:start + _Y_CHUNK])
        us = quad.restrict(w * qa[None, :])
        vs = quad.restrict(w * pa[None, :])
        c = quad.inner(us, vs)
        mag = np.abs(c)
        lam = np.where(mag > 0.0, np.conj(c) / np.where(mag > 0.0, mag, 1.0), 1.0 + 0.0j)
        diffs = [lam[:, None] * u - v for u, v in zip(us, vs)]
        values.extend(quad.sq_norm(diffs).tolist())
    return math.sqrt(dy * math.fsum(values))


def per_ball_distances(q: ComplexField, p: ComplexField, s: float, radius: float) -> List[Tuple[int, float]]:
    """(k, d^s_*|_{B_k}) for balls of radius R centred at -L/2 + k R."""
    centers = partition_centers(q.grid, radius)
    return [(k, metric_ds_star_ball(q, p, s, Ball(float(c), radius))) for k, c in enumerate(centers)]


def metric_theta(a: HydroState, b: HydroState, s: float) -> float:
    """||rho - eta||_{H^s} + ||v - w||_{H^{s-1}}."""
    if not a.grid.same_as(b.grid):
        raise InvalidGridError("hydrodynamic states live on different grids")
    grid = a.grid
    return (h_s_norm(ComplexField(grid, a.rho - b.rho), s)
            + h_s_norm(ComplexField(grid, a.v - b.v), s - 1.0))


# ---------------------------------------------------------------------------
# probes
# ---------------------------------------------------------------------------

@dataclass
class BilipschitzReport:
    s: float
    energy_cap: float
    accepted: int
    rejected: int
    skipped: int
    max_theta_over_d: float
    min_theta_over_d: float
    max_d_over_theta: float
    min_d_over_theta: float
    histogram: Dict[str, List[float]] = field(default_factory=dict)
    ratios: List[Tuple[float, float]] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "s": self.s, "energy_cap": self.energy_cap, "accepted": self.accepted,
            "rejected": self.rejected, "skipped": self.skipped,
            "max_theta_over_d": self.max_theta_over_d, "min_theta_over_d": self.min_theta_over_d,
            "max_d_over_theta": self.max_d_over_theta, "min_d_over_theta": self.min_d_over_theta,
            "histogram": self.histogram,
        }


def _log_sample(record: dict) -> None:
    logger = get_logger()
    if logger:
        logger.log_sample(record)


def bilipschitz_probe(pairs: Iterable[Tuple[ComplexField, ComplexField]], s: float,
                      energy_cap: float, delta_min: float = DEFAULT_DELTA_MIN,
                      coincidence_tol: float = 1e-13, y_stride: int = 1) -> BilipschitzReport:
    """theta^s / d^s and d^s / theta^s over vacuum-free pairs with energy below the cap."""
    ratios: List[Tuple[float, float]] = []
    rejected = 0
    skipped = 0
    for index, (q, p) in enumerate(pairs):
        try:
            eq = energy_Es(q, 1.0).total
            ep = energy_Es(p, 1.0).total
            if eq >= energy_cap or ep >= energy_cap:
                raise DomainError(f"energy {max(eq, ep):.4f} above cap {energy_cap}")
            a = madelung_forward(q, delta_min)
            b = madelung_forward(p, delta_min)
        except (VacuumError, DomainError) as exc:
            rejected += 1
            _log_sample({"index": index, "status": "rejected", "reason": str(exc)})
            continue
        d = metric_ds(q, p, s, y_stride=y_stride).d_s
        theta = metric_theta(a, b, s)
        if d <= coincidence_tol or theta <= coincidence_tol:
            skipped += 1
            _log_sample({"index": index, "status": "skipped", "d_s": d, "theta_s": theta})
            continue
        ratios.append((theta / d, d / theta))
        _log_sample({"index": index, "status": "success", "d_s": d, "theta_s": theta,
                     "theta_over_d": theta / d})
    histogram: Dict[str, List[float]] = {}
    if ratios:
        logs = np.log10([r[0] for r in ratios])
        counts, edges = np.histogram(logs, bins=min(10, len(ratios)))
        histogram = {"log10_theta_over_d_edges": edges.tolist(), "counts": counts.tolist()}
    nan = math.nan
    return BilipschitzReport(
        s=float(s), energy_cap=float(energy_cap), accepted=len(ratios), rejected=rejected,
        skipped=skipped,
        max_theta_over_d=max((r[0] for r in ratios), default=nan),
        min_theta_over_d=min((r[0] for r in ratios), default=nan),
        max_d_over_theta=max((r[1] for r in ratios), default=nan),
        min_d_over_theta=min((r[1] for r in ratios), default=nan),
        histogram=histogram, ratios=ratios)


def shrinking_family_ratios(state: HydroState, d_rho: np.ndarray, d_v: np.ndarray, s: float,
                            epsilons: Sequence[float] = (1e-2, 1e-3, 1e-4)) -> List[Tuple[float, float, float]]:
    """(eps, theta/d, d/theta) for p_eps = M^-1(rho + eps d_rho, v + eps d_v) against q = M^-1(state)."""
    q = madelung_inverse(state)
    base = madelung_forward(q)
    out = []
    for eps in epsilons:
        moved = HydroState(state.grid, state.rho + eps * d_rho, state.v + eps * d_v)
        p = madelung_inverse(moved)
        d = metric_ds(q, p, s).d_s
        theta = metric_theta(base, madelung_forward(p), s)
        out.append((float(eps), theta / d, d / theta))
    return out


@dataclass
class PhaseExponentialReport:
    s: float
    gamma: float
    max_ratio: float
    ratios: List[float]
    linear_ratios: List[float]
    skipped: int

    def to_dict(self) -> dict:
        return {"s": self.s, "gamma": self.gamma, "max_ratio": self.max_ratio,
                "ratios": self.ratios, "linear_ratios": self.linear_ratios, "skipped": self.skipped}


def phase_exponent(s: float) -> float:
    if s >= 1.0:
        return 2.0 * s - 2.0
    if s <= 0.5:
        raise DomainError(f"phase-exponential estimate needs s > 1/2, got {s}")
    return (1.0 - s) / (s - 0.5)


def phase_exponential_probe(phases: Iterable[np.ndarray], grid: Grid1D, s: float) -> PhaseExponentialReport:
    """||(e^{i phi})'||_{H^{s-1}} / ((1 + ||phi'||_{H^{s-1}})^gamma ||phi'||_{H^{s-1}}) over a family."""
    gamma = phase_exponent(s)
    ratios: List[float] = []
    linear: List[float] = []
    skipped = 0
    for phi in phases:
        phi = np.asarray(phi, dtype=float)
        dphi = spectral_derivative(ComplexField(grid, phi), 1)
        norm_dphi = h_s_norm(dphi, s - 1.0)
        lhs = h_s_norm(spectral_derivative(ComplexField(grid, np.exp(1j * phi)), 1), s - 1.0)
        if norm_dphi == 0.0:
            skipped += 1
            continue
        linear.append(lhs / norm_dphi)
        ratios.append(lhs / ((1.0 + norm_dphi) ** gamma * norm_dphi))
    return PhaseExponentialReport(s=float(s), gamma=gamma, max_ratio=max(ratios, default=math.nan),
                                  ratios=ratios, linear_ratios=linear, skipped=skipped)


@dataclass
class LocalizationReport:
    s: float
    radius: float
    ball_sum: float
    d_s_sq: float
    ratio: float
    degenerate: bool

    def to_dict(self) -> dict:
        return {"s": self.s, "R": self.radius, "ball_sum": self.ball_sum,
                "d_s_sq": self.d_s_sq, "ratio": self.ratio, "degenerate": self.degenerate}


def localization_probe(q: ComplexField, p: ComplexField, s: float, radius: float) -> LocalizationReport:
    """sum_k d^s_*|_{B_k}(q, p)^2 / d^s(q, p)^2."""
    balls = per_ball_distances(q, p, s, radius)
    total = math.fsum(v * v for _, v in balls)
    d_sq = metric_ds(q, p, s).d_s ** 2
    degenerate = d_sq == 0.0
    return LocalizationReport(s=float(s), radius=float(radius), ball_sum=total, d_s_sq=d_sq,
                              ratio=total / d_sq if not degenerate else math.nan, degenerate=degenerate)


def ball_localization_ratio(q: ComplexField, p: ComplexField, s: float, ball: Ball) -> float:
    """d^s_*|_B / d^s|_B for a single ball (nan when both vanish)."""
    local = metric_ds_ball(q, p, s, ball)
    star = metric_ds_star_ball(q, p, s, ball)
    return star / local if local > 0 else math.nan


@dataclass
class EnergyDistanceReport:
    s: float
    max_d_over_sqrt_energy: float
    max_dtilde_over_sqrt_energy: float
    max_energy_over_theta_sq: float
    rows: List[Dict[str, float]]

    def to_dict(self) -> dict:
        return {"s": self.s, "max_d_over_sqrt_energy": self.max_d_over_sqrt_energy,
                "max_dtilde_over_sqrt_energy": self.max_dtilde_over_sqrt_energy,
                "max_energy_over_theta_sq": self.max_energy_over_theta_sq, "rows": self.rows}


def energy_distance_probe(fields: Iterable[Tuple[str, ComplexField]], s: float) -> EnergyDistanceReport:
    """d^s(1, q)/sqrt(E^s), d~^s(1, q)/sqrt(E^s) and E^s / theta^s((1,0), M(q))^2 over a family."""
    rows: List[Dict[str, float]] = []
    for label, q in fields:
        one = ComplexField.constant(q.grid, 1.0)
        energy = energy_Es(q, s).total
        if energy <= 0.0:
            continue
        d = metric_ds(one, q, s).d_s
        dt = metric_ds_tilde(one, q, s)
        row = {"label": label, "energy": energy, "d_s": d, "d_tilde": dt,
               "d_over_sqrt_energy": d / math.sqrt(energy),
               "dtilde_over_sqrt_energy": dt / math.sqrt(energy)}
        if vacuum_scan(q).min_modulus > DEFAULT_DELTA_MIN:
            theta = metric_theta(HydroState.ground(q.grid), madelung_forward(q), s)
            row["theta_s"] = theta
            row["energy_over_theta_sq"] = energy / theta ** 2 if theta > 0 else math.nan
        rows.append(row)
    nan = math.nan
    return EnergyDistanceReport(
        s=float(s),
        max_d_over_sqrt_energy=max((r["d_over_sqrt_energy"] for r in rows), default=nan),
        max_dtilde_over_sqrt_energy=max((r["dtilde_over_sqrt_energy"] for r in rows), default=nan),
        max_energy_over_theta_sq=max((r["energy_over_theta_sq"] for r in rows
                                      if "energy_over_theta_sq" in r), default=nan),
        rows=rows)


def energy_theta_probe(fields: Iterable[Tuple[str, ComplexField]], s: float) -> float:
    """max of E^s(q) / theta^s((1, 0), M(q))^2 over vacuum-free members of a family."""
    ratios: List[float] = []
    for _, q in fields:
        state = madelung_forward(q)
        theta = metric_theta(HydroState.ground(q.grid), state, s)
        if theta <= 0.0:
            continue
        ratios.append(energy_Es(q, s).total / theta ** 2)
    return max(ratios, default=math.nan)
