"""Periodic grid, discrete Fourier transforms, spectral derivatives and Sobolev-type norms.

DFT convention: ``f_hat = sqrt(h) * fft(f, norm="ortho")`` so that
``sum |f_hat_k|^2 == h * sum |f_j|^2`` (discrete surrogate of the L^2 integral).
Grid nodes are ``x_j = -L/2 + j h`` for ``j = 0..N-1``; ``x_{N/2} = 0``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.fft as sfft

from ..common.utils import fft_workers, pool_size
from ..core.errors import DomainError, InvalidGridError, NumericError


ArrayLike = Union[np.ndarray, Sequence[complex]]

# row chunk for batched pairwise sums
_PAIR_CHUNK = 256


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid on [-L/2, L/2) with its discrete frequency set."""

    length: float
    n_points: int

    def __post_init__(self):
        if not isinstance(self.n_points, (int, np.integer)) or not _is_power_of_two(int(self.n_points)):
            raise InvalidGridError(f"n_points must be a power of two >= 2, got {self.n_points!r}")
        if not (math.isfinite(self.length) and self.length > 0):
            raise InvalidGridError(f"length must be positive and finite, got {self.length!r}")
        object.__setattr__(self, "n_points", int(self.n_points))
        object.__setattr__(self, "length", float(self.length))

    @property
    def spacing(self) -> float:
        return self.length / self.n_points

    @property
    def h(self) -> float:
        return self.spacing

    @cached_property
    def x(self) -> np.ndarray:
        nodes = -0.5 * self.length + self.spacing * np.arange(self.n_points)
        nodes.flags.writeable = False
        return nodes

    @cached_property
    def xi(self) -> np.ndarray:
        """Frequencies 2*pi*k/L in FFT order (k = 0..N/2-1, -N/2..-1)."""
        freqs = 2.0 * np.pi * sfft.fftfreq(self.n_points, d=self.spacing)
        freqs.flags.writeable = False
        return freqs

    @cached_property
    def xi_real(self) -> np.ndarray:
        """Non-negative frequencies matching ``rfft`` output."""
        freqs = 2.0 * np.pi * sfft.rfftfreq(self.n_points, d=self.spacing)
        freqs.flags.writeable = False
        return freqs

    @property
    def xi_max(self) -> float:
        return np.pi * self.n_points / self.length

    @property
    def nyquist_index(self) -> int:
        return self.n_points // 2

    @property
    def origin_index(self) -> int:
        return self.n_points // 2

    def frequency(self, k: int) -> float:
        return 2.0 * np.pi * k / self.length

    def same_as(self, other: "Grid1D") -> bool:
        return self.n_points == other.n_points and math.isclose(
            self.length, other.length, rel_tol=1e-14, abs_tol=0.0)

    def periodic_offset(self, center: float) -> np.ndarray:
        """Signed offset x - center reduced into [-L/2, L/2)."""
        half = 0.5 * self.length
        return np.mod(self.x - center + half, self.length) - half


def check_same_grid(*fields: "ComplexField") -> Grid1D:
    grid = fields[0].grid
    for other in fields[1:]:
        if not grid.same_as(other.grid):
            raise InvalidGridError(
                f"grid mismatch: (L={grid.length}, N={grid.n_points}) vs "
                f"(L={other.grid.length}, N={other.grid.n_points})")
    return grid


def _require_finite(samples: np.ndarray, what: str = "samples") -> None:
    if not np.all(np.isfinite(samples)):
        bad = int(np.flatnonzero(~np.isfinite(samples))[0])
        raise NumericError(f"non-finite {what} at index {bad}")


@dataclass(frozen=True)
class ComplexField:
    """Grid samples q_j of a (possibly complex) function.

    Real input stays real so that real-valued fields keep exactly real derivatives.
    """

    grid: Grid1D
    samples: np.ndarray

    def __post_init__(self):
        data = np.array(self.samples, copy=True)
        if np.iscomplexobj(data):
            data = data.astype(np.complex128)
        else:
            data = data.astype(np.float64)
        if data.ndim != 1 or data.shape[0] != self.grid.n_points:
            raise InvalidGridError(
                f"samples length {data.shape} does not match grid n_points={self.grid.n_points}")
        _require_finite(data)
        data.flags.writeable = False
        object.__setattr__(self, "samples", data)

    @classmethod
    def constant(cls, grid: Grid1D, value: complex = 1.0) -> "ComplexField":
        dtype = np.complex128 if isinstance(value, complex) else np.float64
        return cls(grid, np.full(grid.n_points, value, dtype=dtype))

    @classmethod
    def from_function(cls, grid: Grid1D, fn: Callable[[np.ndarray], np.ndarray]) -> "ComplexField":
        return cls(grid, fn(np.asarray(grid.x)))

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.samples) or not np.any(self.samples.imag)

    def with_samples(self, samples: ArrayLike) -> "ComplexField":
        return ComplexField(self.grid, np.asarray(samples))

    def modulus(self) -> np.ndarray:
        return np.abs(self.samples)

    def modulus_squared(self) -> np.ndarray:
        s = self.samples
        if np.iscomplexobj(s):
            return s.real * s.real + s.imag * s.imag
        return s * s

    def __add__(self, other: "ComplexField") -> "ComplexField":
        check_same_grid(self, other)
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other: "ComplexField") -> "ComplexField":
        check_same_grid(self, other)
        return self.with_samples(self.samples - other.samples)

    def __mul__(self, scalar: complex) -> "ComplexField":
        return self.with_samples(self.samples * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class Ball:
    """Interval [center - R, center + R) on the periodic line."""

    center: float
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise DomainError(f"ball radius must be positive, got {self.radius!r}")
        if not math.isfinite(self.center):
            raise DomainError(f"ball center must be finite, got {self.center!r}")


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

def dft(field: ComplexField) -> np.ndarray:
    """Spectrum with the Plancherel-consistent scaling sqrt(h) * ortho FFT."""
    return math.sqrt(field.grid.spacing) * sfft.fft(field.samples, norm="ortho", workers=fft_workers())


def idft(spectrum: np.ndarray, grid: Grid1D) -> ComplexField:
    spectrum = np.asarray(spectrum)
    if spectrum.ndim != 1 or spectrum.shape[0] != grid.n_points:
        raise InvalidGridError(
            f"spectrum length {spectrum.shape} does not match grid n_points={grid.n_points}")
    samples = sfft.ifft(spectrum / math.sqrt(grid.spacing), norm="ortho", workers=fft_workers())
    return ComplexField(grid, samples)


def dft_rows(rows: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Batched ``dft`` along the last axis."""
    return math.sqrt(grid.spacing) * sfft.fft(rows, axis=-1, norm="ortho", workers=fft_workers())


def fourier_multiplier(field: ComplexField, symbol: Callable[[np.ndarray], np.ndarray],
                       zero_nyquist: bool = False) -> ComplexField:
    """Apply m(xi) to the field. For real fields m must satisfy m(-xi) = conj(m(xi))."""
    grid = field.grid
    workers = fft_workers()
    if field.is_real:
        samples = np.real(field.samples)
        mult = np.asarray(symbol(grid.xi_real), dtype=np.complex128)
        if zero_nyquist:
            mult = mult.copy()
            mult[-1] = 0.0
        out = sfft.irfft(mult * sfft.rfft(samples, workers=workers), n=grid.n_points, workers=workers)
        return ComplexField(grid, out)
    mult = np.asarray(symbol(grid.xi), dtype=np.complex128)
    if zero_nyquist:
        mult = mult.copy()
        mult[grid.nyquist_index] = 0.0
    out = sfft.ifft(mult * sfft.fft(field.samples, workers=workers), workers=workers)
    return ComplexField(grid, out)


def derivative_symbol(order: int) -> Callable[[np.ndarray], np.ndarray]:
    return lambda xi: (1j * xi) ** order


def spectral_derivative(field: ComplexField, order: int = 1) -> ComplexField:
    """Multiplier (i xi)^order; the Nyquist mode is dropped for odd orders."""
    if isinstance(order, bool) or not isinstance(order, (int, np.integer)) or order < 1:
        raise DomainError(f"derivative order must be a positive integer, got {order!r}")
    return fourier_multiplier(field, derivative_symbol(int(order)), zero_nyquist=(order % 2 == 1))


def derivative_rows(rows: np.ndarray, grid: Grid1D, order: int) -> np.ndarray:
    """Batched spectral derivative along the last axis (complex rows)."""
    if order == 0:
        return rows
    mult = (1j * grid.xi) ** order
    if order % 2 == 1:
        mult[grid.nyquist_index] = 0.0
    workers = fft_workers()
    return sfft.ifft(mult * sfft.fft(rows, axis=-1, workers=workers), axis=-1, workers=workers)


def periodic_trapezoid(values: np.ndarray, grid: Grid1D) -> float:
    """Trapezoid rule over one period (equals h * sum for periodic data)."""
    return float(grid.spacing * np.sum(values))


def dealiased_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pointwise product evaluated on a 3/2 zero-padded grid and truncated back."""
    n = a.shape[-1]
    m = 3 * n // 2
    half = n // 2
    workers = fft_workers()
    real_out = not np.iscomplexobj(a) and not np.iscomplexobj(b)

    def _pad(u: np.ndarray) -> np.ndarray:
        spec = sfft.fft(u, workers=workers)
        padded = np.zeros(m, dtype=np.complex128)
        padded[:half] = spec[:half]
        padded[m - half:] = spec[n - half:]
        return sfft.ifft(padded, workers=workers) * (m / n)

    prod = _pad(a) * _pad(b)
    spec = sfft.fft(prod, workers=workers)
    trunc = np.empty(n, dtype=np.complex128)
    trunc[:half] = spec[:half]
    trunc[n - half:] = spec[m - half:]
    out = sfft.ifft(trunc, workers=workers) * (n / m)
    return out.real if real_out else out


# ---------------------------------------------------------------------------
# Sobolev norms via Fourier multipliers
# ---------------------------------------------------------------------------

def _hs_weight(grid: Grid1D, s: float) -> np.ndarray:
    return (1.0 + grid.xi * grid.xi) ** s


def _hdot_weight(grid: Grid1D, s: float) -> np.ndarray:
    weight = np.zeros(grid.n_points)
    nonzero = grid.xi != 0.0
    weight[nonzero] = np.abs(grid.xi[nonzero]) ** (2.0 * s)
    return weight


def _check_index(s: float) -> float:
    if not math.isfinite(s):
        raise DomainError(f"Sobolev index must be finite, got {s!r}")
    return float(s)


def h_s_inner(f: ComplexField, g: ComplexField, s: float) -> complex:
    """<f, g>_{H^s} = sum <xi>^{2s} f_hat conj(g_hat); linear in f."""
    grid = check_same_grid(f, g)
    s = _check_index(s)
    _require_finite(f.samples)
    _require_finite(g.samples)
    return complex(np.sum(_hs_weight(grid, s) * dft(f) * np.conj(dft(g))))


def h_s_norm(field: ComplexField, s: float) -> float:
    s = _check_index(s)
    _require_finite(field.samples)
    spec = dft(field)
    return math.sqrt(float(np.sum(_hs_weight(field.grid, s) * (spec.real ** 2 + spec.imag ** 2))))


def hdot_s_norm(field: ComplexField, s: float) -> float:
    """Homogeneous norm; the zero mode never contributes."""
    s = _check_index(s)
    _require_finite(field.samples)
    spec = dft(field)
    return math.sqrt(float(np.sum(_hdot_weight(field.grid, s) * (spec.real ** 2 + spec.imag ** 2))))


def l2_norm(field: ComplexField) -> float:
    return math.sqrt(field.grid.spacing * float(np.sum(field.modulus_squared())))


def linf_norm(field: ComplexField) -> float:
    return float(np.max(np.abs(field.samples)))


# ---------------------------------------------------------------------------
# Sobolev-Slobodeckij norms on balls
# ---------------------------------------------------------------------------

def split_index(s: float) -> Tuple[int, float]:
    """s = m + alpha with integer m >= 0 and alpha in [0, 1)."""
    if not math.isfinite(s) or s < 0:
        raise DomainError(f"W^(s,2) index must be finite and >= 0, got {s!r}")
    m = int(math.floor(s))
    alpha = s - m
    if alpha < 1e-12:
        alpha = 0.0
    elif alpha > 1.0 - 1e-12:
        m, alpha = m + 1, 0.0
    return m, alpha


def _check_ball_fits(grid: Grid1D, ball: Ball, tol: float) -> None:
    if 2.0 * ball.radius > grid.length + tol:
        raise DomainError(
            f"ball of radius {ball.radius} does not fit in the period L={grid.length}")


def ball_cells(grid: Grid1D, ball: Ball) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Indices, offsets and quadrature weights of the grid cells [t - h/2, t + h/2] meeting the ball.

    Each weight is the length of the cell clipped to [c - r, c + r], so the weights sum to 2r.
    A ball covering the whole period keeps every cell at full weight h.
    """
    h = grid.spacing
    tol = 1e-9 * h
    _check_ball_fits(grid, ball, tol)
    offset = grid.periodic_offset(ball.center)
    if 2.0 * ball.radius >= grid.length - tol:
        idx = np.argsort(offset, kind="stable")
        return idx, offset[idx], np.full(idx.size, h)
    lo = np.maximum(offset - 0.5 * h, -ball.radius)
    hi = np.minimum(offset + 0.5 * h, ball.radius)
    weight = hi - lo
    idx = np.flatnonzero(weight > tol)
    if idx.size == 0:
        raise DomainError(f"ball {ball} contains no grid points")
    idx = idx[np.argsort(offset[idx], kind="stable")]
    return idx, offset[idx], weight[idx]


def _cell_moment(k: np.ndarray, p: float) -> np.ndarray:
    """int over [0,1] x [k,k+1] of |x - y|^p: a second difference of |k|^(p+2) / ((p+1)(p+2))."""
    k = np.asarray(k, dtype=float)
    q = p + 2.0
    return (np.abs(k + 1.0) ** q - 2.0 * np.abs(k) ** q + np.abs(k - 1.0) ** q) / ((p + 1.0) * q)


def _gagliardo_kernel(t: np.ndarray, w: np.ndarray, alpha: float, h: float,
                      rows: slice = slice(None)) -> np.ndarray:
    """Off-diagonal Gagliardo weights w_i w_j c_k / |t_i - t_j|^(1+2 alpha).

    c_k corrects the midpoint rule on cell pairs k cells apart so that
    (u_i - u_j)^2 ~ |u'|^2 |t_i - t_j|^2 integrates exactly against |x - y|^(1 - 2 alpha).
    """
    p = 1.0 - 2.0 * alpha
    dist = np.abs(t[rows, None] - t[None, :])
    k = np.rint(dist / h)
    off_diag = k >= 1.0
    kernel = np.zeros_like(dist)
    kk = k[off_diag]
    factor = _cell_moment(kk, p) / kk ** p
    kernel[off_diag] = (w[rows, None] * w[None, :])[off_diag] * factor * dist[off_diag] ** (-(1.0 + 2.0 * alpha))
    return kernel


def _diagonal_weights(w: np.ndarray, alpha: float) -> np.ndarray:
    """Weight of |u'_i|^2 for the singular self-cell integral over a cell of width w_i."""
    p = 1.0 - 2.0 * alpha
    return float(_cell_moment(np.zeros(1), p)[0]) * w ** (p + 2.0)


def _local_gradient(u: np.ndarray, t: np.ndarray) -> np.ndarray:
    if t.size < 2:
        return np.zeros_like(u)
    return np.gradient(u, t, axis=-1)


def _gagliardo_pairwise(u: np.ndarray, v: np.ndarray, t: np.ndarray, w: np.ndarray, alpha: float,
                        h: float) -> complex:
    """Double sum of K_ij (u_i-u_j) conj(v_i-v_j) plus the self-cell terms, chunked over rows."""
    partial: List[float] = []
    partial_im: List[float] = []
    n = u.shape[0]
    for start in range(0, n, _PAIR_CHUNK):
        stop = min(start + _PAIR_CHUNK, n)
        rows = slice(start, stop)
        du = u[rows, None] - u[None, :]
        dv = v[rows, None] - v[None, :]
        term = _gagliardo_kernel(t, w, alpha, h, rows) * du * np.conj(dv)
        partial.append(float(np.sum(term.real)))
        partial_im.append(float(np.sum(term.imag)))
    self_cells = np.sum(_diagonal_weights(w, alpha) * _local_gradient(u, t) * np.conj(_local_gradient(v, t)))
    partial.append(float(self_cells.real))
    partial_im.append(float(self_cells.imag))
    return complex(math.fsum(partial), math.fsum(partial_im))


def _restricted_derivatives(field: ComplexField, idx: np.ndarray, m: int) -> List[np.ndarray]:
    arrays = [np.asarray(field.samples)[idx].astype(np.complex128)]
    for k in range(1, m + 1):
        arrays.append(np.asarray(spectral_derivative(field, k).samples)[idx].astype(np.complex128))
    return arrays


def w_s2_ball_inner(f: ComplexField, g: ComplexField, ball: Ball, s: float) -> complex:
    """Bilinear form of W^{s,2}(B): L^2 parts up to order m plus the Gagliardo form of the m-th derivative."""
    grid = check_same_grid(f, g)
    m, alpha = split_index(s)
    idx, t, w = ball_cells(grid, ball)
    fs = _restricted_derivatives(f, idx, m)
    gs = _restricted_derivatives(g, idx, m)
    total = complex(0.0)
    for uf, ug in zip(fs, gs):
        total += complex(np.sum(w * uf * np.conj(ug)))
    if alpha > 0.0:
        total += _gagliardo_pairwise(fs[m], gs[m], t, w, alpha, grid.spacing)
    return total


def w_s2_ball_norm(field: ComplexField, ball: Ball, s: float) -> float:
    """Sobolev-Slobodeckij norm on a ball; derivatives are global spectral ones restricted to B."""
    return math.sqrt(max(w_s2_ball_inner(field, field, ball, s).real, 0.0))


@dataclass
class BallQuadrature:
    """Precomputed W^{s,2}(B) quadrature for batched evaluation over many rows."""

    grid: Grid1D
    ball: Ball
    s: float

    def __post_init__(self):
        self.m, self.alpha = split_index(self.s)
        self.indices, self.offsets, self.weights = ball_cells(self.grid, self.ball)
        self.kernel: Optional[np.ndarray] = None
        self.kernel_rows: Optional[np.ndarray] = None
        self.self_weights: Optional[np.ndarray] = None
        if self.alpha > 0.0:
            self.kernel = _gagliardo_kernel(self.offsets, self.weights, self.alpha, self.grid.spacing)
            self.kernel_rows = self.kernel.sum(axis=1)
            self.self_weights = _diagonal_weights(self.weights, self.alpha)

    def restrict(self, rows: np.ndarray) -> List[np.ndarray]:
        """Derivatives of order 0..m of each row, restricted to the ball."""
        rows = np.atleast_2d(np.asarray(rows, dtype=np.complex128))
        return [derivative_rows(rows, self.grid, k)[:, self.indices] for k in range(self.m + 1)]

    def inner(self, us: List[np.ndarray], vs: List[np.ndarray]) -> np.ndarray:
        total = np.zeros(us[0].shape[0], dtype=np.complex128)
        for u, v in zip(us, vs):
            total += np.sum(self.weights * u * np.conj(v), axis=1)
        if self.kernel is not None:
            u, v = us[self.m], vs[self.m]
            diag = (u * np.conj(v)) @ self.kernel_rows
            cross = np.sum(u * (np.conj(v) @ self.kernel), axis=1)
            total += 2.0 * (diag - cross)
            du = _local_gradient(u, self.offsets)
            dv = _local_gradient(v, self.offsets)
            total += (du * np.conj(dv)) @ self.self_weights
        return total

    def sq_norm(self, us: List[np.ndarray]) -> np.ndarray:
        return np.maximum(self.inner(us, us).real, 0.0)


# ---------------------------------------------------------------------------
# partition probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PartitionProbeReport:
    s: float
    radius: float
    hs_norm_sq: float
    small_ball_sum: float
    large_ball_sum: float
    lower_ratio: float
    upper_ratio: float
    degenerate: bool

    def to_dict(self) -> dict:
        return {
            "s": self.s, "R": self.radius, "hs_norm_sq": self.hs_norm_sq,
            "small_ball_sum": self.small_ball_sum, "large_ball_sum": self.large_ball_sum,
            "lower_ratio": self.lower_ratio, "upper_ratio": self.upper_ratio,
            "degenerate": self.degenerate,
        }


def partition_centers(grid: Grid1D, radius: float) -> np.ndarray:
    count = grid.length / radius
    n_balls = int(round(count))
    if n_balls < 1 or abs(count - n_balls) > 1e-9 * max(count, 1.0):
        raise DomainError(f"L={grid.length} must be an integer multiple of R={radius}")
    return -0.5 * grid.length + radius * np.arange(n_balls)


def ball_sum(field: ComplexField, s: float, radius: float, centers: np.ndarray) -> float:
    """sum_k ||f||^2_{W^{s,2}(B(c_k, radius))}, evaluated per ball in a thread pool."""
    balls = [Ball(float(c), radius) for c in centers]
    with ThreadPoolExecutor(max_workers=pool_size()) as pool:
        values = list(pool.map(lambda b: w_s2_ball_norm(field, b, s) ** 2, balls))
    return math.fsum(values)


def partition_norm_equivalence_probe(field: ComplexField, s: float, radius: float) -> PartitionProbeReport:
    """Compare ||f||^2_{H^s} with sums over tiling balls (radius R/2) and covering balls (radius R)."""
    grid = field.grid
    centers = partition_centers(grid, radius)
    hs_sq = h_s_norm(field, s) ** 2
    small = ball_sum(field, s, 0.5 * radius, centers)
    large = ball_sum(field, s, radius, centers)
    degenerate = hs_sq == 0.0 or large == 0.0
    lower = small / hs_sq if hs_sq > 0.0 else float("nan")
    upper = hs_sq / large if large > 0.0 else float("nan")
    return PartitionProbeReport(
        s=float(s), radius=float(radius), hs_norm_sq=hs_sq, small_ball_sum=small,
        large_ball_sum=large, lower_ratio=lower, upper_ratio=upper, degenerate=degenerate)
