"""Littlewood-Paley blocks, Besov norms, Bony paraproducts and product-estimate probes.

Cutoff profile: ``step(t) = g(t) / (g(t) + g(1 - t))`` with ``g(t) = exp(-1/t)`` for ``t > 0``
(``g = 0`` otherwise); ``chi(xi) = 1 - step((|xi| - 3/4) / (4/3 - 3/4))`` and
``phi(xi) = chi(xi / 2) - chi(xi)``. The partial sums telescope:
``chi(xi) + sum_{j<=J} phi(2^-j xi) = chi(2^-(J+1) xi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.fft as sfft

from ..core.errors import DomainError, DyadicIndexError, InvalidGridError
from .spectral_core import (
    ComplexField,
    Grid1D,
    check_same_grid,
    dealiased_product,
    fourier_multiplier,
    h_s_norm,
    l2_norm,
    linf_norm,
    spectral_derivative,
)


CHI_INNER = 0.75
CHI_OUTER = 4.0 / 3.0


def _g(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t, dtype=float)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    a = _g(t)
    b = _g(1.0 - t)
    return a / (a + b)


def chi(xi: np.ndarray) -> np.ndarray:
    """Low-frequency cutoff: 1 on |xi| <= 3/4, 0 on |xi| >= 4/3."""
    r = np.abs(np.asarray(xi, dtype=float))
    return 1.0 - smooth_step((r - CHI_INNER) / (CHI_OUTER - CHI_INNER))


def phi(xi: np.ndarray) -> np.ndarray:
    """Annulus bump supported in 3/4 < |xi| < 8/3."""
    xi = np.asarray(xi, dtype=float)
    return chi(0.5 * xi) - chi(xi)


def required_j_max(xi_max: float) -> int:
    """Smallest J with chi(2^-(J+1) xi) = 1 for all |xi| <= xi_max."""
    j = 0
    while CHI_INNER * 2.0 ** (j + 1) < xi_max:
        j += 1
    return j


@dataclass(frozen=True)
class DyadicPartition:
    """chi/phi pair with the dyadic range resolved by a grid."""

    j_max: int

    @classmethod
    def for_grid(cls, grid: Grid1D) -> "DyadicPartition":
        return cls(j_max=required_j_max(grid.xi_max))

    def symbol(self, j: int):
        """Multiplier of Delta_j (j = -1 is the chi block)."""
        self._check_block(j)
        if j == -1:
            return chi
        scale = 2.0 ** (-j)
        return lambda xi: phi(scale * xi)

    def low_pass_symbol(self, j: int):
        """Multiplier of S_j = sum_{j' < j} Delta_j'."""
        if j <= -1:
            return lambda xi: np.zeros_like(np.asarray(xi, dtype=float))
        scale = 2.0 ** (-j)
        return lambda xi: chi(scale * xi)

    def _check_block(self, j: int) -> None:
        if j < -1 or j > self.j_max:
            raise DyadicIndexError(f"dyadic block index {j} outside [-1, {self.j_max}]")

    @property
    def levels(self) -> List[int]:
        return list(range(-1, self.j_max + 1))

    def residual(self, xi: np.ndarray) -> float:
        """max |chi + sum phi(2^-j .) - 1| over the given frequencies."""
        total = chi(xi)
        for j in range(0, self.j_max + 1):
            total = total + phi(2.0 ** (-j) * xi)
        return float(np.max(np.abs(total - 1.0)))


@dataclass(frozen=True)
class DyadicDecomposition:
    source: ComplexField
    partition: DyadicPartition
    blocks: Tuple[ComplexField, ...]

    def block(self, j: int) -> ComplexField:
        self.partition._check_block(j)
        return self.blocks[j + 1]

    def reconstruct(self) -> ComplexField:
        total = np.zeros_like(self.blocks[0].samples)
        for b in self.blocks:
            total = total + b.samples
        return self.source.with_samples(total)

    def partial_sum(self, j: int) -> np.ndarray:
        """S_j as a sum of blocks (zero for j <= -1)."""
        total = np.zeros_like(self.blocks[0].samples)
        for level in range(-1, min(j, self.partition.j_max + 1)):
            total = total + self.blocks[level + 1].samples
        return total


def _partition_for(field: ComplexField) -> DyadicPartition:
    partition = DyadicPartition.for_grid(field.grid)
    if partition.j_max < 3:
        raise InvalidGridError(
            f"grid resolves only j_max={partition.j_max}; need N/L large enough for j_max >= 3")
    return partition


def decompose(field: ComplexField) -> DyadicDecomposition:
    partition = _partition_for(field)
    blocks = tuple(fourier_multiplier(field, partition.symbol(j)) for j in partition.levels)
    return DyadicDecomposition(source=field, partition=partition, blocks=blocks)


def low_pass(field: ComplexField, j: int) -> ComplexField:
    """S_j f; S_{j_max + 1} f = f."""
    partition = _partition_for(field)
    if j < -1 or j > partition.j_max + 1:
        raise DyadicIndexError(f"low-pass index {j} outside [-1, {partition.j_max + 1}]")
    return fourier_multiplier(field, partition.low_pass_symbol(j))


def _lp_norm(samples: np.ndarray, h: float, p: float) -> float:
    mod = np.abs(samples)
    if p == 1:
        return float(h * np.sum(mod))
    if p == 2:
        return math.sqrt(float(h * np.sum(mod * mod)))
    return float(np.max(mod))


def _lr_sum(values: Sequence[float], r: float) -> float:
    arr = np.asarray(values, dtype=float)
    if r == 1:
        return math.fsum(arr)
    if r == 2:
        return math.sqrt(math.fsum(arr * arr))
    return float(np.max(arr))


_SUPPORTED_EXPONENTS = (1, 2, math.inf)


def besov_norm(field: ComplexField, s: float, p: float = 2, r: float = 2,
               decomposition: Optional[DyadicDecomposition] = None) -> float:
    """l^r over j of 2^{js} ||Delta_j f||_{L^p}, p, r in {1, 2, inf}."""
    if p not in _SUPPORTED_EXPONENTS or r not in _SUPPORTED_EXPONENTS:
        raise DomainError(f"unsupported Besov exponents p={p!r}, r={r!r}; use 1, 2 or inf")
    dec = decomposition if decomposition is not None else decompose(field)
    h = field.grid.spacing
    terms = [2.0 ** (j * s) * _lp_norm(dec.block(j).samples, h, p) for j in dec.partition.levels]
    return _lr_sum(terms, r)


@dataclass(frozen=True)
class BonyParts:
    paraproduct_fg: ComplexField
    remainder: ComplexField
    paraproduct_gf: ComplexField

    def total(self) -> ComplexField:
        return self.paraproduct_fg.with_samples(
            self.paraproduct_fg.samples + self.remainder.samples + self.paraproduct_gf.samples)


def _paraproduct(dec_f: DyadicDecomposition, dec_g: DyadicDecomposition) -> np.ndarray:
    total = np.zeros(dec_f.source.grid.n_points, dtype=np.complex128)
    for j in dec_g.partition.levels:
        low = dec_f.partial_sum(j - 1)
        if not np.any(low):
            continue
        total = total + dealiased_product(low.astype(np.complex128), dec_g.block(j).samples.astype(np.complex128))
    return total


def bony_decompose(f: ComplexField, g: ComplexField) -> BonyParts:
    """f g = T_f g + R(f, g) + T_g f with 3/2-padded block products."""
    check_same_grid(f, g)
    dec_f = decompose(f)
    dec_g = decompose(g)
    levels = dec_f.partition.levels
    remainder = np.zeros(f.grid.n_points, dtype=np.complex128)
    for j in levels:
        gj = dec_g.block(j).samples.astype(np.complex128)
        for nu in (-1, 0, 1):
            k = j + nu
            if k < -1 or k > dec_f.partition.j_max:
                continue
            remainder = remainder + dealiased_product(dec_f.block(k).samples.astype(np.complex128), gj)
    real = f.is_real and g.is_real

    def _wrap(arr: np.ndarray) -> ComplexField:
        return f.with_samples(arr.real if real else arr)

    return BonyParts(
        paraproduct_fg=_wrap(_paraproduct(dec_f, dec_g)),
        remainder=_wrap(remainder),
        paraproduct_gf=_wrap(_paraproduct(dec_g, dec_f)),
    )


# ---------------------------------------------------------------------------
# product estimate probe
# ---------------------------------------------------------------------------

def random_probe_field(grid: Grid1D, s: float, rng: np.random.Generator,
                       envelope_width: Optional[float] = None,
                       band_modes: Optional[int] = None) -> np.ndarray:
    """Smooth decaying real field: band-limited Gaussian spectrum with <xi>^-(s+1) decay times a Gaussian envelope.

    Modes |k| < band_modes (default N/8) are drawn in a fixed order, so the same seed and band give the
    same continuum field on any N that resolves the band.
    """
    n = grid.n_points
    m = band_modes if band_modes is not None else n // 8
    if m < 1 or m > n // 2:
        raise DomainError(f"band_modes must lie in [1, N/2], got {m}")
    k = np.arange(-(m - 1), m)
    coeffs = rng.standard_normal(k.size) + 1j * rng.standard_normal(k.size)
    spectrum = np.zeros(n, dtype=np.complex128)
    xi = 2.0 * np.pi * k / grid.length
    spectrum[k % n] = coeffs * (1.0 + xi ** 2) ** (-(s + 1.0) / 2.0)
    raw = sfft.ifft(spectrum).real
    scale = np.max(np.abs(raw))
    raw = raw / scale if scale > 0 else raw
    width = envelope_width if envelope_width is not None else grid.length / 12.0
    return raw * np.exp(-0.5 * (np.asarray(grid.x) / width) ** 2)


@dataclass
class ProductProbeReport:
    s: float
    samples: int
    seed: int
    max_ratio_eq13: float
    max_ratio_eq14: float
    skipped: int = 0
    ratios_eq13: List[float] = field(default_factory=list, repr=False)
    ratios_eq14: List[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> Dict[str, float]:
        return {
            "s": self.s, "samples": self.samples, "seed": self.seed,
            "max_ratio_eq13": self.max_ratio_eq13, "max_ratio_eq14": self.max_ratio_eq14,
            "skipped": self.skipped,
        }


def product_ratios(f: ComplexField, g: ComplexField, s: float) -> Tuple[Optional[float], Optional[float]]:
    """LHS/RHS of the H^s and H^{s-1} product estimates; None when both sides vanish."""
    check_same_grid(f, g)
    fg = f.with_samples(dealiased_product(f.samples, g.samples))
    f_factor = linf_norm(f) + h_s_norm(spectral_derivative(f, 1), s - 1.0)
    rhs_hs = h_s_norm(g, s) * f_factor
    rhs_low = h_s_norm(g, s - 1.0) * f_factor
    lhs_hs = h_s_norm(fg, s)
    lhs_low = h_s_norm(fg, s - 1.0)
    r_hs = lhs_hs / rhs_hs if rhs_hs > 0 else None
    r_low = lhs_low / rhs_low if rhs_low > 0 else None
    return r_hs, r_low


def product_estimate_probe(samples: int, s: float, grid: Grid1D, seed: int = 0,
                           band_modes: Optional[int] = None) -> ProductProbeReport:
    """Max over random (f, g) pairs of both product-estimate ratios; sample i uses seed + i."""
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples}")
    if s <= 0.5:
        raise DomainError(f"product estimates need s > 1/2, got {s}")
    hs_ratios: List[float] = []
    low_ratios: List[float] = []
    skipped = 0
    for i in range(samples):
        rng = np.random.default_rng(seed + i)
        f = ComplexField(grid, random_probe_field(grid, s, rng, band_modes=band_modes))
        g = ComplexField(grid, random_probe_field(grid, s, rng, band_modes=band_modes))
        r_hs, r_low = product_ratios(f, g, s)
        if r_hs is None or r_low is None:
            skipped += 1
            continue
        hs_ratios.append(r_hs)
        low_ratios.append(r_low)
    return ProductProbeReport(
        s=float(s), samples=samples, seed=seed,
        max_ratio_eq13=max(hs_ratios) if hs_ratios else float("nan"),
        max_ratio_eq14=max(low_ratios) if low_ratios else float("nan"),
        skipped=skipped, ratios_eq13=hs_ratios, ratios_eq14=low_ratios)


def bony_residual(f: ComplexField, g: ComplexField) -> float:
    """Relative L^2 gap between T_f g + R(f, g) + T_g f and the pointwise product f g.

    The pointwise product is exact only when f g is resolved by the grid, so callers pass band-limited pairs.
    """
    product = f.with_samples(np.asarray(f.samples) * np.asarray(g.samples))
    scale = l2_norm(product)
    gap = l2_norm(bony_decompose(f, g).total() - product)
    return gap / scale if scale > 0 else gap


# ---------------------------------------------------------------------------
# B^s_{2,2} vs H^s
# ---------------------------------------------------------------------------

def besov_hs_bounds(s: float) -> Tuple[float, float]:
    """Bounds on ||f||_{B^s_{2,2}} / ||f||_{H^s} for s >= 0.

    At most two blocks overlap, so sum_j psi_j^2 lies in [1/2, 1]; on the support of Delta_j the weight
    2^{js} / <xi>^s lies in ((3/10)^s, (4/3)^s).
    """
    if not math.isfinite(s) or s < 0:
        raise DomainError(f"B^s_22 / H^s bounds need finite s >= 0, got {s!r}")
    return 0.3 ** s / math.sqrt(2.0), (4.0 / 3.0) ** s


@dataclass
class BesovEquivalenceReport:
    s: float
    samples: int
    seed: int
    min_ratio: float
    max_ratio: float
    lower_bound: float
    upper_bound: float

    @property
    def within_bounds(self) -> bool:
        return self.lower_bound <= self.min_ratio and self.max_ratio <= self.upper_bound

    def to_dict(self) -> Dict[str, float]:
        return {
            "s": self.s, "samples": self.samples, "seed": self.seed,
            "min_ratio": self.min_ratio, "max_ratio": self.max_ratio,
            "lower_bound": self.lower_bound, "upper_bound": self.upper_bound,
        }


def besov_equivalence(samples: int, s: float, grid: Grid1D, seed: int = 0,
                      band_modes: Optional[int] = None) -> BesovEquivalenceReport:
    """min / max of B^s_{2,2} / H^s over seeded complex random fields; sample i uses seed + i."""
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples}")
    lower, upper = besov_hs_bounds(s)
    ratios: List[float] = []
    for i in range(samples):
        rng = np.random.default_rng(seed + i)
        f = ComplexField(grid, random_probe_field(grid, s, rng, band_modes=band_modes)
                         + 1j * random_probe_field(grid, s, rng, band_modes=band_modes))
        ratios.append(besov_norm(f, s, 2, 2) / h_s_norm(f, s))
    return BesovEquivalenceReport(s=float(s), samples=samples, seed=seed, min_ratio=min(ratios),
                                  max_ratio=max(ratios), lower_bound=lower, upper_bound=upper)
