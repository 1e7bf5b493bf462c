"""Quadrature grids on the sphere and the harmonic analysis/synthesis maps.

Two pipelines:

  * S^2 ("sphere" tables): Gauss-Legendre colatitudes x uniform longitudes,
    full (n, m) coefficient tables, forward/inverse transform by longitude
    FFT + colatitude quadrature against orthonormalized Legendre functions.
  * zonal functions on S^d, d >= 2 ("zonal" tables): Gauss-Jacobi nodes for
    the weight (1-t^2)^((d-2)/2), one coefficient per degree in the
    orthonormal zonal basis.

A grid built with band parameter B integrates products of two band-B fields
exactly: B+1 Gauss colatitudes (exact through polynomial degree 2B+1) and
2B+2 longitudes (alias-free for azimuthal frequencies through 2B+1).
Grids are immutable and cached by their (band, d) key.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

from .harmonics import legendre_column, surface_area, zonal_basis_column

__all__ = [
    "ResourceLimitError",
    "SphereGrid",
    "ZonalGrid",
    "CoefficientTable",
    "max_band_limit",
    "build_sphere_grid",
    "build_zonal_grid",
    "grid_for",
    "forward_sht",
    "inverse_sht",
    "forward_zonal",
    "inverse_zonal",
    "integrate",
    "pole_values",
]

_DEFAULT_MAX_N = 1024


class ResourceLimitError(RuntimeError):
    """Requested band limit exceeds the configured maximum."""


def max_band_limit() -> int:
    """Band-limit cap; override with the SPHERE_STRICHARTZ_MAX_N env var."""
    raw = os.environ.get("SPHERE_STRICHARTZ_MAX_N", "")
    try:
        return int(raw) if raw else _DEFAULT_MAX_N
    except ValueError:
        return _DEFAULT_MAX_N


def _check_band(N: int) -> None:
    if N < 0:
        raise ValueError(f"band limit must be >= 0, got {N}")
    cap = max_band_limit()
    if N > cap:
        raise ResourceLimitError(f"band limit {N} exceeds configured maximum {cap}")


@dataclass(frozen=True)
class SphereGrid:
    """Product quadrature grid on S^2: samples are indexed [colatitude, longitude]."""

    band: int
    t: np.ndarray          # (K,) Gauss-Legendre nodes, cos(colatitude), ascending
    t_weights: np.ndarray  # (K,) Gauss-Legendre weights
    lon_count: int
    d: int = 2

    @property
    def shape(self) -> tuple[int, int]:
        return (self.t.size, self.lon_count)

    @property
    def phi(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.lon_count) / self.lon_count

    def weights(self) -> np.ndarray:
        """Full surface-quadrature weights, shape (K, L)."""
        return np.broadcast_to(
            self.t_weights[:, None] * (2.0 * np.pi / self.lon_count), self.shape
        )


@dataclass(frozen=True)
class ZonalGrid:
    """Gauss-Jacobi grid on (-1, 1) for zonal functions on S^d."""

    band: int
    d: int
    t: np.ndarray          # (K,) nodes, ascending
    t_weights: np.ndarray  # (K,) weights for the measure (1-t^2)^((d-2)/2) dt

    @property
    def shape(self) -> tuple[int]:
        return (self.t.size,)

    def weights(self) -> np.ndarray:
        """Surface-quadrature weights (includes the S^(d-1) area factor)."""
        return self.t_weights * surface_area(self.d - 1)


def build_sphere_grid(N: int) -> SphereGrid:
    """Quadrature grid on S^2 exact for products of two band-N fields."""
    _check_band(N)
    return _build_sphere_grid(N)


@lru_cache(maxsize=None)
def _build_sphere_grid(N: int) -> SphereGrid:
    K = N + 1
    L = 2 * N + 2
    t, w = leggauss(K)
    t.setflags(write=False)
    w.setflags(write=False)
    return SphereGrid(band=N, t=t, t_weights=w, lon_count=L)


def build_zonal_grid(N: int, d: int) -> ZonalGrid:
    """Gauss-Jacobi grid for zonal functions on S^d, exact for band-N products."""
    _check_band(N)
    if d < 2:
        raise ValueError(f"zonal grids need d >= 2, got {d}")
    return _build_zonal_grid(N, d)


@lru_cache(maxsize=None)
def _build_zonal_grid(N: int, d: int) -> ZonalGrid:
    K = N + 1
    a = (d - 2) / 2.0
    if d == 2:
        t, w = leggauss(K)
    else:
        t, w = roots_jacobi(K, a, a)
    t = np.asarray(t, dtype=float)
    w = np.asarray(w, dtype=float)
    t.setflags(write=False)
    w.setflags(write=False)
    return ZonalGrid(band=N, d=d, t=t, t_weights=w)


def grid_for(N: int, d: int, oversample: float = 2.0):
    """Grid able to integrate |f|^2-type products of band-N fields, scaled by `oversample`."""
    band = max(N, math.ceil(oversample * N))
    if d == 2:
        return build_sphere_grid(band)
    return build_zonal_grid(band, d)


@dataclass
class CoefficientTable:
    """Spectral representation of a band-limited field on S^d.

    For d = 2 (`zonal=False`) `a` has shape (N+1, 2N+1) with column index
    m + N and entries zero for |m| > n.  Zonal tables (`zonal=True`, any
    d >= 2) hold one complex coefficient per degree, shape (N+1,).
    Coefficients are taken against the orthonormal basis, so the L^2 norm
    is the plain euclidean norm of `a`.
    """

    N: int
    d: int
    a: np.ndarray = field(repr=False)
    zonal: bool = False

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=complex)
        expected = (self.N + 1,) if self.zonal else (self.N + 1, 2 * self.N + 1)
        if self.a.shape != expected:
            raise ValueError(f"coefficient array shape {self.a.shape} != {expected}")
        if not self.zonal and self.d != 2:
            raise ValueError("full (n, m) tables are only supported for d = 2")
        if not np.all(np.isfinite(self.a.view(float))):
            raise ValueError("coefficients must be finite")

    @classmethod
    def zeros(cls, N: int, d: int, zonal: bool = False) -> "CoefficientTable":
        shape = (N + 1,) if zonal else (N + 1, 2 * N + 1)
        return cls(N=N, d=d, a=np.zeros(shape, dtype=complex), zonal=zonal)

    @classmethod
    def unit_mode(cls, N: int, n: int, m: int = 0, d: int = 2,
                  zonal: bool = False) -> "CoefficientTable":
        """Table holding a single unit coefficient at (n, m) (or degree n, zonal)."""
        out = cls.zeros(N, d, zonal=zonal)
        if zonal:
            out.a[n] = 1.0
        else:
            if abs(m) > n:
                raise ValueError(f"|m| <= n violated: n={n}, m={m}")
            out.a[n, m + N] = 1.0
        return out

    def copy(self) -> "CoefficientTable":
        return CoefficientTable(N=self.N, d=self.d, a=self.a.copy(), zonal=self.zonal)

    def get(self, n: int, m: int = 0) -> complex:
        if self.zonal:
            return complex(self.a[n])
        return complex(self.a[n, m + self.N])

    def degrees_l2(self) -> np.ndarray:
        """Per-degree L^2 norms ||H_n f||, shape (N+1,)."""
        if self.zonal:
            return np.abs(self.a)
        return np.sqrt(np.sum(np.abs(self.a) ** 2, axis=1))

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.a))

    def __add__(self, other: "CoefficientTable") -> "CoefficientTable":
        self._check_compatible(other)
        return CoefficientTable(self.N, self.d, self.a + other.a, self.zonal)

    def __sub__(self, other: "CoefficientTable") -> "CoefficientTable":
        self._check_compatible(other)
        return CoefficientTable(self.N, self.d, self.a - other.a, self.zonal)

    def __mul__(self, c) -> "CoefficientTable":
        return CoefficientTable(self.N, self.d, self.a * c, self.zonal)

    __rmul__ = __mul__

    def _check_compatible(self, other: "CoefficientTable") -> None:
        if (self.N, self.d, self.zonal) != (other.N, other.d, other.zonal):
            raise ValueError("incompatible coefficient tables")


def _m_order_sign(m: int) -> float:
    # basis convention: Y_{n,m} = (-1)^m * Pbar_n^{|m|} * e^{i m phi} for m < 0
    return -1.0 if (m < 0 and m % 2) else 1.0


@lru_cache(maxsize=8)
def _legendre_tables(grid_band: int, N: int) -> tuple:
    """Pbar_n^m at the grid nodes for m = 0..N; entry m has shape (N+1, K)."""
    grid = build_sphere_grid(grid_band)
    return tuple(legendre_column(m, N, grid.t) for m in range(N + 1))


@lru_cache(maxsize=8)
def _zonal_tables(grid_band: int, N: int, d: int) -> np.ndarray:
    grid = build_zonal_grid(grid_band, d)
    return zonal_basis_column(N, d, grid.t)


def forward_sht(values: np.ndarray, grid: SphereGrid, N: int) -> CoefficientTable:
    """Analysis on S^2: coefficients a_{n,m} of `values` against the orthonormal basis.

    Exact for band-limited input when the grid band is >= the input band.
    """
    values = np.asarray(values, dtype=complex)
    if values.shape != grid.shape:
        raise ValueError(f"values shape {values.shape} != grid shape {grid.shape}")
    if N > grid.band:
        raise ValueError(f"band limit {N} exceeds grid band {grid.band}")
    K, L = grid.shape
    # longitude analysis: F[k, m mod L] = (2 pi / L) sum_j values e^{-i m phi_j}
    F = np.fft.fft(values, axis=1) * (2.0 * np.pi / L)
    tables = _legendre_tables(grid.band, N)
    wF = grid.t_weights[:, None] * F
    out = CoefficientTable.zeros(N, 2)
    for m in range(N + 1):
        P = tables[m]  # (N+1, K); rows n < m are identically zero
        out.a[:, m + N] = P @ wF[:, m % L]
        if m > 0:
            out.a[:, N - m] = _m_order_sign(-m) * (P @ wF[:, (-m) % L])
    return out


def inverse_sht(coeffs: CoefficientTable, grid: SphereGrid) -> np.ndarray:
    """Synthesis on S^2: pointwise sum of coefficients times basis functions."""
    if coeffs.zonal:
        raise ValueError("inverse_sht expects a full S^2 table; use inverse_zonal")
    N = coeffs.N
    if N > grid.band:
        raise ValueError(f"table band {N} exceeds grid band {grid.band}")
    K, L = grid.shape
    tables = _legendre_tables(grid.band, N)
    spec = np.zeros((K, L), dtype=complex)
    for m in range(N + 1):
        P = tables[m]
        spec[:, m % L] += coeffs.a[:, m + N] @ P
        if m > 0:
            spec[:, (-m) % L] += _m_order_sign(-m) * (coeffs.a[:, N - m] @ P)
    return np.fft.ifft(spec, axis=1) * L


def forward_zonal(values: np.ndarray, grid: ZonalGrid, N: int) -> CoefficientTable:
    """Analysis of a zonal field against the orthonormal zonal basis."""
    values = np.asarray(values, dtype=complex)
    if values.shape != grid.shape:
        raise ValueError(f"values shape {values.shape} != grid shape {grid.shape}")
    if N > grid.band:
        raise ValueError(f"band limit {N} exceeds grid band {grid.band}")
    B = _zonal_tables(grid.band, N, grid.d)
    a = B @ (grid.weights() * values)
    return CoefficientTable(N=N, d=grid.d, a=a, zonal=True)


def inverse_zonal(coeffs: CoefficientTable, grid: ZonalGrid) -> np.ndarray:
    """Synthesis of a zonal table at the grid nodes."""
    if not coeffs.zonal:
        raise ValueError("inverse_zonal expects a zonal table")
    if coeffs.N > grid.band:
        raise ValueError(f"table band {coeffs.N} exceeds grid band {grid.band}")
    if coeffs.d != grid.d:
        raise ValueError(f"table dimension {coeffs.d} != grid dimension {grid.d}")
    B = _zonal_tables(grid.band, coeffs.N, grid.d)
    return coeffs.a @ B


def integrate(values: np.ndarray, grid) -> complex | float:
    """Surface integral of sampled values by the grid quadrature."""
    values = np.asarray(values)
    if values.shape != grid.shape:
        raise ValueError(f"values shape {values.shape} != grid shape {grid.shape}")
    total = np.sum(grid.weights() * values)
    return float(total.real) if not np.iscomplexobj(values) else complex(total)


def pole_values(coeffs: CoefficientTable) -> np.ndarray:
    """Field values at the two poles t = +1, -1 (only m = 0 modes contribute on S^2)."""
    if coeffs.zonal:
        B = zonal_basis_column(coeffs.N, coeffs.d, np.array([1.0, -1.0]))
        return coeffs.a @ B
    P = legendre_column(0, coeffs.N, np.array([1.0, -1.0]))
    return coeffs.a[:, coeffs.N] @ P
