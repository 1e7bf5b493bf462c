"""Diagonal spectral operators and space-time synthesis.

The flow solved here is i u_t + Delta u = 0 with the positive-Laplacian
convention, so each degree-n coefficient picks up the phase e^{+i lambda_n t},
lambda_n = n(n+d-1).  Because every lambda_n is an integer, solutions are
exactly 2*pi-periodic in time; `propagate` reduces t modulo float64(2*pi)
before forming phases so the discrete flow inherits that periodicity exactly
instead of up to lambda_max * ulp(2*pi).

`SpaceTimeField` holds a solution on a uniform time grid.  It either stores
the explicit spectral history (one coefficient table per time node, the form
the Picard solver manipulates) or is marked as the free evolution of its
initial table, in which case samples at all times are synthesized on demand
by an FFT over the time axis; both representations produce identical sample
values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grids import CoefficientTable, SphereGrid, ZonalGrid, inverse_sht, inverse_zonal
from .harmonics import eigenvalue

__all__ = [
    "TimeGrid",
    "SpaceTimeField",
    "project",
    "propagate",
    "fractional_weight",
    "synthesize_history",
    "synthesize_by_degree",
    "nyquist_time_grid",
    "random_field",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TimeGrid:
    """M uniform time nodes t_j = 2 pi j / M on the periodic interval [0, 2 pi)."""

    M: int

    def __post_init__(self):
        if self.M < 1:
            raise ValueError(f"need at least one time node, got M={self.M}")

    @property
    def dt(self) -> float:
        return _TWO_PI / self.M

    @property
    def times(self) -> np.ndarray:
        return _TWO_PI * np.arange(self.M) / self.M

    def doubled(self) -> "TimeGrid":
        return TimeGrid(2 * self.M)


def nyquist_time_grid(N: int, d: int, margin: int = 4) -> TimeGrid:
    """Default time grid: M = margin * (lambda_N + 1) nodes.

    With the default margin 4 the rectangle rule on this grid integrates
    |u|^q exactly for band-N free evolutions and even q up to 4 (the top
    time frequency of |u|^4 is 2*lambda_N < M).
    """
    lam = int(eigenvalue(N, d))
    return TimeGrid(margin * (lam + 1))


def eigenvalues_upto(N: int, d: int) -> np.ndarray:
    n = np.arange(N + 1)
    return (n * (n + d - 1)).astype(float)


def project(f: CoefficientTable, n: int) -> CoefficientTable:
    """Orthogonal projection onto the degree-n harmonic subspace."""
    if not 0 <= n <= f.N:
        raise ValueError(f"degree {n} outside band [0, {f.N}]")
    out = CoefficientTable.zeros(f.N, f.d, zonal=f.zonal)
    out.a[n] = f.a[n]
    return out


def reduce_time(t: float) -> float:
    """Reduce a time to [0, 2 pi) exactly (fmod is exact in IEEE arithmetic)."""
    tr = math.fmod(float(t), _TWO_PI)
    return tr + _TWO_PI if tr < 0.0 else tr


def propagation_phases(N: int, d: int, t: float) -> np.ndarray:
    """Per-degree phases e^{i lambda_n t}, with t reduced modulo 2 pi first."""
    tr = reduce_time(t)
    return np.exp(1j * eigenvalues_upto(N, d) * tr)


def propagate(f: CoefficientTable, t: float) -> CoefficientTable:
    """Free Schrodinger evolution by time t: degree-n coefficients times e^{i lambda_n t}."""
    phases = propagation_phases(f.N, f.d, t)
    if not f.zonal:
        phases = phases[:, None]
    return CoefficientTable(f.N, f.d, f.a * phases, zonal=f.zonal)


def fractional_weight(f: CoefficientTable, s: float) -> CoefficientTable:
    """Smoothing/roughening multiplier (1+n)^s on degree-n coefficients."""
    w = (1.0 + np.arange(f.N + 1)) ** float(s)
    if not f.zonal:
        w = w[:, None]
    return CoefficientTable(f.N, f.d, f.a * w, zonal=f.zonal)


def synthesize_by_degree(f: CoefficientTable, grid) -> np.ndarray:
    """Sampled per-degree components (H_n f)(z): shape (N+1, *grid.shape)."""
    if f.zonal:
        if not isinstance(grid, ZonalGrid):
            raise ValueError("zonal table needs a zonal grid")
        from .grids import _zonal_tables

        B = _zonal_tables(grid.band, f.N, grid.d)
        return f.a[:, None] * B
    if not isinstance(grid, SphereGrid):
        raise ValueError("full S^2 table needs a sphere grid")
    if f.N > grid.band:
        raise ValueError(f"table band {f.N} exceeds grid band {grid.band}")
    from .grids import _legendre_tables, _m_order_sign

    N = f.N
    K, L = grid.shape
    tables = _legendre_tables(grid.band, N)
    spec = np.zeros((N + 1, K, L), dtype=complex)
    for m in range(N + 1):
        P = tables[m]  # (N+1, K)
        spec[:, :, m % L] += f.a[:, m + N, None] * P
        if m > 0:
            spec[:, :, (-m) % L] += _m_order_sign(-m) * f.a[:, N - m, None] * P
    return np.fft.ifft(spec, axis=2) * L


@dataclass
class SpaceTimeField:
    """Solution samples/history on a time grid x spatial grid.

    Exactly one of the representations is active:
      * `tables` — explicit spectral history, shape (M, *coefficient shape);
      * `free=True` — the field is the free evolution of `base`, and
        histories/samples are generated on demand (memory-light even when
        M * table size would be huge).
    """

    tg: TimeGrid
    grid: object
    base: CoefficientTable
    tables: np.ndarray | None = field(default=None, repr=False)
    free: bool = False

    def __post_init__(self):
        if self.free == (self.tables is not None):
            raise ValueError("exactly one of `tables` / free=True must be set")
        if self.tables is not None:
            expected = (self.tg.M, *self.base.a.shape)
            if self.tables.shape != expected:
                raise ValueError(f"history shape {self.tables.shape} != {expected}")

    @property
    def N(self) -> int:
        return self.base.N

    @property
    def d(self) -> int:
        return self.base.d

    def table_at(self, j: int) -> CoefficientTable:
        if self.free:
            return propagate(self.base, self.tg.times[j])
        return CoefficientTable(self.N, self.d, self.tables[j], zonal=self.base.zonal)

    def materialize(self) -> "SpaceTimeField":
        """Explicit-history copy of this field (intended for modest M * table size)."""
        if not self.free:
            return self
        hist = np.empty((self.tg.M, *self.base.a.shape), dtype=complex)
        lam = eigenvalues_upto(self.N, self.d)
        shape = (-1, 1) if not self.base.zonal else (-1,)
        for j, t in enumerate(self.tg.times):
            hist[j] = self.base.a * np.exp(1j * lam * t).reshape(shape)
        return SpaceTimeField(self.tg, self.grid, self.base.copy(), tables=hist)

    def samples_at(self, j: int) -> np.ndarray:
        tab = self.table_at(j)
        if tab.zonal:
            return inverse_zonal(tab, self.grid)
        return inverse_sht(tab, self.grid)

    def iter_time_blocks(self, block: int = 64):
        """Yield (j0, samples) with samples of shape (b, *grid.shape) from explicit history."""
        for j0 in range(0, self.tg.M, block):
            j1 = min(j0 + block, self.tg.M)
            out = np.empty((j1 - j0, *self.grid.shape), dtype=complex)
            for j in range(j0, j1):
                out[j - j0] = self.samples_at(j)
            yield j0, out

    def iter_space_chunks(self, chunk: int = 1024):
        """Yield (flat z slice, time-series array (M, chunk)) for free-mode fields.

        Synthesis runs one FFT over the time axis per spatial point: the
        per-degree samples E_n(z) are placed in frequency bin lambda_n of a
        length-M spectrum, so the inverse FFT returns the rectangle-rule
        sample values u(t_j, z) exactly (lambda_N < M is required).
        """
        if not self.free:
            raise ValueError("space-chunk iteration requires a free-evolution field")
        M = self.tg.M
        lam = eigenvalues_upto(self.N, self.d).astype(int)
        if lam[-1] >= M:
            raise ValueError(f"time grid too coarse: lambda_N={lam[-1]} >= M={M}")
        E = synthesize_by_degree(self.base, self.grid)
        E = E.reshape(self.N + 1, -1)  # (N+1, n_points)
        npts = E.shape[1]
        for z0 in range(0, npts, chunk):
            z1 = min(z0 + chunk, npts)
            spec = np.zeros((M, z1 - z0), dtype=complex)
            spec[lam] = E[:, z0:z1]
            yield slice(z0, z1), np.fft.ifft(spec, axis=0) * M

    def scaled(self, c: complex) -> "SpaceTimeField":
        if self.free:
            return SpaceTimeField(self.tg, self.grid, self.base * c, free=True)
        return SpaceTimeField(self.tg, self.grid, self.base * c, tables=self.tables * c)

    def __sub__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        if self.tg.M != other.tg.M:
            raise ValueError("mismatched time grids")
        a = self.materialize()
        b = other.materialize()
        return SpaceTimeField(self.tg, self.grid, a.base - b.base,
                              tables=a.tables - b.tables)


def synthesize_history(f: CoefficientTable, tg: TimeGrid, grid) -> SpaceTimeField:
    """Free evolution of f on the given time grid: history[j] = propagate(f, t_j)."""
    if f.N > grid.band:
        raise ValueError(f"table band {f.N} exceeds grid band {grid.band}")
    return SpaceTimeField(tg, grid, f.copy(), free=True)


def random_field(N: int, d: int, rng: np.random.Generator, zonal: bool = False,
                 unit_norm: bool = True) -> CoefficientTable:
    """Random band-limited field with i.i.d. complex gaussian coefficients."""
    if zonal or d != 2:
        a = rng.standard_normal(N + 1) + 1j * rng.standard_normal(N + 1)
        tab = CoefficientTable(N, d, a, zonal=True)
    else:
        tab = CoefficientTable.zeros(N, 2)
        for n in range(N + 1):
            cols = slice(N - n, N + n + 1)
            tab.a[n, cols] = (rng.standard_normal(2 * n + 1)
                              + 1j * rng.standard_normal(2 * n + 1))
    if unit_norm:
        tab.a /= np.linalg.norm(tab.a)
    return tab
