"""Norms: L^p on the sphere, spectral Sobolev, Triebel-Lizorkin-type,
mixed space-time L^p_z(L^q_t), and the exact spectral L^2_t profile.

Degree weights are (1+n)^s throughout (the n=0 mode would otherwise be
annihilated), and the Sobolev norm is the square-summed convention
(sum over n of (1+n)^{2s} ||H_n f||_2^2)^{1/2}.

`mixed_norm` is an honest rectangle-rule time quadrature of samples; its
agreement with `l2t_profile_exact` at q=2 is a verification target, not a
shortcut taken here.  p = infinity is realized as a grid maximum.
"""

from __future__ import annotations

import math

import numpy as np

from .grids import CoefficientTable
from .spectral import SpaceTimeField, synthesize_by_degree

__all__ = [
    "TimeResolutionError",
    "lp_norm",
    "sobolev_norm",
    "triebel_lizorkin_norm",
    "l2t_profile_exact",
    "mixed_norm",
]

_TWO_PI = 2.0 * math.pi


class TimeResolutionError(RuntimeError):
    """Doubling the time grid moved a mixed norm beyond the requested tolerance."""


def lp_norm(values: np.ndarray, grid, p: float) -> float:
    """Quadrature L^p norm of sampled values; p = inf is the max over the grid."""
    values = np.asarray(values)
    if values.shape != grid.shape:
        raise ValueError(f"values shape {values.shape} != grid shape {grid.shape}")
    if p == math.inf:
        return float(np.max(np.abs(values)))
    if not p >= 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    w = grid.weights()
    return float(np.sum(w * np.abs(values) ** p) ** (1.0 / p))


def sobolev_norm(f: CoefficientTable, s: float) -> float:
    """Spectral Sobolev norm (sum_n (1+n)^{2s} ||H_n f||^2)^{1/2}; L^2 at s=0."""
    per_degree = f.degrees_l2()
    w = (1.0 + np.arange(f.N + 1)) ** float(s)
    return float(np.linalg.norm(w * per_degree))


def triebel_lizorkin_norm(f: CoefficientTable, grid, p: float, q: float,
                          r: float) -> float:
    """Outer-L^p norm of the weighted inner ell^q sum of pointwise projections.

    ||f|| = || ( sum_n (1+n)^{rq} |H_n f(z)|^q )^{1/q} ||_{L^p}; the inner sum
    becomes sup_n (1+n)^r |H_n f(z)| for q = inf.  Matches the L^2 norm at
    (p, q, r) = (2, 2, 0).
    """
    E = synthesize_by_degree(f, grid)  # (N+1, *grid.shape)
    w = (1.0 + np.arange(f.N + 1)) ** float(r)
    w = w.reshape((-1,) + (1,) * (E.ndim - 1))
    weighted = w * np.abs(E)
    if q == math.inf:
        inner = np.max(weighted, axis=0)
    else:
        if not q > 0:
            raise ValueError(f"q must be > 0 or inf, got {q}")
        inner = np.sum(weighted ** q, axis=0) ** (1.0 / q)
    return lp_norm(inner, grid, p)


def l2t_profile_exact(f: CoefficientTable, grid) -> np.ndarray:
    """Exact time-L^2 profile of the free evolution, computed spectrally.

    Returns z -> (sum_n 2 pi |H_n f(z)|^2)^{1/2} with no time sampling: the
    cross terms of |u(t,z)|^2 integrate to zero over the period because the
    eigenvalues n(n+d-1) are pairwise distinct.
    """
    E = synthesize_by_degree(f, grid)
    return np.sqrt(_TWO_PI * np.sum(np.abs(E) ** 2, axis=0))


def _profile_from_power_sums(S: np.ndarray, M: int, q: float) -> np.ndarray:
    return (S * (_TWO_PI / M)) ** (1.0 / q)


def _time_power_sums(u: SpaceTimeField, q: float) -> np.ndarray:
    """sum_j |u(t_j, z)|^q accumulated over the time grid, shaped like the grid."""
    S = np.zeros(u.grid.shape)
    if u.free:
        flat = S.reshape(-1)
        for sl, series in u.iter_space_chunks():
            flat[sl] = np.sum(np.abs(series) ** q, axis=0)
    else:
        for _, block in u.iter_time_blocks():
            S += np.sum(np.abs(block) ** q, axis=0)
    return S


def mixed_norm(u: SpaceTimeField, p: float, q: float, *,
               check_resolution: bool = False, rtol: float = 1e-8) -> float:
    """Mixed norm || z -> ||u(., z)||_{L^q_t} ||_{L^p_z}, inner time norm first.

    The inner integral is the rectangle rule on u's time grid (exact for
    trigonometric polynomials resolved by M).  With check_resolution=True
    (free-evolution fields only) the result is recomputed on a doubled time
    grid and a TimeResolutionError is raised if it moves by more than rtol.
    """
    if not q >= 1 or q == math.inf:
        raise ValueError(f"inner exponent must satisfy 1 <= q < inf, got {q}")
    S = _time_power_sums(u, q)
    prof = _profile_from_power_sums(S, u.tg.M, q)
    result = lp_norm(prof, u.grid, p)
    if check_resolution:
        if not u.free:
            raise ValueError("resolution check requires a free-evolution field")
        finer = SpaceTimeField(u.tg.doubled(), u.grid, u.base, free=True)
        S2 = _time_power_sums(finer, q)
        refined = lp_norm(_profile_from_power_sums(S2, finer.tg.M, q), u.grid, p)
        if abs(refined - result) > rtol * max(abs(result), 1e-300):
            raise TimeResolutionError(
                f"mixed norm moved from {result!r} to {refined!r} under time-grid doubling"
            )
    return result
