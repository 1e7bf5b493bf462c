"""Closed-form special functions on the d-sphere.

Laplacian eigenvalues and eigenspace dimensions, orthonormalized associated
Legendre functions (the colatitude factor of spherical harmonics on S^2),
Gegenbauer polynomials, the orthonormal zonal basis for general dimension,
and the degree-n zonal reproducing kernel.

Conventions (used consistently across the package):
  * harmonics are orthonormal: integral of |Y_{n,m}|^2 over S^d is 1,
    so Y_{0,0} = 1/sqrt(4*pi) on S^2;
  * the degree-n eigenvalue of the (positive) sphere Laplacian is n(n+d-1);
  * all recurrences run upward in degree from normalized seeds, which is
    stable for degrees well past 512.

Everything here is a pure function of its arguments; no shared state.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "eigenvalue",
    "eigenspace_dim",
    "surface_area",
    "associated_legendre",
    "legendre_column",
    "gegenbauer",
    "gegenbauer_column",
    "gegenbauer_at_one",
    "zonal_basis",
    "zonal_basis_column",
    "zonal_kernel",
]


def eigenvalue(n: int, d: int) -> float:
    """Laplacian eigenvalue n(n+d-1) of the degree-n harmonic subspace."""
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    if d < 1:
        raise ValueError(f"sphere dimension must be >= 1, got {d}")
    return float(n * (n + d - 1))


def eigenspace_dim(n: int, d: int) -> int:
    """Exact dimension of the space of degree-n spherical harmonics on S^d.

    Counts harmonic homogeneous polynomials of degree n in d+1 variables:
    C(n+d, d) - C(n+d-2, d).  Grows like n^(d-1); equals 2n+1 on S^2.
    """
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    if d < 1:
        raise ValueError(f"sphere dimension must be >= 1, got {d}")
    if n == 0:
        return 1
    if n == 1:
        return d + 1
    return math.comb(n + d, d) - math.comb(n + d - 2, d)


def surface_area(d: int) -> float:
    """Total surface measure of S^d: 2 pi^((d+1)/2) / Gamma((d+1)/2)."""
    if d < 1:
        raise ValueError(f"sphere dimension must be >= 1, got {d}")
    return 2.0 * math.pi ** ((d + 1) / 2.0) / math.gamma((d + 1) / 2.0)


def _check_domain(t: np.ndarray) -> None:
    if np.any(np.abs(t) > 1.0 + 1e-15):
        raise ValueError("argument outside [-1, 1]")


def legendre_column(m: int, n_max: int, t) -> np.ndarray:
    """Orthonormalized associated Legendre values for one order m.

    Returns an array of shape (n_max+1, len(t)); row n holds
    Pbar_n^m(t), zero for n < m.  Pbar is normalized so that
    Y_{n,m}(theta, phi) = Pbar_n^m(cos theta) * exp(i m phi) has unit
    L^2 norm on S^2, i.e. 2*pi * integral of Pbar_n^m(t)^2 dt = 1.
    Includes the Condon-Shortley sign.
    """
    if m < 0:
        raise ValueError(f"order must be >= 0, got {m}")
    if n_max < m:
        raise ValueError(f"n_max={n_max} below order m={m}")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    _check_domain(t)
    out = np.zeros((n_max + 1, t.size))

    # seed Pbar_m^m built multiplicatively to avoid overflow at large m
    seed = np.full(t.size, 1.0 / math.sqrt(4.0 * math.pi))
    if m > 0:
        s = np.sqrt(np.maximum(0.0, 1.0 - t * t))
        for k in range(1, m + 1):
            seed = -math.sqrt((2 * k + 1) / (2.0 * k)) * s * seed
    out[m] = seed
    if n_max == m:
        return out

    out[m + 1] = math.sqrt(2 * m + 3.0) * t * seed
    for n in range(m + 2, n_max + 1):
        a = math.sqrt((4.0 * n * n - 1.0) / (n * n - m * m))
        b = math.sqrt(((n - 1.0) ** 2 - m * m) / (4.0 * (n - 1.0) ** 2 - 1.0))
        out[n] = a * (t * out[n - 1] - b * out[n - 2])
    return out


def _eval_shaped(column_fn, n: int, t):
    """Evaluate row n of a column builder, preserving the input shape."""
    arr = np.asarray(t, dtype=float)
    vals = column_fn(arr.ravel())[n].reshape(arr.shape)
    return float(vals) if arr.ndim == 0 else vals


def associated_legendre(n: int, m: int, t):
    """Orthonormalized associated Legendre function Pbar_n^m(t).

    Requires 0 <= m <= n and |t| <= 1; accepts scalars or arrays.
    """
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got n={n}, m={m}")
    return _eval_shaped(lambda x: legendre_column(m, n, x), n, t)


def gegenbauer_column(n_max: int, alpha: float, t) -> np.ndarray:
    """Gegenbauer polynomials C_n^alpha(t) for n = 0..n_max, shape (n_max+1, len(t))."""
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    _check_domain(t)
    out = np.zeros((n_max + 1, t.size))
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 2.0 * alpha * t
    for n in range(2, n_max + 1):
        out[n] = (2.0 * (n + alpha - 1.0) * t * out[n - 1]
                  - (n + 2.0 * alpha - 2.0) * out[n - 2]) / n
    return out


def gegenbauer(n: int, alpha: float, t):
    """Gegenbauer polynomial C_n^alpha(t); C_0 = 1, C_1 = 2*alpha*t."""
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    return _eval_shaped(lambda x: gegenbauer_column(n, alpha, x), n, t)


def gegenbauer_at_one(n: int, alpha: float) -> float:
    """C_n^alpha(1) = Gamma(n+2*alpha) / (Gamma(2*alpha) n!), computed in logs."""
    if n == 0:
        return 1.0
    return math.exp(math.lgamma(n + 2.0 * alpha) - math.lgamma(2.0 * alpha)
                    - math.lgamma(n + 1.0))


def _zonal_norm_const(n: int, d: int) -> float:
    """Normalizer c so that c*C_n^alpha has unit L^2(S^d) norm as a zonal function.

    Uses the Gegenbauer weighted-L^2 norm
    integral of C_n^alpha(t)^2 (1-t^2)^(alpha-1/2) dt
      = pi 2^(1-2 alpha) Gamma(n+2 alpha) / ((n+alpha) Gamma(alpha)^2 n!)
    with alpha = (d-1)/2, together with the S^(d-1) area factor.
    """
    alpha = (d - 1) / 2.0
    log_h = (math.log(math.pi) + (1.0 - 2.0 * alpha) * math.log(2.0)
             + math.lgamma(n + 2.0 * alpha) - math.log(n + alpha)
             - 2.0 * math.lgamma(alpha) - math.lgamma(n + 1.0))
    return math.exp(-0.5 * (log_h + math.log(surface_area(d - 1))))


def zonal_basis_column(n_max: int, d: int, t) -> np.ndarray:
    """Orthonormal zonal basis values, shape (n_max+1, len(t)).

    Row n is the degree-n zonal harmonic as a function of t = x . pole,
    normalized to unit L^2(S^d) norm.  For d = 2 this reduces to the
    orthonormalized Legendre column (m = 0).
    """
    if d < 2:
        raise ValueError(f"zonal basis needs d >= 2, got {d}")
    cols = gegenbauer_column(n_max, (d - 1) / 2.0, t)
    scale = np.array([_zonal_norm_const(n, d) for n in range(n_max + 1)])
    return cols * scale[:, None]


def zonal_basis(n: int, d: int, t):
    """Unit-L^2 zonal harmonic of degree n on S^d, as a function of t = cos(angle)."""
    return _eval_shaped(lambda x: zonal_basis_column(n, d, x), n, t)


def zonal_kernel(n: int, d: int, t):
    """Reproducing kernel of the degree-n harmonic subspace.

    Z_n^d(x . y) = (dim/area) * C_n^alpha(t)/C_n^alpha(1) with alpha = (d-1)/2;
    integrating Z_n^d(x . y) f(y) over S^d projects band-limited f onto
    degree n.  Uses the exact eigenspace dimension so the reproducing
    identity holds without asymptotic slack.
    """
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    if d < 2:
        raise ValueError(f"zonal kernel needs d >= 2, got {d}")
    alpha = (d - 1) / 2.0
    scale = eigenspace_dim(n, d) / surface_area(d) / gegenbauer_at_one(n, alpha)
    out = _eval_shaped(lambda x: gegenbauer_column(n, alpha, x), n, t)
    return scale * out
