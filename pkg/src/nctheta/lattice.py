"""Truncated Gaussian lattice sums with certified tails.

Every infinite sum in the package is a sum over w in Z^n of terms whose
modulus is dominated by ``exp(log_peak) * prod_i h(|w_i - k0_i|)`` for a
log-concave one-dimensional majorant ``h``.  For such a majorant the part of
the sum outside the box ``|w - k0|_inf <= R`` is at most

    exp(log_peak) * n * S**(n-1) * T(R),     S = h(0) + 2 sum_{j>=1} h(j),
                                             T(R) = 2 sum_{j>R} h(j),

and the one-dimensional sums are bounded by an explicit partial sum plus a
geometric remainder (log-concavity makes the term ratio nonincreasing).
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import NotPositiveReal, TruncationOverflow

DEFAULT_TOL = 1e-12
MAX_RADIUS = 200
MAX_TERMS = 4_000_000
# fraction of the smallest eigenvalue actually used in the bound
EIG_SAFETY = 0.9

LogMajorant = Callable[[int], float]


def _log_tail(logh: LogMajorant, start: int) -> float:
    """log of an upper bound for sum_{j >= start} h(j)."""
    logs = []
    j = start
    while True:
        a, b = logh(j), logh(j + 1)
        logs.append(a)
        if b < a:
            log_ratio = b - a
            # remaining terms j+1, j+2, ... are bounded by h(j+1) / (1 - ratio)
            if b - max(logs) < -40.0 or j - start > 400:
                logs.append(b - math.log1p(-math.exp(log_ratio)))
                break
        j += 1
        if j - start > 10_000:
            raise TruncationOverflow("majorant does not decay")
    top = max(logs)
    return top + math.log(sum(math.exp(v - top) for v in logs))


def tail_bound(logh: LogMajorant, n: int, R: int, log_peak: float = 0.0) -> float:
    """Bound on the sum of the terms outside the box of radius R."""
    log_s = math.log(math.exp(logh(0)) + 2.0 * math.exp(_log_tail(logh, 1)))
    log_t = math.log(2.0) + _log_tail(logh, R + 1)
    return math.exp(log_peak + math.log(n) + (n - 1) * log_s + log_t)


def choose_radius(logh: LogMajorant, n: int, tol: float, log_peak: float = 0.0,
                  max_radius: int = MAX_RADIUS, max_terms: int = MAX_TERMS) -> int:
    """Smallest R whose certified tail is <= tol."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    for R in range(max_radius + 1):
        if (2 * R + 1) ** n > max_terms:
            break
        if tail_bound(logh, n, R, log_peak) <= tol:
            return R
    raise TruncationOverflow(
        f"no truncation radius <= {max_radius} certifies tail <= {tol:g}")


def gaussian_majorant(lam: float) -> LogMajorant:
    """h(j) = exp(-pi lam max(j - 1/2, 0)^2): distance from a real center to
    integers at offset j from the nearest integer."""
    def logh(j: int) -> float:
        d = max(j - 0.5, 0.0)
        return -math.pi * lam * d * d
    return logh


def fourier_majorant(lam: float, growth: float) -> LogMajorant:
    """h(j) = exp(-pi lam j^2 + 2 pi growth j) for series coefficients weighted
    by the largest plane-wave modulus on |Im z_i| <= growth."""
    def logh(j: int) -> float:
        return -math.pi * lam * j * j + 2.0 * math.pi * growth * j
    return logh


def min_eig(P: np.ndarray) -> float:
    P = np.asarray(P, dtype=float)
    return float(np.linalg.eigvalsh(0.5 * (P + P.T))[0])


def box(center: np.ndarray, R: int) -> np.ndarray:
    """Integer points with |w - center|_inf <= R, in lexicographic order."""
    center = np.asarray(center, dtype=np.int64)
    n = center.shape[0]
    side = np.arange(-R, R + 1, dtype=np.int64)
    grids = np.meshgrid(*([side] * n), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1) if n else np.zeros((1, 0), np.int64)
    return pts + center


def fsum_complex(values) -> complex:
    """Correctly rounded sum (math.fsum) of real and imaginary parts."""
    values = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(values.real.tolist()), math.fsum(values.imag.tolist()))


def gaussian_envelope(M: np.ndarray, shift: np.ndarray, v: np.ndarray | None = None):
    """Center and log-peak of |exp(-pi (w+s)^T M (w+s) + 2 pi i (w+s)^T v)|.

    Returns ``(center, log_peak, lam)`` where ``center`` is the real point in
    w-space at which the modulus peaks, ``log_peak`` the log of the peak
    modulus and ``lam`` the smallest eigenvalue of Re M.
    """
    M = np.asarray(M, dtype=complex)
    s = np.asarray(shift, dtype=complex)
    P, B = M.real, M.imag
    lam = min_eig(P)
    if not lam > 0:
        raise NotPositiveReal("real part of the quadratic form is not positive definite")
    const = 0.0
    if v is not None:
        v = np.asarray(v, dtype=complex)
        Minv_v = np.linalg.solve(M, v)
        s = s - 1j * Minv_v
        const = float((-math.pi * (v @ Minv_v)).real)
    p, q = s.real, s.imag
    Bq = B @ q
    y_star = np.linalg.solve(P, Bq)
    center = y_star - p
    log_peak = math.pi * float(q @ P @ q + Bq @ y_star) + const
    return center, log_peak, lam


def gaussian_lattice_sum(M: np.ndarray, shift: np.ndarray, v: np.ndarray | None = None,
                         tol: float = DEFAULT_TOL, max_radius: int = MAX_RADIUS,
                         mask: Callable[[np.ndarray], np.ndarray] | None = None):
    """Sum over w in Z^n of exp(-pi (w+s)^T M (w+s) + 2 pi i (w+s)^T v).

    M must be complex symmetric with positive-definite real part.  If ``mask``
    is given only the lattice points it accepts are summed (the tail bound of
    the full sum still applies).  Returns ``(value, radius)``.
    """
    M = np.asarray(M, dtype=complex)
    s = np.asarray(shift, dtype=complex)
    n = M.shape[0]
    center, log_peak, lam = gaussian_envelope(M, s, v)
    R = choose_radius(gaussian_majorant(EIG_SAFETY * lam), n, tol, log_peak, max_radius)
    pts = box(np.rint(center), R)
    if mask is not None:
        pts = pts[mask(pts)]
    if pts.shape[0] == 0:
        return 0j, R
    y = pts + s
    expo = -math.pi * np.einsum("ki,ij,kj->k", y, M, y)
    if v is not None:
        expo = expo + 2j * math.pi * (y @ np.asarray(v, dtype=complex))
    return fsum_complex(np.exp(expo)), R
