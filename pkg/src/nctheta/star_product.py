"""Moyal star products of Fourier series.

On plane waves exp(2 pi i a.z) the Moyal product

    (f * g)(z) = f(z) exp(-(i/4pi) <-d theta ->d) g(z)

acts by the phase exp(i pi a^T theta b), so finite Fourier series are closed
under it.  :func:`star_fourier` uses that rule; :func:`moyal_oracle`
evaluates the truncated bidifferential series directly and is only used to
cross-check it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch
from .lattice import DEFAULT_TOL, EIG_SAFETY, box, choose_radius, fourier_majorant, fsum_complex, min_eig
from .linalg_core import CosetIndex, IntSymMatrix, SkewMatrix
from .reports import CheckReport
from .theta_eval import _log_det_from_identity, coset_vector, compute_M, difference

__all__ = [
    "FourierPolynomial",
    "StarConfig",
    "plane_wave_phase",
    "star_fourier",
    "moyal_oracle",
    "truncate_theta_series",
    "star_theta_eval",
    "random_fourier",
    "star_consistency_check",
]

PRUNE_RTOL = 1e-16


class FourierPolynomial:
    """Finite sum of coefficient * exp(2 pi i (m + offset)^T z) over integer m.

    Frequencies are stored as integer vectors sorted lexicographically plus a
    common rational offset; zero coefficients are dropped.
    """

    __slots__ = ("_freqs", "_coeffs", "_offset")

    def __init__(self, freqs, coeffs, offset: Sequence[Fraction] | None = None, n: int | None = None):
        freqs = np.asarray(freqs, dtype=np.int64)
        coeffs = np.asarray(coeffs, dtype=complex).ravel()
        if freqs.size == 0:
            if n is None:
                n = 0 if offset is None else len(offset)
            freqs = freqs.reshape(0, n)
        else:
            freqs = freqs.reshape(coeffs.shape[0], -1)
        n = freqs.shape[1]
        keep = coeffs != 0
        freqs, coeffs = freqs[keep], coeffs[keep]
        if freqs.shape[0]:
            uniq, inv = np.unique(freqs, axis=0, return_inverse=True)
            if uniq.shape[0] != freqs.shape[0]:
                raise ValueError("duplicate frequencies")
            order = np.lexsort(freqs.T[::-1])
            freqs, coeffs = freqs[order], coeffs[order]
        self._freqs = freqs
        self._coeffs = coeffs
        self._freqs.setflags(write=False)
        self._coeffs.setflags(write=False)
        self._offset = tuple(Fraction(x) for x in (offset if offset is not None else (0,) * n))
        if len(self._offset) != n:
            raise DimensionMismatch("offset length does not match frequency dimension")

    @classmethod
    def from_terms(cls, terms: Mapping[tuple[int, ...], complex], n: int,
                   offset: Sequence[Fraction] | None = None) -> "FourierPolynomial":
        keys = list(terms)
        return cls(np.array(keys, dtype=np.int64).reshape(len(keys), n),
                   np.array([terms[k] for k in keys], dtype=complex), offset, n=n)

    @classmethod
    def plane_wave(cls, a: Sequence[int], coeff: complex = 1.0) -> "FourierPolynomial":
        return cls(np.array([list(a)], dtype=np.int64), np.array([coeff], dtype=complex))

    @property
    def n(self) -> int:
        return self._freqs.shape[1]

    @property
    def freqs(self) -> np.ndarray:
        return self._freqs

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def offset(self) -> tuple[Fraction, ...]:
        return self._offset

    def real_freqs(self) -> np.ndarray:
        return self._freqs + np.array([float(x) for x in self._offset])

    @property
    def terms(self) -> dict[tuple[int, ...], complex]:
        return {tuple(int(v) for v in f): complex(c) for f, c in zip(self._freqs, self._coeffs)}

    def __len__(self):
        return self._coeffs.shape[0]

    def __call__(self, z) -> complex:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if z.shape != (self.n,):
            raise DimensionMismatch(f"z must have length {self.n}")
        if not len(self):
            return 0j
        return fsum_complex(self._coeffs * np.exp(2j * math.pi * (self.real_freqs() @ z)))

    def weighted_norm(self, growth: float = 1.0) -> float:
        """sum |c_m| exp(2 pi growth |m|_1): a bound for |f| on |Im z_i| <= growth."""
        if not len(self):
            return 0.0
        l1 = np.abs(self.real_freqs()).sum(axis=1)
        return float(np.sum(np.abs(self._coeffs) * np.exp(2 * math.pi * growth * l1)))

    def __repr__(self):
        return f"FourierPolynomial(n={self.n}, terms={len(self)})"


@dataclass(frozen=True)
class StarConfig:
    theta: SkewMatrix
    oracle_order: int = 12
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.oracle_order < 0:
            raise ValueError("oracle_order must be nonnegative")


def plane_wave_phase(a, b, theta: SkewMatrix) -> complex:
    """exp(i pi a^T theta b)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return complex(np.exp(1j * math.pi * (a @ theta.array @ b)))


def _combine(freqs: np.ndarray, coeffs: np.ndarray, n: int):
    if freqs.shape[0] == 0:
        return freqs.reshape(0, n), coeffs
    order = np.lexsort(freqs.T[::-1])
    freqs, coeffs = freqs[order], coeffs[order]
    new = np.ones(freqs.shape[0], dtype=bool)
    new[1:] = np.any(freqs[1:] != freqs[:-1], axis=1)
    starts = np.flatnonzero(new)
    return freqs[starts], np.add.reduceat(coeffs, starts)


def star_fourier(f: FourierPolynomial, g: FourierPolynomial, theta: SkewMatrix,
                 prune_rtol: float | None = None) -> FourierPolynomial:
    """Termwise Moyal product: (a, alpha) * (b, beta) -> (a + b, alpha beta exp(i pi a^T th b)).

    With ``prune_rtol`` set, terms whose sup norm on |Im z_i| <= 1 falls below
    prune_rtol times the largest such norm are dropped.
    """
    if f.n != g.n or theta.n != f.n:
        raise DimensionMismatch(f"dimensions {f.n}, {g.n}, theta {theta.n}")
    n = f.n
    offset = tuple(x + y for x, y in zip(f.offset, g.offset))
    if not len(f) or not len(g):
        return FourierPolynomial(np.zeros((0, n)), np.zeros(0), offset, n=n)
    phase = np.exp(1j * math.pi * (f.real_freqs() @ theta.array @ g.real_freqs().T))
    coeffs = (np.outer(f.coeffs, g.coeffs) * phase).ravel()
    freqs = (f.freqs[:, None, :] + g.freqs[None, :, :]).reshape(-1, n)
    freqs, coeffs = _combine(freqs, coeffs, n)
    if prune_rtol is not None and coeffs.size:
        # a plane wave of frequency a reaches exp(2 pi |a|_1) on |Im z_i| <= 1
        real = freqs + np.array([float(x) for x in offset])
        weight = np.abs(coeffs) * np.exp(2 * math.pi * np.abs(real).sum(axis=1))
        keep = weight > prune_rtol * np.max(weight)
        freqs, coeffs = freqs[keep], coeffs[keep]
    return FourierPolynomial(freqs, coeffs, offset, n=n)


def _derivative_tensor(f: FourierPolynomial, z: np.ndarray, k: int) -> np.ndarray:
    """Tensor of all k-th partial derivatives of f at z, shape (n,)*k."""
    n = f.n
    a = f.real_freqs()
    # d/dz_i acts on a plane wave as multiplication by 2 pi i a_i
    da = 2j * math.pi * a
    T = f.coeffs * np.exp(2j * math.pi * (a @ z))  # axis 0 runs over terms
    for _ in range(k):
        T = T[..., None] * da.reshape((da.shape[0],) + (1,) * (T.ndim - 1) + (n,))
    return T.sum(axis=0)


def moyal_oracle(f: FourierPolynomial, g: FourierPolynomial, z, cfg: StarConfig) -> complex:
    """Truncated bidifferential series

        sum_{k <= order} (1/k!) (-i/4pi)^k  sum D^k_{i1..ik} f  theta^{i1 j1}..theta^{ik jk} D^k_{j1..jk} g

    evaluated at z from explicit derivative tensors.
    """
    if f.n != g.n or cfg.theta.n != f.n:
        raise DimensionMismatch("dimension mismatch")
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    th = cfg.theta.array
    total = 0j
    for k in range(cfg.oracle_order + 1):
        Df = _derivative_tensor(f, z, k)
        Dg = _derivative_tensor(g, z, k)
        for axis in range(k):
            # contract axis of Df with the first index of theta, putting the result back in place
            Df = np.moveaxis(np.tensordot(Df, th, axes=([axis], [0])), -1, axis)
        contraction = complex(np.sum(Df * Dg))
        total += (-1j / (4 * math.pi)) ** k / math.factorial(k) * contraction
        if cfg.theta.is_zero():
            break
    return total


def _series_prefactor(A_a: IntSymMatrix, A_b: IntSymMatrix, theta: SkewMatrix) -> complex:
    A = A_b - A_a
    pref = 1.0 + 0j
    if not theta.is_zero():
        th = theta.array
        pref = np.exp(0.25 * _log_det_from_identity(1j * A_a.to_float() @ th)
                      + 0.25 * _log_det_from_identity(1j * A_b.to_float() @ th))
    return complex(pref) / math.sqrt(A.det())


@lru_cache(maxsize=256)
def _theta_series(A_a: IntSymMatrix, A_b: IntSymMatrix, mu: tuple[int, ...],
                  theta: SkewMatrix, tol: float) -> FourierPolynomial:
    A = difference(A_a, A_b)
    M = compute_M(A_a, A_b, theta)
    Minv = np.linalg.inv(M)
    Minv = 0.5 * (Minv + Minv.T)
    pref = _series_prefactor(A_a, A_b, theta)
    lam = EIG_SAFETY * min_eig(Minv.real)
    R = choose_radius(fourier_majorant(lam, 1.0), A.n, tol, math.log(abs(pref)))
    m = box(np.zeros(A.n), R)
    c2 = -(A.inverse_float() @ np.asarray(mu, dtype=float))
    quad = np.einsum("ki,ij,kj->k", m, Minv, m)
    coeffs = pref * np.exp(-math.pi * quad + 2j * math.pi * (m @ c2))
    return FourierPolynomial(m, coeffs)


def truncate_theta_series(A_a: IntSymMatrix, A_b: IntSymMatrix, mu, theta: SkewMatrix,
                          tol: float = DEFAULT_TOL) -> FourierPolynomial:
    """Fourier expansion of e_ab^mu truncated so the dropped tail is <= tol on |Im z_i| <= 1.

    Coefficient of exp(2 pi i m.z):
        det(1+iA_a th)^{1/4} det(1+iA_b th)^{1/4} det(A_ab)^{-1/2}
            * exp(-pi m^T M_ab^{-1} m - 2 pi i m^T A_ab^{-1} mu).
    """
    A = difference(A_a, A_b)
    mu = tuple(int(v) for v in coset_vector(A, mu))
    return _theta_series(A_a, A_b, mu, theta, float(tol))


@lru_cache(maxsize=256)
def _star_series(A_a, A_b, A_c, mu, nu, theta, tol) -> FourierPolynomial:
    # two passes: the second sizes each factor's tail against the other's norm
    f = truncate_theta_series(A_a, A_b, mu, theta, tol)
    g = truncate_theta_series(A_b, A_c, nu, theta, tol)
    scale = 2.0 * max(f.weighted_norm(), g.weighted_norm(), 1.0)
    if scale > 1.0:
        f = truncate_theta_series(A_a, A_b, mu, theta, tol / scale)
        g = truncate_theta_series(A_b, A_c, nu, theta, tol / scale)
    return star_fourier(f, g, theta, prune_rtol=PRUNE_RTOL)


def star_theta_eval(A_a: IntSymMatrix, A_b: IntSymMatrix, A_c: IntSymMatrix, mu, nu, z,
                    theta: SkewMatrix, tol: float = DEFAULT_TOL) -> complex:
    """(e_ab^mu * e_bc^nu)(z) from the star product of the truncated theta series."""
    mu = tuple(int(v) for v in coset_vector(difference(A_a, A_b), mu))
    nu = tuple(int(v) for v in coset_vector(difference(A_b, A_c), nu))
    return _star_series(A_a, A_b, A_c, mu, nu, theta, float(tol))(z)


def random_fourier(rng: np.random.Generator, n: int, terms: int, max_freq: int = 3) -> FourierPolynomial:
    """``terms`` distinct random frequencies in [-max_freq, max_freq]^n with decaying random coefficients."""
    pool = box(np.zeros(n), max_freq)
    if terms > len(pool):
        raise ValueError("not enough distinct frequencies")
    freqs = pool[rng.choice(len(pool), size=terms, replace=False)]
    decay = np.exp(-0.5 * np.abs(freqs).sum(axis=1))
    coeffs = decay * (rng.normal(size=terms) + 1j * rng.normal(size=terms))
    return FourierPolynomial(freqs, coeffs)


def _random_skew(rng: np.random.Generator, n: int, size: float) -> SkewMatrix:
    T = np.triu(rng.uniform(-size, size, size=(n, n)), 1)
    return SkewMatrix(T - T.T)


def star_consistency_check(n: int = 2, terms: int = 25, pairs: int = 10, points: int = 20,
                           max_theta: float = 0.01, seed=0, tol: float = 1e-9,
                           phase_tol: float = 1e-12):
    """star_fourier against moyal_oracle (order 12) on random series with at most
    ``terms`` frequencies in [-3, 3]^n, plus the commutation phase
    (a * b) / (b * a) = exp(2 pi i a^T theta b) on plane waves.

    The oracle is a truncated power series in theta, so theta entries are drawn
    from [-max_theta, max_theta] and z from the real strip |Im z_i| <= 0.1,
    where order 12 is far below ``tol``.
    """
    rng = np.random.default_rng(seed)
    terms = min(terms, 7 ** n)  # distinct frequencies in [-3, 3]^n
    worst = worst_phase = 0.0
    for _ in range(pairs):
        theta = _random_skew(rng, n, max_theta)
        f, g = random_fourier(rng, n, terms), random_fourier(rng, n, terms)
        fg = star_fourier(f, g, theta)
        cfg = StarConfig(theta)
        for _ in range(points):
            z = rng.uniform(-1, 1, size=n) + 1j * rng.uniform(-0.1, 0.1, size=n)
            exact, oracle = fg(z), moyal_oracle(f, g, z, cfg)
            worst = max(worst, abs(exact - oracle) / max(abs(exact), 1.0))
        th = _random_skew(rng, n, 1.0)  # the phase rule is exact, any size of theta
        a, b = rng.integers(-5, 6, size=n), rng.integers(-5, 6, size=n)
        pa, pb = FourierPolynomial.plane_wave(a), FourierPolynomial.plane_wave(b)
        ab, ba = star_fourier(pa, pb, th), star_fourier(pb, pa, th)
        ratio = ab.coeffs[0] / ba.coeffs[0]
        want = np.exp(2j * math.pi * (a @ th.array @ b))
        worst_phase = max(worst_phase, float(abs(ratio - want)))
    passed = worst <= tol and worst_phase <= phase_tol
    return CheckReport("star", worst, tol, bool(passed),
                       {"phase_error": worst_phase, "phase_tol": phase_tol,
                        "pairs": pairs, "terms": terms})
