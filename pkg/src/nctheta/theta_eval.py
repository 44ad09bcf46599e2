"""Theta functions with characteristics and the basis functions e_ab^mu.

All evaluators are truncated Gaussian lattice sums (see :mod:`nctheta.lattice`)
whose omitted tail is bounded by ``tol`` in absolute value.  Pass
``full_output=True`` to also get the truncation radius that was used.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import (
    IndexModulusMismatch,
    NotCompatible,
    NotPositiveDefinite,
    NotPositiveReal,
    NotSiegel,
    SingularDeformation,
)
from .lattice import DEFAULT_TOL, gaussian_lattice_sum, min_eig
from .linalg_core import (
    CosetIndex,
    IntSymMatrix,
    SkewMatrix,
    check_complex_symmetric,
    is_positive_definite,
)
from .reports import CheckReport

__all__ = [
    "ThetaCharacteristics",
    "SiegelPoint",
    "NCDeformation",
    "theta_with_char",
    "e_comm",
    "e_comm_via_theta",
    "compute_M",
    "normalization",
    "e_nc",
    "e_nc_via_theta",
    "difference",
    "coset_vector",
    "random_valid_pair",
    "poisson_check",
]

BRANCH_STEPS = 16


@dataclass(frozen=True)
class ThetaCharacteristics:
    """Characteristics (c1, c2).

    c1 is reduced into [0, 1).  c2 is kept as given: shifting c2 by an integer
    vector k multiplies the theta function by exp(2 pi i c1.k), so it is only
    a symmetry when c1 is integral.
    """

    c1: tuple[float, ...]
    c2: tuple[float, ...]

    def __post_init__(self):
        c1 = tuple(float(x) % 1.0 for x in np.atleast_1d(np.asarray(self.c1, dtype=float)))
        c2 = tuple(float(x) for x in np.atleast_1d(np.asarray(self.c2, dtype=float)))
        if len(c1) != len(c2):
            raise ValueError("c1 and c2 must have the same length")
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c2", c2)

    @classmethod
    def zero(cls, n: int) -> "ThetaCharacteristics":
        return cls((0.0,) * n, (0.0,) * n)


@dataclass(frozen=True, eq=False)
class SiegelPoint:
    """Complex symmetric matrix with positive-definite imaginary part."""

    omega: np.ndarray

    def __post_init__(self):
        om = np.atleast_2d(np.asarray(self.omega, dtype=complex))
        if om.shape[0] != om.shape[1]:
            raise NotSiegel(f"Omega must be square, got {om.shape}")
        if np.max(np.abs(om - om.T), initial=0.0) > 1e-12 * max(np.max(np.abs(om)), 1.0):
            raise NotSiegel("Omega is not symmetric")
        if not min_eig(om.imag) > 0:
            raise NotSiegel("Im Omega is not positive definite")
        om.setflags(write=False)
        object.__setattr__(self, "omega", om)

    @property
    def n(self) -> int:
        return self.omega.shape[0]


def _zvec(z, n: int) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (n,):
        raise ValueError(f"z must have length {n}")
    return z


def theta_with_char(ch: ThetaCharacteristics, omega: SiegelPoint | np.ndarray, z,
                    tol: float = DEFAULT_TOL, full_output: bool = False):
    """theta[c1, c2](Omega, z) = sum_m exp(pi i (m+c1)^T Omega (m+c1) + 2 pi i (m+c1)^T (z+c2))."""
    if not isinstance(omega, SiegelPoint):
        omega = SiegelPoint(omega)
    n = omega.n
    z = _zvec(z, n)
    c1 = np.asarray(ch.c1, dtype=float)
    c2 = np.asarray(ch.c2, dtype=float)
    val, R = gaussian_lattice_sum(-1j * omega.omega, c1, z + c2, tol=tol)
    return (val, R) if full_output else val


def difference(A_a: IntSymMatrix, A_b: IntSymMatrix) -> IntSymMatrix:
    """A_ab := A_b - A_a, required positive definite."""
    A = A_b - A_a
    if not is_positive_definite(A):
        raise NotPositiveDefinite(f"A_b - A_a = {A.tolist()} is not positive definite")
    return A


def coset_vector(A: IntSymMatrix, mu: CosetIndex | Sequence[int]) -> np.ndarray:
    """Integer representative of mu, checking the modulus when one is attached."""
    if isinstance(mu, CosetIndex):
        if mu.modulus != A:
            raise IndexModulusMismatch(
                f"index modulus {mu.modulus.tolist()} does not match {A.tolist()}")
        mu = mu.rep
    v = np.atleast_1d(np.asarray(mu, dtype=np.int64))
    if v.shape != (A.n,):
        raise IndexModulusMismatch(f"index must have length {A.n}")
    return v


def e_comm(A_a: IntSymMatrix, A_b: IntSymMatrix, mu, z, tol: float = DEFAULT_TOL,
           full_output: bool = False):
    """sum_w exp(-pi (z+w-A^{-1}mu)^T A (z+w-A^{-1}mu)) with A = A_b - A_a."""
    A = difference(A_a, A_b)
    mu = coset_vector(A, mu)
    z = _zvec(z, A.n)
    shift = z - A.inverse_float() @ mu
    val, R = gaussian_lattice_sum(A.to_float(), shift, tol=tol)
    return (val, R) if full_output else val


def e_comm_via_theta(A_a: IntSymMatrix, A_b: IntSymMatrix, mu, z, tol: float = DEFAULT_TOL):
    """The same basis function written as det(A)^{-1/2} theta[0, -A^{-1}mu](i A^{-1}, z)."""
    A = difference(A_a, A_b)
    mu = coset_vector(A, mu)
    Ainv = A.inverse_float()
    ch = ThetaCharacteristics(np.zeros(A.n), -(Ainv @ mu))
    return theta_with_char(ch, SiegelPoint(1j * Ainv), z, tol=tol * math.sqrt(A.det())) \
        / math.sqrt(A.det())


def compute_M(A_a: IntSymMatrix, A_b: IntSymMatrix, theta: SkewMatrix) -> np.ndarray:
    """M_ab = (1 + (i/2) (A_a + A_b) theta)^{-1} (A_b - A_a)."""
    A = A_b - A_a
    if theta.is_zero():
        return A.to_float().astype(complex)
    n = A.n
    K = np.eye(n) + 0.5j * (A_a + A_b).to_float() @ theta.array
    if np.linalg.cond(K) > 1e12:
        raise SingularDeformation("1 + (i/2) A^+ theta is singular")
    M = np.linalg.solve(K, A.to_float())
    check_complex_symmetric(M, 1e-12, "M_ab")
    M = 0.5 * (M + M.T)
    if is_positive_definite(A) and not min_eig(M.real) > 0:
        raise NotPositiveReal("Re M_ab is not positive definite")
    return M


def _log_det_increment(F, steps: int = BRANCH_STEPS, depth: int = 0) -> complex:
    """Change of a continuous branch of log det F(t) between t = 0 and t = 1.

    Steps whose phase jump exceeds pi/4 are subdivided (up to 6 levels).
    """
    total = 0j
    ts = np.linspace(0.0, 1.0, steps + 1)
    prev = complex(np.linalg.det(F(0.0)))
    for t0, t1 in zip(ts[:-1], ts[1:]):
        cur = complex(np.linalg.det(F(t1)))
        if cur == 0 or prev == 0:
            raise SingularDeformation("determinant vanishes along the path t*theta")
        step = cmath.log(cur / prev)
        if abs(step.imag) > math.pi / 4 and depth < 6:
            step = _log_det_increment(lambda s, a=t0, b=t1: F(a + s * (b - a)), steps, depth + 1)
        total += step
        prev = cur
    return total


def _log_det_from_identity(B: np.ndarray) -> complex:
    """log det(1 + B) on the branch continuous along 1 + tB from log 1 = 0."""
    n = B.shape[0]
    return _log_det_increment(lambda t: np.eye(n) + t * B)


def normalization(A_a: IntSymMatrix, A_b: IntSymMatrix, theta: SkewMatrix) -> complex:
    """C_ab = det(1+iA_a th)^{1/4} det(1+iA_b th)^{1/4} / det(1+(i/2)A^+ th)^{1/2}.

    Fractional powers follow the branch continuous in t along t*theta from
    the value 1 at theta = 0.
    """
    if theta.is_zero():
        return 1.0 + 0j
    th = theta.array
    la = _log_det_from_identity(1j * A_a.to_float() @ th)
    lb = _log_det_from_identity(1j * A_b.to_float() @ th)
    lp = _log_det_from_identity(0.5j * (A_a + A_b).to_float() @ th)
    return cmath.exp(0.25 * la + 0.25 * lb - 0.5 * lp)


class NCDeformation:
    """A fixed theta together with cached M_ab and C_ab per label pair."""

    def __init__(self, theta: SkewMatrix, labels: Sequence[IntSymMatrix] = ()):
        self.theta = theta
        self._M = lru_cache(maxsize=None)(lambda a, b: compute_M(a, b, theta))
        self._C = lru_cache(maxsize=None)(lambda a, b: normalization(a, b, theta))
        th = theta.array
        for i, a in enumerate(labels):
            for b in labels[i + 1:]:
                lhs = a.to_float() @ th @ a.to_float()
                rhs = b.to_float() @ th @ b.to_float()
                if np.max(np.abs(lhs - rhs)) > 1e-12 * max(np.max(np.abs(lhs)), 1.0):
                    raise NotCompatible(
                        f"A theta A differs for {a.tolist()} and {b.tolist()}")

    def M(self, A_a: IntSymMatrix, A_b: IntSymMatrix) -> np.ndarray:
        return self._M(A_a, A_b)

    def C(self, A_a: IntSymMatrix, A_b: IntSymMatrix) -> complex:
        return self._C(A_a, A_b)


def e_nc(A_a: IntSymMatrix, A_b: IntSymMatrix, mu, z, theta: SkewMatrix,
         tol: float = DEFAULT_TOL, full_output: bool = False):
    """C_ab * sum_w exp(-pi (z+w-A^{-1}mu)^T M_ab (z+w-A^{-1}mu))."""
    A = difference(A_a, A_b)
    mu = coset_vector(A, mu)
    z = _zvec(z, A.n)
    M = compute_M(A_a, A_b, theta)
    C = normalization(A_a, A_b, theta)
    shift = z - A.inverse_float() @ mu
    val, R = gaussian_lattice_sum(M, shift, tol=tol / max(abs(C), 1e-300))
    return (C * val, R) if full_output else C * val


def e_nc_via_theta(A_a: IntSymMatrix, A_b: IntSymMatrix, mu, z, theta: SkewMatrix,
                   tol: float = DEFAULT_TOL):
    """Fourier (theta-series) form of :func:`e_nc`:

    det(1+iA_a th)^{1/4} det(1+iA_b th)^{1/4} det(A_ab)^{-1/2}
        * theta[0, -A_ab^{-1} mu](i M_ab^{-1}, z).
    """
    A = difference(A_a, A_b)
    mu = coset_vector(A, mu)
    M = compute_M(A_a, A_b, theta)
    pref = 1.0 + 0j
    if not theta.is_zero():
        th = theta.array
        pref = cmath.exp(0.25 * _log_det_from_identity(1j * A_a.to_float() @ th)
                         + 0.25 * _log_det_from_identity(1j * A_b.to_float() @ th))
    pref /= math.sqrt(A.det())
    Minv = np.linalg.inv(M)
    Minv = 0.5 * (Minv + Minv.T)
    ch = ThetaCharacteristics(np.zeros(A.n), -(A.inverse_float() @ mu))
    return pref * theta_with_char(ch, SiegelPoint(1j * Minv), z, tol=tol / abs(pref))


def random_valid_pair(rng: np.random.Generator, n: int, size: int = 5):
    """Random (A_a, A_b, mu): symmetric entries in [-size, size], A_b - A_a positive definite."""
    def sym():
        R = rng.integers(-size, size + 1, size=(n, n))
        return IntSymMatrix(np.triu(R) + np.triu(R, 1).T)

    while True:
        A_a, A_b = sym(), sym()
        if is_positive_definite(A_b - A_a):
            break
    mu = rng.integers(-size, size + 1, size=n)
    return A_a, A_b, mu


def poisson_check(cases: int = 5, points: int = 20, seed=0, tol: float = 1e-10,
                  max_n: int = 2, theta: SkewMatrix | None = None):
    """Gaussian-sum form of e_ab^mu against its theta-characteristic form.

    z ranges over the unit polydisc.  With a nonzero 2 x 2 theta, pairs of
    equal determinant are drawn so that the deformed functions exist and
    e_nc is compared with e_nc_via_theta as well.
    """
    from .structure_constants import random_polydisc_points

    rng = np.random.default_rng(seed)
    worst = 0.0
    drawn = []
    while len(drawn) < cases:
        n = int(rng.integers(1, max_n + 1))
        A_a, A_b, mu = random_valid_pair(rng, n)
        if theta is not None and not theta.is_zero():
            if n != theta.n or A_a.det() != A_b.det():
                continue
        drawn.append((A_a, A_b, mu))
    for A_a, A_b, mu in drawn:
        for z in random_polydisc_points(A_a.n, points, int(rng.integers(2**31))):
            a, b = e_comm(A_a, A_b, mu, z, 1e-14), e_comm_via_theta(A_a, A_b, mu, z, 1e-14)
            worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
            if theta is not None and not theta.is_zero():
                a, b = e_nc(A_a, A_b, mu, z, theta, 1e-14), e_nc_via_theta(A_a, A_b, mu, z, theta, 1e-14)
                worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
    return CheckReport("poisson", worst, tol, worst <= tol,
                       {"cases": [[A.tolist(), B.tolist(), m.tolist()] for A, B, m in drawn],
                        "points": points})
