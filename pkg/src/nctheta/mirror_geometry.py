"""Structure constants from flat triangles on the mirror symplectic torus.

Line bundles with slope A correspond to affine lagrangians yhat = A x + c in
R^{2n}.  A triple of lifts bounds a triangle, and the commutative structure
constant is the sum of exp(-pi * area) over the triangles allowed by the coset
conditions.  Nothing here reuses the Gaussian form of the structure
constants; the quadratic dependence of the area on the offsets is recovered
by sampling the area function itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IndexModulusMismatch, NotPositiveDefinite, ParallelLagrangians, TruncationOverflow
from .lattice import DEFAULT_TOL, EIG_SAFETY, box, choose_radius, gaussian_majorant, min_eig
from .linalg_core import IntSymMatrix, coset_representatives, is_positive_definite, lattice_mask
from .parallel import pmap
from .theta_eval import coset_vector

__all__ = [
    "AffineLagrangian",
    "SymplecticForm",
    "intersection_point",
    "triangle_area",
    "triangle_for_offset",
    "c_mirror",
    "mirror_tensor",
    "intersection_count",
]


@dataclass(frozen=True, eq=False)
class AffineLagrangian:
    """The graph yhat = A x + c."""

    A: IntSymMatrix
    c: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=float)).copy()
        if c.shape != (self.A.n,):
            raise ValueError(f"offset must have length {self.A.n}")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.A.n


@dataclass(frozen=True)
class SymplecticForm:
    n: int

    @property
    def matrix(self) -> np.ndarray:
        n = self.n
        return np.block([[np.zeros((n, n)), -np.eye(n)], [np.eye(n), np.zeros((n, n))]])

    def __call__(self, p, q) -> float:
        return float(np.asarray(p, dtype=float) @ self.matrix @ np.asarray(q, dtype=float))


def intersection_point(La: AffineLagrangian, Lb: AffineLagrangian) -> np.ndarray:
    """(x, yhat) with A_a x + c_a = A_b x + c_b."""
    D = Lb.A - La.A
    if D.det() == 0:
        raise ParallelLagrangians(f"A_b - A_a = {D.tolist()} is singular")
    Dinv = D.inverse_float()
    x = -Dinv @ (Lb.c - La.c)
    y = -La.A.to_float() @ Dinv @ Lb.c + Lb.A.to_float() @ Dinv @ La.c
    return np.concatenate([x, y])


def triangle_area(v_ab, v_bc, v_ac, omega: SymplecticForm | None = None) -> float:
    """(v_ab - v_ac)^T omega (v_bc - v_ac)."""
    v_ab, v_bc, v_ac = (np.asarray(v, dtype=float) for v in (v_ab, v_bc, v_ac))
    if omega is None:
        omega = SymplecticForm(len(v_ab) // 2)
    return omega(v_ab - v_ac, v_bc - v_ac)


def triangle_for_offset(A_a: IntSymMatrix, A_b: IntSymMatrix, A_c: IntSymMatrix,
                        u, rho) -> float:
    """Area of the triangle cut out by offsets c_a = 0, c_b = u, c_c = -rho."""
    n = A_a.n
    La = AffineLagrangian(A_a, np.zeros(n))
    Lb = AffineLagrangian(A_b, u)
    Lc = AffineLagrangian(A_c, -np.asarray(rho, dtype=float))
    return triangle_area(intersection_point(La, Lb), intersection_point(Lb, Lc),
                         intersection_point(La, Lc))


def _area_quadratic(A_a, A_b, A_c, rho):
    """Coefficients (G, g, c0) of u -> area = u^T G u + g.u + c0, read off from samples."""
    n = A_a.n
    f = lambda u: triangle_for_offset(A_a, A_b, A_c, u, rho)
    c0 = f(np.zeros(n))
    e = np.eye(n)
    fp = np.array([f(e[i]) for i in range(n)])
    fm = np.array([f(-e[i]) for i in range(n)])
    G = np.diag(0.5 * (fp + fm) - c0)
    for i in range(n):
        for j in range(i + 1, n):
            G[i, j] = G[j, i] = 0.5 * (f(e[i] + e[j]) - fp[i] - fp[j] + c0)
    return G, 0.5 * (fp - fm), c0


def _check_pd(A_a, A_b, A_c):
    for name, d in (("A_ab", A_b - A_a), ("A_bc", A_c - A_b)):
        if d.det() == 0:
            raise IndexModulusMismatch(f"{name} = {d.tolist()} is singular")
        if not is_positive_definite(d):
            raise NotPositiveDefinite(f"{name} = {d.tolist()} is not positive definite")


def c_mirror(A_a: IntSymMatrix, A_b: IntSymMatrix, A_c: IntSymMatrix, mu, nu, rho,
             tol: float = DEFAULT_TOL) -> float:
    """sum over admissible u' of exp(-pi * area(c_a=0, c_b=u', c_c=-rho)).

    u' is admissible when -u' = mu mod A_ab and u' + rho = nu mod A_bc.
    """
    _check_pd(A_a, A_b, A_c)
    A_ab, A_bc, A_ac = A_b - A_a, A_c - A_b, A_c - A_a
    mu, nu, rho = coset_vector(A_ab, mu), coset_vector(A_bc, nu), coset_vector(A_ac, rho)
    n = A_a.n
    G, g, c0 = _area_quadratic(A_a, A_b, A_c, rho)
    G = 0.5 * (G + G.T)
    lam = min_eig(G)
    if not lam > 0:
        raise TruncationOverflow("triangle area is not a positive-definite quadratic in u'")
    center = np.linalg.solve(-2 * G, g)
    log_peak = -math.pi * (c0 + 0.5 * float(g @ center))
    R = choose_radius(gaussian_majorant(EIG_SAFETY * lam), n, tol, log_peak)
    us = box(np.rint(center), R)
    ok = lattice_mask(A_ab, -us - mu) & lattice_mask(A_bc, us + rho - nu)
    return math.fsum(math.exp(-math.pi * triangle_for_offset(A_a, A_b, A_c, u, rho))
                     for u in us[ok])


def mirror_tensor(A_a: IntSymMatrix, A_b: IntSymMatrix, A_c: IntSymMatrix,
                  tol: float = DEFAULT_TOL) -> np.ndarray:
    """c_mirror over canonical coset representatives, shape (det A_ab, det A_bc, det A_ac)."""
    _check_pd(A_a, A_b, A_c)
    mus = coset_representatives(A_b - A_a)
    nus = coset_representatives(A_c - A_b)
    rhos = coset_representatives(A_c - A_a)
    keys = [(m, v, r) for m in mus for v in nus for r in rhos]
    vals = pmap(lambda k: c_mirror(A_a, A_b, A_c, *k, tol=tol), keys)
    return np.array(vals).reshape(len(mus), len(nus), len(rhos))


def intersection_count(A_a: IntSymMatrix, A_b: IntSymMatrix) -> int:
    """Number of intersection points of the projections of L_a and L_b to the torus.

    Lifts yhat = A_a x + c_a, A_b x + c_b meet over x = -A_ab^{-1}(c_b - c_a);
    points are counted modulo Z^{2n} by enumerating offsets in a box that
    covers every residue class.
    """
    L0 = AffineLagrangian(A_a, np.zeros(A_a.n))
    D = A_b - A_a
    R = abs(D.det())
    seen = set()
    for c in box(np.zeros(A_a.n), R):
        v = intersection_point(L0, AffineLagrangian(A_b, c))
        frac = np.mod(np.round(v, 9), 1.0)
        seen.add(tuple(np.round(frac, 8) % 1.0))
    return len(seen)
