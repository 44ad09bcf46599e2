"""Structure constants of the (star) product of theta basis functions.

For a triple of labels (A_a, A_b, A_c) with A_ab, A_bc positive definite

    e_ab^mu . e_bc^nu = sum_rho C^{mu nu}_rho e_ac^rho,

    C^{mu nu}_rho = sum_u delta_{A_ab}(mu, rho - u) delta_{A_bc}(nu, u)
                    exp(-pi (u - A_bc A_ac^{-1} rho)^T Q (u - A_bc A_ac^{-1} rho)),

with Q = A_ab^{-1} + A_bc^{-1} in the commutative case and
Q = (A_ab^{-1} + A_bc^{-1}) (1 + i A_b theta)^{-1} for the Moyal product.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DegenerateDifference, IndexModulusMismatch, NotPositiveDefinite
from .lattice import DEFAULT_TOL, gaussian_lattice_sum
from .linalg_core import (
    CosetIndex,
    IntSymMatrix,
    SkewMatrix,
    check_complex_symmetric,
    coset_representatives,
    is_positive_definite,
    lattice_mask,
    reduce_mod,
)
from .parallel import pmap
from .star_product import star_theta_eval
from .theta_eval import NCDeformation, coset_vector, e_comm, e_nc

__all__ = [
    "LabelTriple",
    "StructureTensor",
    "HomSpace",
    "hom_space",
    "c_comm",
    "c_nc",
    "structure_tensor",
    "composition_tensor",
    "AdditionReport",
    "verify_addition",
    "AssociativityReport",
    "check_associativity",
    "find_chains",
    "associativity_report",
    "random_polydisc_points",
]


@dataclass(frozen=True)
class LabelTriple:
    A_a: IntSymMatrix
    A_b: IntSymMatrix
    A_c: IntSymMatrix
    theta: SkewMatrix | None = None

    def __post_init__(self):
        if self.theta is None:
            object.__setattr__(self, "theta", SkewMatrix.zero(self.A_a.n))
        for name, (x, y) in {"A_ab": (self.A_a, self.A_b), "A_bc": (self.A_b, self.A_c)}.items():
            d = y - x
            if d.det() == 0:
                raise IndexModulusMismatch(f"{name} = {d.tolist()} is singular")
            if not is_positive_definite(d):
                raise NotPositiveDefinite(f"{name} = {d.tolist()} is not positive definite")
        if not self.theta.is_zero():
            NCDeformation(self.theta, [self.A_a, self.A_b, self.A_c])

    @property
    def A_ab(self) -> IntSymMatrix:
        return self.A_b - self.A_a

    @property
    def A_bc(self) -> IntSymMatrix:
        return self.A_c - self.A_b

    @property
    def A_ac(self) -> IntSymMatrix:
        return self.A_c - self.A_a

    @property
    def n(self) -> int:
        return self.A_a.n

    def commutative(self) -> "LabelTriple":
        return LabelTriple(self.A_a, self.A_b, self.A_c)


def _exact_center(t: LabelTriple, rho: np.ndarray) -> np.ndarray:
    """A_bc A_ac^{-1} rho, computed over Q."""
    w = t.A_ac.solve(rho)
    return np.array([float(sum((Fraction(a) * x for a, x in zip(row, w)), Fraction(0)))
                     for row in t.A_bc.entries])


def _u_sum(t: LabelTriple, Q: np.ndarray, mu, nu, rho, tol: float) -> complex:
    mu = coset_vector(t.A_ab, mu)
    nu = coset_vector(t.A_bc, nu)
    rho = coset_vector(t.A_ac, rho)
    A_ab, A_bc = t.A_ab, t.A_bc

    def admissible(u: np.ndarray) -> np.ndarray:
        return lattice_mask(A_ab, rho - u - mu) & lattice_mask(A_bc, u - nu)

    val, _ = gaussian_lattice_sum(Q, -_exact_center(t, rho), tol=tol, mask=admissible)
    return val


def _comm_form(t: LabelTriple) -> np.ndarray:
    inv_ab, inv_bc = t.A_ab.inverse(), t.A_bc.inverse()
    return np.array([[float(x + y) for x, y in zip(r, s)] for r, s in zip(inv_ab, inv_bc)])


def _nc_form(t: LabelTriple) -> np.ndarray:
    n = t.n
    K = np.eye(n) + 1j * t.A_b.to_float() @ t.theta.array
    Q = _comm_form(t) @ np.linalg.inv(K)
    check_complex_symmetric(Q, 1e-12, "(A_ab^-1 + A_bc^-1)(1 + i A_b theta)^-1")
    return 0.5 * (Q + Q.T)


def c_comm(t: LabelTriple, mu, nu, rho, tol: float = DEFAULT_TOL) -> float:
    """Commutative structure constant (real, nonnegative)."""
    return _u_sum(t, _comm_form(t), mu, nu, rho, tol).real


def c_nc(t: LabelTriple, mu, nu, rho, tol: float = DEFAULT_TOL) -> complex:
    """Structure constant of the Moyal product of the deformed theta functions."""
    return _u_sum(t, _nc_form(t), mu, nu, rho, tol)


@dataclass(frozen=True, eq=False)
class StructureTensor:
    triple: LabelTriple
    mu_reps: tuple[CosetIndex, ...]
    nu_reps: tuple[CosetIndex, ...]
    rho_reps: tuple[CosetIndex, ...]
    values: np.ndarray

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape

    def _pos(self, reps, modulus, idx) -> int:
        if isinstance(idx, (int, np.integer)):
            return int(idx)
        key = reduce_mod(modulus, idx)
        return reps.index(key)

    def __getitem__(self, key) -> complex:
        mu, nu, rho = key
        t = self.triple
        return complex(self.values[self._pos(self.mu_reps, t.A_ab, mu),
                                   self._pos(self.nu_reps, t.A_bc, nu),
                                   self._pos(self.rho_reps, t.A_ac, rho)])

    def to_json(self) -> dict:
        out = {}
        for i, m in enumerate(self.mu_reps):
            for j, v in enumerate(self.nu_reps):
                for k, r in enumerate(self.rho_reps):
                    c = complex(self.values[i, j, k])
                    out[f"{m.label()}|{v.label()}|{r.label()}"] = [c.real, c.imag]
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=False)


def structure_tensor(t: LabelTriple, tol: float = DEFAULT_TOL,
                     commutative: bool | None = None) -> StructureTensor:
    """Tabulate C over canonical coset representatives (mu, nu, rho)."""
    if commutative is None:
        commutative = t.theta.is_zero()
    mus = coset_representatives(t.A_ab)
    nus = coset_representatives(t.A_bc)
    rhos = coset_representatives(t.A_ac)
    Q = _comm_form(t) if commutative else _nc_form(t)
    keys = [(m, v, r) for m in mus for v in nus for r in rhos]
    vals = pmap(lambda k: _u_sum(t, Q, *k, tol), keys)
    values = np.array(vals, dtype=complex).reshape(len(mus), len(nus), len(rhos))
    if commutative:
        values = values.real.astype(complex)
    values.setflags(write=False)
    return StructureTensor(t, tuple(mus), tuple(nus), tuple(rhos), values)


@dataclass(frozen=True)
class HomSpace:
    A_a: IntSymMatrix
    A_b: IntSymMatrix
    dimension: int
    basis: tuple[CosetIndex, ...] = field(default=())


def hom_space(A_a: IntSymMatrix, A_b: IntSymMatrix) -> HomSpace:
    """H^0(a, b): theta basis if A_b - A_a is positive definite, C if a == b, else 0."""
    if A_a == A_b:
        return HomSpace(A_a, A_b, 1)
    d = A_b - A_a
    if d.det() == 0:
        raise DegenerateDifference(f"A_b - A_a = {d.tolist()} is singular")
    if is_positive_definite(d):
        basis = tuple(coset_representatives(d))
        return HomSpace(A_a, A_b, len(basis), basis)
    return HomSpace(A_a, A_b, 0)


def composition_tensor(A_a: IntSymMatrix, A_b: IntSymMatrix, A_c: IntSymMatrix,
                       theta: SkewMatrix | None = None, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Composition H^0(a,b) x H^0(b,c) -> H^0(a,c) as an array (dim_ab, dim_bc, dim_ac).

    Hom(a, a) = C acts by scalar multiplication, so a == b or b == c gives an
    identity tensor; empty spaces give empty arrays.
    """
    hab, hbc, hac = hom_space(A_a, A_b), hom_space(A_b, A_c), hom_space(A_a, A_c)
    shape = (hab.dimension, hbc.dimension, hac.dimension)
    if 0 in shape:
        return np.zeros(shape, dtype=complex)
    if A_a == A_b:
        return np.eye(shape[1], dtype=complex).reshape(1, shape[1], shape[2])
    if A_b == A_c:
        return np.eye(shape[0], dtype=complex).reshape(shape[0], 1, shape[2])
    return np.array(structure_tensor(LabelTriple(A_a, A_b, A_c, theta), tol).values)


def random_polydisc_points(n: int, samples: int, seed) -> np.ndarray:
    """Uniform samples from the unit polydisc {|z_i| <= 1}."""
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.uniform(0.0, 1.0, size=(samples, n)))
    phi = rng.uniform(0.0, 2 * math.pi, size=(samples, n))
    return r * np.exp(1j * phi)


@dataclass
class AdditionReport:
    samples: int
    max_rel_error: float
    tol: float
    passed: bool
    worst: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"check": "addition", "samples": self.samples, "max_rel_error": self.max_rel_error,
                "tol": self.tol, "passed": self.passed, "worst": self.worst}


def verify_addition(t: LabelTriple, samples: int = 20, seed=0, tol: float = 1e-9,
                    eval_tol: float = 1e-13) -> AdditionReport:
    """Compare both sides of the product formula at random z in the unit polydisc.

    Left side: pointwise product of e_comm values (theta = 0) or the star
    product of the two theta series.  Right side: sum_rho C e_ac^rho.  Every
    index pair (mu, nu) is checked.
    """
    zs = random_polydisc_points(t.n, samples, seed)
    commutative = t.theta.is_zero()
    T = structure_tensor(t, eval_tol)
    th = t.theta

    def check(z):
        if commutative:
            rhs_basis = [e_comm(t.A_a, t.A_c, r, z, eval_tol) for r in T.rho_reps]
        else:
            rhs_basis = [e_nc(t.A_a, t.A_c, r, z, th, eval_tol) for r in T.rho_reps]
        worst = (0.0, None)
        for i, m in enumerate(T.mu_reps):
            for j, v in enumerate(T.nu_reps):
                if commutative:
                    lhs = e_comm(t.A_a, t.A_b, m, z, eval_tol) * e_comm(t.A_b, t.A_c, v, z, eval_tol)
                else:
                    lhs = star_theta_eval(t.A_a, t.A_b, t.A_c, m, v, z, th, eval_tol)
                rhs = complex(np.dot(T.values[i, j], rhs_basis))
                err = abs(lhs - rhs) / max(abs(lhs), 1e-300)
                if err >= worst[0]:
                    worst = (err, {"z": [[float(x.real), float(x.imag)] for x in z],
                                   "mu": m.label(), "nu": v.label(),
                                   "lhs": [lhs.real, lhs.imag], "rhs": [rhs.real, rhs.imag]})
        return worst

    results = pmap(check, list(zs))
    err, where = max(results, key=lambda r: r[0])
    return AdditionReport(samples, float(err), tol, bool(tol > 0 and err <= tol), where or {})


@dataclass
class AssociativityReport:
    status: str  # "pass", "fail" or "vacuous"
    max_error: float
    tol: float
    combinations: int
    labels: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """No violation found; a vacuous run counts as passed."""
        return self.status != "fail"

    def to_json(self) -> dict:
        return {"check": "associativity", "status": self.status, "passed": self.passed,
                "max_error": self.max_error,
                "tol": self.tol, "combinations": self.combinations, "labels": self.labels}


def check_associativity(A_a, A_b, A_c, A_d, theta: SkewMatrix | None = None,
                        tol: float = 1e-9, eval_tol: float = 1e-14) -> AssociativityReport:
    """sum_l C_abc^{mu nu, l} C_acd^{l kappa, rho} == sum_l C_bcd^{nu kappa, l} C_abd^{mu l, rho}."""
    if theta is None:
        theta = SkewMatrix.zero(A_a.n)
    T_abc = structure_tensor(LabelTriple(A_a, A_b, A_c, theta), eval_tol).values
    T_acd = structure_tensor(LabelTriple(A_a, A_c, A_d, theta), eval_tol).values
    T_bcd = structure_tensor(LabelTriple(A_b, A_c, A_d, theta), eval_tol).values
    T_abd = structure_tensor(LabelTriple(A_a, A_b, A_d, theta), eval_tol).values
    left = np.einsum("mnl,lkr->mnkr", T_abc, T_acd)
    right = np.einsum("nkl,mlr->mnkr", T_bcd, T_abd)
    scale = max(float(np.max(np.abs(left))), 1.0)
    err = float(np.max(np.abs(left - right))) / scale
    status = "pass" if tol > 0 and err <= tol else "fail"
    return AssociativityReport(status, err, tol, int(left.size),
                               [m.tolist() for m in (A_a, A_b, A_c, A_d)])


def find_chains(labels: Sequence[IntSymMatrix], length: int = 4) -> list[tuple[IntSymMatrix, ...]]:
    """Chains a_1 < ... < a_k of labels whose consecutive differences are positive definite."""
    succ = {i: [j for j, b in enumerate(labels) if j != i and (b - labels[i]).det() != 0
                and is_positive_definite(b - labels[i])] for i in range(len(labels))}
    chains = [[i] for i in range(len(labels))]
    for _ in range(length - 1):
        chains = [c + [j] for c in chains for j in succ[c[-1]]]
    return [tuple(labels[i] for i in c) for c in chains]


def associativity_report(labels: Sequence[IntSymMatrix], theta: SkewMatrix | None = None,
                         tol: float = 1e-9) -> AssociativityReport:
    """Check associativity on the first admissible chain of four labels, if any."""
    chains = find_chains(labels, 4)
    if not chains:
        return AssociativityReport("vacuous", 0.0, tol, 0)
    return check_associativity(*chains[0], theta=theta, tol=tol)
