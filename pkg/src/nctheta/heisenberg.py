"""Heisenberg modules S(R^n x Z^n/AZ^n) modelled by Gaussian atoms.

An element assigns to each coset mu a finite list of atoms

    x -> amp * exp(-pi (x - s)^T M (x - s) + 2 pi i k^T x),   Re M > 0,

a family closed under the generator actions, translations and the tensor
product m.  Derivatives (connection, holomorphic structure, curvature) are
taken by central finite differences of pointwise evaluations.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import IndexModulusMismatch, NotPositiveReal, TruncationOverflow
from .lattice import (
    DEFAULT_TOL,
    EIG_SAFETY,
    box,
    choose_radius,
    fsum_complex,
    gaussian_envelope,
    gaussian_lattice_sum,
    gaussian_majorant,
    min_eig,
)
from .linalg_core import (
    CosetIndex,
    IntSymMatrix,
    complex_matrix_to_json,
    coset_representatives,
    lattice_mask,
    parse_complex_matrix,
    parse_complex_vector,
    reduce_mod,
)
from .reports import CheckReport
from .theta_eval import difference

__all__ = [
    "GaussianAtom",
    "SchwartzElement",
    "ConnectionSpec",
    "eval_element",
    "t_map",
    "theta_vector",
    "theta_vectors",
    "act_U",
    "act_Z",
    "nabla",
    "dbar",
    "connection_apply",
    "dbar_kernel_check",
    "tensor_m",
    "tensor_m_pointwise",
    "twisted_section_eval",
    "random_atom",
    "random_element",
    "tmap_product_check",
    "curvature_check",
    "leibniz_check",
    "twisted_check",
    "CheckReport",
]

FD_STEP = 1e-5
FD_STEP_COMMUTATOR = 1e-4


@dataclass(frozen=True, eq=False)
class GaussianAtom:
    M: np.ndarray
    s: np.ndarray
    k: np.ndarray
    amp: complex = 1.0

    def __post_init__(self):
        M = np.atleast_2d(np.asarray(self.M, dtype=complex))
        n = M.shape[0]
        s = np.zeros(n, complex) if self.s is None else np.atleast_1d(np.asarray(self.s, dtype=complex))
        k = np.zeros(n, complex) if self.k is None else np.atleast_1d(np.asarray(self.k, dtype=complex))
        if M.shape != (n, n) or s.shape != (n,) or k.shape != (n,):
            raise ValueError("inconsistent atom dimensions")
        if not min_eig(M.real) > 0:
            raise NotPositiveReal("atom quadratic form must have positive-definite real part")
        for a in (M, s, k):
            a.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "amp", complex(self.amp))

    @classmethod
    def centered(cls, M, amp: complex = 1.0) -> "GaussianAtom":
        M = np.atleast_2d(np.asarray(M, dtype=complex))
        return cls(M, None, None, amp)

    @property
    def n(self) -> int:
        return self.M.shape[0]

    def __call__(self, x) -> complex:
        x = np.atleast_1d(x)
        y = x - self.s
        return self.amp * cmath.exp(-math.pi * (y @ self.M @ y) + 2j * math.pi * (self.k @ x))

    def shifted(self, d) -> "GaussianAtom":
        """The atom x -> self(x + d)."""
        d = np.asarray(d, dtype=complex)
        return GaussianAtom(self.M, self.s - d, self.k, self.amp * np.exp(2j * math.pi * (self.k @ d)))

    def modulated(self, dk, phase: complex = 1.0) -> "GaussianAtom":
        """The atom x -> phase * exp(2 pi i dk.x) * self(x)."""
        return GaussianAtom(self.M, self.s, self.k + np.asarray(dk, dtype=complex), self.amp * phase)

    def scaled(self, c: complex) -> "GaussianAtom":
        return GaussianAtom(self.M, self.s, self.k, self.amp * c)

    def __mul__(self, other: "GaussianAtom") -> "GaussianAtom":
        """Pointwise product, again a single atom."""
        M = self.M + other.M
        Ms = self.M @ self.s + other.M @ other.s
        s = np.linalg.solve(M, Ms)
        const = self.s @ self.M @ self.s + other.s @ other.M @ other.s - s @ M @ s
        return GaussianAtom(0.5 * (M + M.T), s, self.k + other.k,
                            self.amp * other.amp * np.exp(-math.pi * const))

    def log_sup(self) -> float:
        """log of sup over real x of |atom(x)|."""
        if self.amp == 0:
            return -math.inf
        sigma = -self.s
        _, log_peak, _ = gaussian_envelope(self.M, sigma, self.k)
        return math.log(abs(self.amp)) + log_peak + 2 * math.pi * float((sigma @ self.k).imag)

    def to_json(self) -> dict:
        return {"M": complex_matrix_to_json(self.M),
                "s": [[float(v.real), float(v.imag)] for v in self.s],
                "k": [[float(v.real), float(v.imag)] for v in self.k],
                "amp": [self.amp.real, self.amp.imag]}

    @classmethod
    def from_json(cls, d: Mapping) -> "GaussianAtom":
        M = parse_complex_matrix(d["M"])
        amp = parse_complex_vector([d.get("amp", 1.0)])[0]
        return cls(M, parse_complex_vector(d["s"]), parse_complex_vector(d["k"]), amp)


class SchwartzElement:
    """Element of S(R^n x Z^n / A Z^n) as a map coset -> list of atoms."""

    def __init__(self, modulus: IntSymMatrix, atoms: Mapping | None = None):
        if modulus.det() == 0:
            raise IndexModulusMismatch("modulus must be nonsingular")
        self.modulus = modulus
        table: dict[tuple[int, ...], list[GaussianAtom]] = {}
        for key, lst in (atoms or {}).items():
            if isinstance(key, CosetIndex) and key.modulus != modulus:
                raise IndexModulusMismatch("coset modulus mismatch")
            rep = reduce_mod(modulus, key).rep
            for a in lst:
                if a.n != modulus.n:
                    raise ValueError("atom dimension does not match modulus")
            table.setdefault(rep, []).extend(lst)
        self._atoms = {k: tuple(v) for k, v in sorted(table.items()) if v}
        self._canon: dict[tuple[int, ...], tuple[int, ...]] = {}

    @property
    def n(self) -> int:
        return self.modulus.n

    @property
    def atoms(self) -> dict[tuple[int, ...], tuple[GaussianAtom, ...]]:
        return dict(self._atoms)

    def component(self, mu) -> tuple[GaussianAtom, ...]:
        if isinstance(mu, CosetIndex):
            if mu.modulus != self.modulus:
                raise IndexModulusMismatch("coset modulus mismatch")
            mu = mu.rep
        key = tuple(int(v) for v in mu)
        rep = self._canon.get(key)
        if rep is None:
            rep = self._canon[key] = reduce_mod(self.modulus, key).rep
        return self._atoms.get(rep, ())

    def __call__(self, x, mu) -> complex:
        return eval_element(self, x, mu)

    def __len__(self):
        return sum(len(v) for v in self._atoms.values())

    def is_zero(self) -> bool:
        return not self._atoms

    def to_json(self) -> list:
        return [dict(coset=list(rep), **a.to_json()) for rep, lst in self._atoms.items() for a in lst]

    def dumps(self) -> str:
        return json.dumps({"modulus": self.modulus.tolist(), "atoms": self.to_json()})

    @classmethod
    def from_json(cls, modulus: IntSymMatrix, records: Iterable[Mapping]) -> "SchwartzElement":
        atoms: dict = {}
        for r in records:
            atoms.setdefault(tuple(r["coset"]), []).append(GaussianAtom.from_json(r))
        return cls(modulus, atoms)

    @classmethod
    def loads(cls, text: str) -> "SchwartzElement":
        d = json.loads(text)
        return cls.from_json(IntSymMatrix(d["modulus"]), d["atoms"])


def eval_element(xi: SchwartzElement, x, mu) -> complex:
    return sum((a(x) for a in xi.component(mu)), 0j)


def _atoms_of(xi, A: IntSymMatrix, mu) -> Sequence[GaussianAtom]:
    if isinstance(xi, GaussianAtom):
        return (xi,)
    if isinstance(xi, SchwartzElement):
        if xi.modulus != A:
            raise IndexModulusMismatch("element modulus does not match A")
        return xi.component(mu)
    return tuple(xi)


def t_map(A: IntSymMatrix, mu, xi, x, tol: float = DEFAULT_TOL) -> complex:
    """sum_w xi(x + w - A^{-1} mu) for a Gaussian-atom xi, x real or complex.

    ``xi`` may be an atom, a list of atoms or a SchwartzElement (whose
    mu-component is used).
    """
    if isinstance(mu, CosetIndex):
        mu = mu.rep
    atoms = _atoms_of(xi, A, mu)
    if not atoms:
        return 0j
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    base = x - A.inverse_float() @ np.asarray(mu, dtype=float)
    total = []
    for a in atoms:
        pref = a.amp * np.exp(2j * math.pi * (a.k @ a.s))
        val, _ = gaussian_lattice_sum(a.M, base - a.s, a.k,
                                      tol=tol / (len(atoms) * max(abs(pref), 1e-300)))
        total.append(pref * val)
    return fsum_complex(total)


def theta_vector(A_a: IntSymMatrix, A_b: IntSymMatrix, mu) -> SchwartzElement:
    """exp(-pi x^T A_ab x) placed at coset mu, zero at the other cosets."""
    A = difference(A_a, A_b)
    return SchwartzElement(A, {reduce_mod(A, mu).rep: [GaussianAtom.centered(A.to_float())]})


def theta_vectors(A_a: IntSymMatrix, A_b: IntSymMatrix) -> list[SchwartzElement]:
    A = difference(A_a, A_b)
    return [theta_vector(A_a, A_b, m) for m in coset_representatives(A)]


def _unit(n: int, i: int) -> np.ndarray:
    e = np.zeros(n, dtype=np.int64)
    e[i] = 1
    return e


def _generator(i: int, xi: SchwartzElement) -> SchwartzElement:
    n, A = xi.n, xi.modulus
    if not 1 <= i <= 2 * n:
        raise ValueError(f"generator index must be in 1..{2 * n}")
    Ainv = A.inverse_float()
    out: dict = {}
    if i <= n:
        t = _unit(n, i - 1)
        for rep, atoms in xi.atoms.items():
            phase = np.exp(2j * math.pi * (Ainv @ np.array(rep, dtype=float))[i - 1])
            out[rep] = [a.modulated(t, phase) for a in atoms]
    else:
        t = _unit(n, i - n - 1)
        shift = Ainv @ t
        for rep, atoms in xi.atoms.items():
            # (U xi)(x; mu) = xi(x + A^{-1} t; mu - t): old coset rep moves to rep + t
            out.setdefault(tuple(np.array(rep) + t), []).extend(a.shifted(shift) for a in atoms)
    return SchwartzElement(A, out)


def act_U(i: int, xi: SchwartzElement) -> SchwartzElement:
    """Right action of the generator U_i (1-based): modulation for i <= n,
    translation and coset shift for i > n."""
    return _generator(i, xi)


def act_Z(i: int, xi: SchwartzElement) -> SchwartzElement:
    """Action of the endomorphism generator Z_i, given by the same formulas as U_i."""
    return _generator(i, xi)


@dataclass(frozen=True)
class ConnectionSpec:
    A: IntSymMatrix
    i: int

    def __post_init__(self):
        if not 1 <= self.i <= 2 * self.A.n:
            raise ValueError(f"connection index must be in 1..{2 * self.A.n}")


Fn = Callable[[np.ndarray, object], complex]


def _as_fn(xi) -> Fn:
    if isinstance(xi, SchwartzElement):
        return lambda x, mu: eval_element(xi, x, mu)
    return xi


def nabla(i: int, A: IntSymMatrix, xi, h: float = FD_STEP) -> Fn:
    """The connection component nabla_i (1-based) as an operator on functions (x, mu) -> C.

    nabla_i = d/dx_i for i <= n (central difference), and multiplication by
    -2 pi i (A x)_{i-n} for i > n.
    """
    f = _as_fn(xi)
    n = A.n
    Af = A.to_float()
    if i <= n:
        e = np.zeros(n)
        e[i - 1] = h

        def g(x, mu):
            x = np.asarray(x, dtype=float)
            return (f(x + e, mu) - f(x - e, mu)) / (2 * h)
    else:
        row = Af[i - n - 1]

        def g(x, mu):
            x = np.asarray(x, dtype=float)
            return -2j * math.pi * float(row @ x) * f(x, mu)
    return g


def dbar(i: int, A: IntSymMatrix, xi, h: float = FD_STEP) -> Fn:
    """Holomorphic structure nabla_i + i nabla_{n+i}, i in 1..n."""
    d1 = nabla(i, A, xi, h)
    d2 = nabla(A.n + i, A, xi, h)
    return lambda x, mu: d1(x, mu) + 1j * d2(x, mu)


def connection_apply(spec: ConnectionSpec, xi, x, mu, h: float = FD_STEP) -> complex:
    return complex(nabla(spec.i, spec.A, xi, h)(np.asarray(x, dtype=float), mu))


def dbar_kernel_check(A_a: IntSymMatrix, A_b: IntSymMatrix, mu=None, samples: int = 20,
                      h: float = FD_STEP, tol: float = 1e-6, seed=0,
                      element: SchwartzElement | None = None) -> CheckReport:
    """Relative residual |dbar_i xi(x)| / |xi(x)| over sampled x in [-1, 1]^n, all i.

    ``element`` defaults to the theta vector(s) of (A_a, A_b); with ``mu``
    None every theta vector is checked.
    """
    A = difference(A_a, A_b)
    rng = np.random.default_rng(seed)
    if element is not None:
        elems = [element]
    elif mu is None:
        elems = theta_vectors(A_a, A_b)
    else:
        elems = [theta_vector(A_a, A_b, mu)]
    worst = 0.0
    for xi in elems:
        for rep in xi.atoms:
            for x in rng.uniform(-1.0, 1.0, size=(samples, A.n)):
                val = abs(eval_element(xi, x, rep))
                for i in range(1, A.n + 1):
                    r = abs(dbar(i, A, xi, h)(x, rep))
                    worst = max(worst, r / max(val, 1e-300))
    return CheckReport("dbar", worst, tol, worst <= tol,
                       {"modulus": A.tolist(), "elements": len(elems), "h": h})


def _shift_center(A_bc: IntSymMatrix, A_ac: IntSymMatrix, rho: np.ndarray) -> np.ndarray:
    return A_bc.to_float() @ A_ac.inverse_float() @ rho


def _quadratic_fit(fn: Callable[[np.ndarray], float], n: int):
    """Exact coefficients (G, g, c) of a quadratic u -> u^T G u + g.u + c from samples."""
    c = fn(np.zeros(n))
    e = np.eye(n)
    f1 = np.array([fn(e[i]) for i in range(n)])
    fm = np.array([fn(-e[i]) for i in range(n)])
    G = np.zeros((n, n))
    for i in range(n):
        G[i, i] = 0.5 * (f1[i] + fm[i]) - c
    g = 0.5 * (f1 - fm)
    for i in range(n):
        for j in range(i + 1, n):
            fij = fn(e[i] + e[j])
            G[i, j] = G[j, i] = 0.5 * (fij - f1[i] - f1[j] + c)
    return G, g, c


def tensor_m(xi_ab: SchwartzElement, xi_bc: SchwartzElement, A_a: IntSymMatrix,
             A_b: IntSymMatrix, A_c: IntSymMatrix, tol: float = DEFAULT_TOL) -> SchwartzElement:
    """m(xi_ab, xi_bc)(x, rho) = sum_u xi_ab(x + A_ab^{-1} v, rho - u) xi_bc(x - A_bc^{-1} v, u),
    v = u - A_bc A_ac^{-1} rho.

    Each term is the product of two shifted atoms, hence one atom.  For every
    atom pair the log sup-norm of the product is a concave quadratic in u; the
    u-box is chosen so the dropped terms have total sup-norm <= tol.
    """
    A_ab, A_bc, A_ac = A_b - A_a, A_c - A_b, A_c - A_a
    for name, d in (("A_ab", A_ab), ("A_bc", A_bc), ("A_ac", A_ac)):
        if d.det() == 0:
            raise IndexModulusMismatch(f"{name} is singular")
    if xi_ab.modulus != A_ab or xi_bc.modulus != A_bc:
        raise IndexModulusMismatch("element moduli must be A_ab and A_bc")
    n = A_a.n
    inv_ab, inv_bc = A_ab.inverse_float(), A_bc.inverse_float()
    rhos = coset_representatives(A_ac)
    pairs = [(np.array(m), a, np.array(v), b)
             for m, la in xi_ab.atoms.items() for a in la
             for v, lb in xi_bc.atoms.items() for b in lb]
    out: dict = {}
    if not pairs:
        return SchwartzElement(A_ac, {})
    budget = tol / (len(rhos) * len(pairs))
    for rho in rhos:
        r = rho.vector
        c = _shift_center(A_bc, A_ac, r)

        def term(u, a, b):
            v = np.asarray(u, dtype=float) - c
            return a.shifted(inv_ab @ v) * b.shifted(-inv_bc @ v)

        for mu, a, nu, b in pairs:
            G, g, const = _quadratic_fit(lambda u: term(u, a, b).log_sup(), n)
            lam = min_eig(-G / math.pi)
            if not lam > 0:
                raise TruncationOverflow("tensor product terms do not decay in u")
            center = np.linalg.solve(-2 * G, g)
            log_peak = const + 0.5 * float(g @ center)
            R = choose_radius(gaussian_majorant(EIG_SAFETY * lam), n, budget, log_peak)
            us = box(np.rint(center), R)
            ok = lattice_mask(A_ab, r - us - mu) & lattice_mask(A_bc, us - nu)
            out.setdefault(rho.rep, []).extend(term(u, a, b) for u in us[ok])
    return SchwartzElement(A_ac, out)


def tensor_m_pointwise(f_ab, f_bc, A_a: IntSymMatrix, A_b: IntSymMatrix, A_c: IntSymMatrix,
                       x, rho, radius: int = 5) -> complex:
    """The same u-sum for arbitrary callables f(x, mu), over a fixed box of u.

    Used where the arguments are not atom sums (e.g. derivatives).
    """
    A_ab, A_bc, A_ac = A_b - A_a, A_c - A_b, A_c - A_a
    r = np.asarray(rho.rep if isinstance(rho, CosetIndex) else rho, dtype=np.int64)
    x = np.asarray(x, dtype=float)
    c = _shift_center(A_bc, A_ac, r)
    inv_ab, inv_bc = A_ab.inverse_float(), A_bc.inverse_float()
    vals = []
    for u in box(np.rint(c), radius):
        v = u - c
        vals.append(f_ab(x + inv_ab @ v, tuple(r - u)) * f_bc(x - inv_bc @ v, tuple(u)))
    return fsum_complex(vals)


def twisted_section_eval(xi: SchwartzElement, x, y, tol: float = DEFAULT_TOL) -> complex:
    """sum_w sum_mu exp(2 pi i y^T (-A (x + w) + mu)) xi^mu(x + w - A^{-1} mu)."""
    A = xi.modulus
    Af, Ainv = A.to_float(), A.inverse_float()
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    count = max(len(xi), 1)
    total = []
    for rep, atoms in xi.atoms.items():
        base = x - Ainv @ np.array(rep, dtype=float)
        for a in atoms:
            pref = a.amp * np.exp(2j * math.pi * (a.k @ a.s) - 2j * math.pi * (y @ Af @ a.s))
            val, _ = gaussian_lattice_sum(a.M, base - a.s, a.k - Af @ y,
                                          tol=tol / (count * max(abs(pref), 1e-300)))
            total.append(pref * val)
    return fsum_complex(total)


# -- random elements for property checks -------------------------------------

def random_atom(rng: np.random.Generator, n: int, spread: float = 0.3) -> GaussianAtom:
    """Atom with Re M >= 0.5, small symmetric Im M, real center and frequency."""
    B = rng.normal(size=(n, n))
    P = B @ B.T / n + 0.5 * np.eye(n)
    C = rng.normal(scale=spread, size=(n, n))
    M = P + 1j * 0.5 * (C + C.T) * 0.3
    s = rng.uniform(-0.5, 0.5, size=n)
    k = rng.uniform(-1.0, 1.0, size=n)
    amp = complex(rng.normal(), rng.normal())
    return GaussianAtom(M, s, k, amp)


def random_element(rng: np.random.Generator, A: IntSymMatrix, atoms: int = 2,
                   coset=None) -> SchwartzElement:
    """Random element; all atoms on one coset if ``coset`` is given, else spread out."""
    reps = coset_representatives(A)
    table: dict = {}
    for _ in range(atoms):
        rep = reduce_mod(A, coset).rep if coset is not None else reps[rng.integers(len(reps))].rep
        table.setdefault(rep, []).append(random_atom(rng, A.n))
    return SchwartzElement(A, table)


# -- property checks ----------------------------------------------------------

def _default_triple(n: int):
    if n == 1:
        return IntSymMatrix.diag(0), IntSymMatrix.diag(1), IntSymMatrix.diag(3)
    return IntSymMatrix.diag(1, -4), IntSymMatrix.diag(2, -2), IntSymMatrix.diag(4, -1)


def tmap_product_check(A_a=None, A_b=None, A_c=None, pairs: int = 10, points: int = 20, seed=0,
                  tol: float = 1e-9, n: int = 2) -> CheckReport:
    """(T^mu xi_ab)(x) (T^nu xi_bc)(x) == sum_rho T^rho(m(xi_ab, xi_bc)^rho)(x) for random atoms."""
    if A_a is None:
        A_a, A_b, A_c = _default_triple(n)
    A_ab, A_bc, A_ac = A_b - A_a, A_c - A_b, A_c - A_a
    rng = np.random.default_rng(seed)
    mus, nus = coset_representatives(A_ab), coset_representatives(A_bc)
    worst = 0.0
    for _ in range(pairs):
        mu = mus[rng.integers(len(mus))]
        nu = nus[rng.integers(len(nus))]
        xi = random_element(rng, A_ab, atoms=1, coset=mu)
        eta = random_element(rng, A_bc, atoms=1, coset=nu)
        prod = tensor_m(xi, eta, A_a, A_b, A_c, tol=1e-14)
        for x in rng.uniform(-1.0, 1.0, size=(points, A_a.n)):
            lhs = t_map(A_ab, mu, xi, x, 1e-14) * t_map(A_bc, nu, eta, x, 1e-14)
            rhs = fsum_complex([t_map(A_ac, rho, prod, x, 1e-14)
                                for rho in coset_representatives(A_ac)])
            worst = max(worst, abs(lhs - rhs) / max(abs(lhs), 1.0))
    return CheckReport("lemma23", worst, tol, worst <= tol, {"pairs": pairs, "points": points})


def curvature_check(A: IntSymMatrix | None = None, elements: int = 5, points: int = 10, seed=0,
                    h: float = FD_STEP_COMMUTATOR, tol: float = 1e-5) -> CheckReport:
    """(i/2pi)[nabla_i, nabla_j] xi == F_ij xi with F = [[0, A], [-A, 0]]."""
    if A is None:
        A = IntSymMatrix.diag(1, 2)
    n = A.n
    Af = A.to_float()
    F = np.block([[np.zeros((n, n)), Af], [-Af, np.zeros((n, n))]])
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(elements):
        xi = random_element(rng, A, atoms=2)
        for x in rng.uniform(-1.0, 1.0, size=(points, n)):
            for rep in xi.atoms:
                val = eval_element(xi, x, rep)
                for i in range(1, 2 * n + 1):
                    for j in range(1, 2 * n + 1):
                        ij = nabla(i, A, nabla(j, A, xi, h), h)(x, rep)
                        ji = nabla(j, A, nabla(i, A, xi, h), h)(x, rep)
                        lhs = 1j / (2 * math.pi) * (ij - ji)
                        worst = max(worst, abs(lhs - F[i - 1, j - 1] * val) / max(abs(val), 1.0))
    return CheckReport("curvature", worst, tol, worst <= tol, {"modulus": A.tolist(), "h": h})


def leibniz_check(A_a=None, A_b=None, A_c=None, pairs: int = 5, points: int = 3, seed=0,
                  h: float = FD_STEP, tol: float = 1e-5, n: int = 2) -> CheckReport:
    """nabla_i m(xi, eta) == m(nabla_i xi, eta) + m(xi, nabla_i eta), pointwise, all i."""
    if A_a is None:
        A_a, A_b, A_c = _default_triple(n)
    A_ab, A_bc, A_ac = A_b - A_a, A_c - A_b, A_c - A_a
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(pairs):
        xi = random_element(rng, A_ab, atoms=2)
        eta = random_element(rng, A_bc, atoms=2)
        prod = tensor_m(xi, eta, A_a, A_b, A_c, tol=1e-14)
        for x in rng.uniform(-1.0, 1.0, size=(points, A_a.n)):
            for rho in coset_representatives(A_ac):
                scale = max(abs(eval_element(prod, x, rho)), 1.0)
                for i in range(1, 2 * A_a.n + 1):
                    lhs = nabla(i, A_ac, prod, h)(x, rho.rep)
                    rhs = (tensor_m_pointwise(nabla(i, A_ab, xi, h), _as_fn(eta), A_a, A_b, A_c, x, rho)
                           + tensor_m_pointwise(_as_fn(xi), nabla(i, A_bc, eta, h), A_a, A_b, A_c, x, rho))
                    worst = max(worst, abs(lhs - rhs) / scale)
    return CheckReport("leibniz", worst, tol, worst <= tol, {"pairs": pairs, "h": h})


def twisted_check(A_a=None, A_b=None, A_c=None, points: int = 20, seed=0, tol: float = 1e-9,
                  n: int = 2) -> CheckReport:
    """twisted(xi_ab) * twisted(xi_bc) == twisted(m(xi_ab, xi_bc)) at random (x, y)."""
    if A_a is None:
        A_a, A_b, A_c = _default_triple(n)
    A_ab, A_bc = A_b - A_a, A_c - A_b
    rng = np.random.default_rng(seed)
    xi = random_element(rng, A_ab, atoms=2)
    eta = random_element(rng, A_bc, atoms=2)
    prod = tensor_m(xi, eta, A_a, A_b, A_c, tol=1e-14)
    worst = 0.0
    for _ in range(points):
        x = rng.uniform(-1.0, 1.0, size=A_a.n)
        y = rng.uniform(-1.0, 1.0, size=A_a.n)
        lhs = twisted_section_eval(xi, x, y, 1e-14) * twisted_section_eval(eta, x, y, 1e-14)
        rhs = twisted_section_eval(prod, x, y, 1e-14)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), 1.0))
    return CheckReport("twisted", worst, tol, worst <= tol, {"points": points})
