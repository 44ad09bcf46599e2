"""Exact integer-matrix primitives and the finite quotients Z^n / A Z^n.

Integer data (the matrices A_a and their differences) is kept in Python ints
and :class:`fractions.Fraction` so that coset membership and Kronecker
deltas are decided exactly.  Conversion to floating point happens only at the
point of use.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, NotCompatible, SingularModulus, ThetaError

__all__ = [
    "IntSymMatrix",
    "SkewMatrix",
    "CosetIndex",
    "int_det",
    "rational_inverse",
    "smith_normal_form",
    "is_positive_definite",
    "coset_representatives",
    "delta_mod",
    "reduce_mod",
    "lattice_mask",
    "check_complex_symmetric",
    "parse_int_matrix",
    "parse_complex_matrix",
    "parse_complex_vector",
    "complex_matrix_to_json",
]

Rows = tuple[tuple[int, ...], ...]


def _as_rows(obj) -> Rows:
    if isinstance(obj, IntSymMatrix):
        return obj.entries
    arr = np.asarray(obj)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
    rows = []
    for row in arr.tolist():
        out = []
        for v in row:
            if isinstance(v, float):
                if not v.is_integer():
                    raise ThetaError(f"non-integer matrix entry {v!r}")
                v = int(v)
            out.append(int(v))
        rows.append(tuple(out))
    return tuple(rows)


def int_det(rows: Sequence[Sequence[int]]) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rational_inverse(rows: Sequence[Sequence[int]]) -> tuple[tuple[Fraction, ...], ...]:
    """Exact inverse over Q by Gauss-Jordan elimination."""
    n = len(rows)
    a = [[Fraction(v) for v in r] + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise SingularModulus("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(r[n:]) for r in a)


def smith_normal_form(rows: Sequence[Sequence[int]]):
    """Return ``(U, d, V)`` with ``U @ A @ V == diag(d)``.

    U and V are unimodular integer matrices (lists of lists), d is the list of
    nonnegative invariant factors with d[i] | d[i+1].  Zero factors signal a
    singular input.
    """
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for m in (a, V):
            for r in m:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        for m in (a, U):
            m[dst] = [x + q * y for x, y in zip(m[dst], m[src])]

    def add_col(dst, src, q):
        for m in (a, V):
            for r in m:
                r[dst] += q * r[src]

    for t in range(n):
        while True:
            nz = [(abs(a[i][j]), i, j) for i in range(t, n) for j in range(t, n) if a[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            p = a[t][t]
            clean = True
            for i in range(t + 1, n):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    clean = clean and a[i][t] == 0
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    clean = clean and a[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, n) for j in range(t + 1, n)
                        if a[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
    return U, [a[i][i] for i in range(n)], V


@dataclass(frozen=True)
class IntSymMatrix:
    """Symmetric integer n x n matrix (immutable)."""

    entries: Rows

    def __post_init__(self):
        rows = _as_rows(self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ThetaError(f"matrix is not symmetric: {rows}")

    @classmethod
    def diag(cls, *d: int) -> "IntSymMatrix":
        n = len(d)
        return cls(tuple(tuple(int(d[i]) if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, n: int) -> "IntSymMatrix":
        return cls.diag(*([0] * n))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64).reshape(self.n, self.n)

    def to_float(self) -> np.ndarray:
        return np.array(self.entries, dtype=float).reshape(self.n, self.n)

    def det(self) -> int:
        return int_det(self.entries)

    def inverse(self) -> tuple[tuple[Fraction, ...], ...]:
        if self.det() == 0:
            raise SingularModulus(f"singular matrix {self.tolist()}")
        return rational_inverse(self.entries)

    def inverse_float(self) -> np.ndarray:
        inv = self.inverse()
        return np.array([[float(v) for v in r] for r in inv]).reshape(self.n, self.n)

    def solve(self, v: Sequence[int]) -> tuple[Fraction, ...]:
        """Exact A^{-1} v."""
        inv = self.inverse()
        return tuple(sum((r[j] * int(v[j]) for j in range(self.n)), Fraction(0)) for r in inv)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def _check(self, other):
        if not isinstance(other, IntSymMatrix):
            return NotImplemented
        if other.n != self.n:
            raise DimensionMismatch(f"{self.n} vs {other.n}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return IntSymMatrix(tuple(tuple(x + y for x, y in zip(r, s))
                                  for r, s in zip(self.entries, other.entries)))

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return IntSymMatrix(tuple(tuple(x - y for x, y in zip(r, s))
                                  for r, s in zip(self.entries, other.entries)))

    def __neg__(self):
        return IntSymMatrix(tuple(tuple(-x for x in r) for r in self.entries))

    def __repr__(self):
        return f"IntSymMatrix({self.tolist()})"


@dataclass(frozen=True)
class SkewMatrix:
    """Real skew-symmetric n x n matrix (the noncommutativity parameter)."""

    entries: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
        if np.any(arr != -arr.T):
            raise ThetaError("theta must be exactly skew-symmetric")
        object.__setattr__(self, "entries", tuple(tuple(float(v) for v in r) for r in arr))

    @classmethod
    def zero(cls, n: int) -> "SkewMatrix":
        return cls(tuple((0.0,) * n for _ in range(n)))

    @classmethod
    def from_theta12(cls, t: float, n: int = 2) -> "SkewMatrix":
        m = [[0.0] * n for _ in range(n)]
        m[0][1] = float(t)
        m[1][0] = -float(t)
        return cls(tuple(map(tuple, m)))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float).reshape(self.n, self.n)

    def is_zero(self) -> bool:
        return not any(v for r in self.entries for v in r)

    def scaled(self, t: float) -> "SkewMatrix":
        return SkewMatrix(tuple(tuple(t * v for v in r) for r in self.entries))

    def __neg__(self):
        return self.scaled(-1.0)


@lru_cache(maxsize=None)
def _coset_structure(rows: Rows):
    U, d, _ = smith_normal_form(rows)
    if any(x == 0 for x in d):
        raise SingularModulus(f"singular modulus {[list(r) for r in rows]}")
    Uinv = rational_inverse(U)
    Uinv = tuple(tuple(int(v) for v in r) for r in Uinv)
    return tuple(map(tuple, U)), tuple(d), Uinv


def _residue(rows: Rows, v: Sequence[int]) -> tuple[int, ...]:
    U, d, _ = _coset_structure(rows)
    return tuple(sum(u * int(x) for u, x in zip(row, v)) % di for row, di in zip(U, d))


def _canonical(rows: Rows, v: Sequence[int]) -> tuple[int, ...]:
    r = _residue(rows, v)
    _, _, Uinv = _coset_structure(rows)
    return tuple(sum(u * x for u, x in zip(row, r)) for row in Uinv)


@dataclass(frozen=True)
class CosetIndex:
    """An element of Z^n / A Z^n, stored by its canonical representative."""

    modulus: IntSymMatrix
    rep: tuple[int, ...]

    def __post_init__(self):
        v = tuple(int(x) for x in self.rep)
        if len(v) != self.modulus.n:
            raise DimensionMismatch("representative length does not match modulus")
        object.__setattr__(self, "rep", _canonical(self.modulus.entries, v))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.rep, dtype=np.int64)

    def label(self) -> str:
        return ",".join(str(v) for v in self.rep)

    def __str__(self):
        return self.label()


def is_positive_definite(S: IntSymMatrix) -> bool:
    """Sylvester's criterion in exact integer arithmetic."""
    rows = S.entries
    return all(int_det([r[:k] for r in rows[:k]]) > 0 for k in range(1, S.n + 1))


def coset_representatives(A: IntSymMatrix) -> list[CosetIndex]:
    """Canonical representatives of Z^n / A Z^n, |det A| of them.

    Representatives are U^{-1} r for residues r in the box prod [0, d_i), where
    U A V = diag(d) is the Smith form; the order is lexicographic in r.
    """
    _, d, Uinv = _coset_structure(A.entries)
    return [CosetIndex(A, tuple(sum(u * x for u, x in zip(row, r)) for row in Uinv))
            for r in itertools.product(*(range(di) for di in d))]


def reduce_mod(A: IntSymMatrix, v: Sequence[int] | CosetIndex) -> CosetIndex:
    if isinstance(v, CosetIndex):
        v = v.rep
    return CosetIndex(A, v)


def delta_mod(A: IntSymMatrix, mu: Sequence[int] | CosetIndex, rho: Sequence[int] | CosetIndex) -> int:
    """Kronecker delta mod A: 1 iff rho - mu lies in A Z^n.

    Decided by solving A w = rho - mu over Q and testing integrality, which is
    independent of the Smith-form machinery used by :func:`reduce_mod`.
    """
    if isinstance(mu, CosetIndex):
        mu = mu.rep
    if isinstance(rho, CosetIndex):
        rho = rho.rep
    if A.det() == 0:
        raise SingularModulus(f"singular modulus {A.tolist()}")
    w = A.solve([int(r) - int(m) for r, m in zip(rho, mu)])
    return int(all(x.denominator == 1 for x in w))


def lattice_mask(A: IntSymMatrix, V: np.ndarray) -> np.ndarray:
    """Boolean mask over the rows of integer array V: row in A Z^n."""
    U, d, _ = _coset_structure(A.entries)
    V = np.asarray(V, dtype=np.int64).reshape(-1, A.n)
    res = V @ np.array(U, dtype=np.int64).T
    return np.all(res % np.array(d, dtype=np.int64) == 0, axis=1)


def check_complex_symmetric(M: np.ndarray, rtol: float = 1e-12, what: str = "matrix") -> np.ndarray:
    """Raise NotCompatible unless max|M - M^T| <= rtol * max|M|."""
    M = np.asarray(M, dtype=complex)
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    if np.max(np.abs(M - M.T), initial=0.0) > rtol * max(scale, np.finfo(float).tiny):
        raise NotCompatible(f"{what} is not symmetric (compatibility condition violated)")
    return M


# -- literal formats shared by the CLI and the JSON files --------------------

def _load(obj):
    if isinstance(obj, str):
        try:
            return json.loads(obj)
        except json.JSONDecodeError as e:
            raise ThetaError(f"malformed JSON literal {obj!r}: {e.msg}") from None
    return obj


def parse_int_matrix(obj) -> IntSymMatrix:
    data = _load(obj)
    if isinstance(data, (int, float)):
        data = [[data]]
    if not (isinstance(data, list) and all(isinstance(r, list) for r in data)):
        raise ThetaError("integer matrix literal must be an array of arrays")
    for r in data:
        for v in r:
            if isinstance(v, bool) or not isinstance(v, int):
                raise ThetaError(f"integer matrix literal has non-integer entry {v!r}")
    return IntSymMatrix(data)


def _complex_entry(v) -> complex:
    if isinstance(v, bool):
        raise ThetaError("boolean is not a number")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        return complex(v[0], v[1])
    raise ThetaError(f"bad complex literal {v!r}; expected a number or [re, im]")


def parse_complex_matrix(obj, n: int | None = None) -> np.ndarray:
    """Array of rows whose entries are numbers or [re, im] pairs.

    For n == 1 the bare pair form ``[[re, im]]`` is also accepted.
    """
    data = _load(obj)
    if not (isinstance(data, list) and data and all(isinstance(r, list) for r in data)):
        raise ThetaError("complex matrix literal must be an array of arrays")
    if n == 1 and len(data) == 1 and len(data[0]) == 2 and all(
            isinstance(x, (int, float)) for x in data[0]):
        data = [[data[0]]]
    out = np.array([[_complex_entry(v) for v in r] for r in data], dtype=complex)
    if out.ndim != 2 or out.shape[0] != out.shape[1]:
        raise ThetaError(f"complex matrix literal is not square: shape {out.shape}")
    if n is not None and out.shape[0] != n:
        raise DimensionMismatch(f"expected {n}x{n} matrix")
    return out


def parse_complex_vector(obj, n: int | None = None) -> np.ndarray:
    data = _load(obj)
    if isinstance(data, (int, float)):
        data = [data]
    if not isinstance(data, list):
        raise ThetaError("complex vector literal must be an array")
    out = np.array([_complex_entry(v) for v in data], dtype=complex)
    if n is not None and out.shape[0] != n:
        raise DimensionMismatch(f"expected vector of length {n}")
    return out


def complex_matrix_to_json(M: Iterable) -> list:
    return [[[float(v.real), float(v.imag)] for v in r] for r in np.asarray(M, dtype=complex)]
