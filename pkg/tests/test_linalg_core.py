import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nctheta.errors import DimensionMismatch, NotCompatible, SingularModulus, ThetaError
from nctheta.linalg_core import (
    CosetIndex,
    IntSymMatrix,
    SkewMatrix,
    check_complex_symmetric,
    coset_representatives,
    delta_mod,
    int_det,
    is_positive_definite,
    lattice_mask,
    parse_complex_matrix,
    parse_complex_vector,
    parse_int_matrix,
    rational_inverse,
    reduce_mod,
    smith_normal_form,
)


def sym_matrices(n, lo=-6, hi=6):
    return st.lists(st.integers(lo, hi), min_size=n * (n + 1) // 2, max_size=n * (n + 1) // 2).map(
        lambda xs: _sym_from_upper(n, xs))


def _sym_from_upper(n, xs):
    m = [[0] * n for _ in range(n)]
    it = iter(xs)
    for i in range(n):
        for j in range(i, n):
            m[i][j] = m[j][i] = next(it)
    return IntSymMatrix(m)


any_sym = st.integers(1, 3).flatmap(sym_matrices)


class TestIntSymMatrix:
    def test_rejects_asymmetric(self):
        with pytest.raises(ThetaError):
            IntSymMatrix([[1, 2], [3, 4]])

    def test_rejects_non_integer(self):
        with pytest.raises(ThetaError):
            IntSymMatrix([[1.5]])

    def test_arithmetic(self):
        a, b = IntSymMatrix.diag(1, -4), IntSymMatrix.diag(2, -2)
        assert b - a == IntSymMatrix.diag(1, 2)
        assert a + b == IntSymMatrix.diag(3, -6)
        assert -a == IntSymMatrix.diag(-1, 4)

    def test_size_mismatch(self):
        with pytest.raises(DimensionMismatch):
            IntSymMatrix.diag(1) + IntSymMatrix.diag(1, 2)

    def test_exact_inverse(self):
        A = IntSymMatrix([[2, 1], [1, 3]])
        inv = A.inverse()
        assert inv == ((Fraction(3, 5), Fraction(-1, 5)), (Fraction(-1, 5), Fraction(2, 5)))
        with pytest.raises(SingularModulus):
            IntSymMatrix([[1, 1], [1, 1]]).inverse()

    @given(any_sym)
    def test_det_matches_numpy(self, A):
        assert A.det() == round(np.linalg.det(A.to_float()))


class TestPositiveDefinite:
    @pytest.mark.parametrize("A,want", [
        (IntSymMatrix.diag(1, 2), True),
        (IntSymMatrix.diag(1, -4), False),
        (IntSymMatrix.diag(3, 3), True),
        (IntSymMatrix([[2, 2], [2, 2]]), False),
    ])
    def test_examples(self, A, want):
        assert is_positive_definite(A) is want

    @settings(max_examples=60)
    @given(any_sym, st.data())
    def test_implies_positive_quadratic_form(self, A, data):
        if not is_positive_definite(A):
            return
        assert A.det() > 0
        n = A.n
        for _ in range(20):
            x = data.draw(st.lists(st.fractions(-5, 5, max_denominator=7), min_size=n, max_size=n))
            if all(v == 0 for v in x):
                continue
            q = sum(x[i] * A.entries[i][j] * x[j] for i in range(n) for j in range(n))
            assert q > 0


class TestCosets:
    def test_examples(self):
        assert [c.rep for c in coset_representatives(IntSymMatrix.diag(2))] == [(0,), (1,)]
        assert len(coset_representatives(IntSymMatrix.diag(1, 2))) == 2
        assert len(coset_representatives(IntSymMatrix.diag(3, 3))) == 9

    def test_singular(self):
        with pytest.raises(SingularModulus):
            coset_representatives(IntSymMatrix.diag(1, 0))

    def test_delta_examples(self):
        assert delta_mod(IntSymMatrix.diag(2), [1], [3]) == 1
        assert delta_mod(IntSymMatrix.diag(2), [0], [3]) == 0
        assert delta_mod(IntSymMatrix.diag(1, 2), [0, 0], [5, 4]) == 1

    def test_reduce_examples(self):
        assert reduce_mod(IntSymMatrix.diag(3), [7]).rep == (1,)
        assert reduce_mod(IntSymMatrix.diag(1, 2), [9, -1]).rep == (0, 1)
        assert reduce_mod(IntSymMatrix.diag(1), [-17]).rep == (0,)

    def test_count_exhaustive_small(self):
        # every nonsingular symmetric matrix with entries in [-3, 3], n <= 2
        for n in (1, 2):
            vals = range(-3, 4)
            for xs in itertools.product(vals, repeat=n * (n + 1) // 2):
                A = _sym_from_upper(n, xs)
                d = A.det()
                if d == 0:
                    continue
                reps = coset_representatives(A)
                assert len(reps) == abs(d)
                assert len({r.rep for r in reps}) == abs(d)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 3).flatmap(lambda n: sym_matrices(n, -4, 4)))
    def test_count_random(self, A):
        if A.det() == 0 or abs(A.det()) > 100:
            return
        reps = coset_representatives(A)
        assert len(reps) == abs(A.det())
        # representatives are pairwise inequivalent
        for a, b in itertools.combinations(reps, 2):
            assert delta_mod(A, a.rep, b.rep) == 0

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 3).flatmap(lambda n: st.tuples(
        sym_matrices(n, -5, 5), st.lists(st.integers(-20, 20), min_size=n, max_size=n),
        st.lists(st.integers(-5, 5), min_size=n, max_size=n))))
    def test_reduce_is_class_function(self, args):
        A, v, w = args
        if A.det() == 0:
            return
        r = reduce_mod(A, v)
        shifted = (np.array(v) + A.array @ np.array(w)).tolist()
        assert reduce_mod(A, shifted) == r
        assert reduce_mod(A, r.rep) == r
        assert delta_mod(A, v, r.rep) == 1

    def test_index_checks_modulus(self):
        A = IntSymMatrix.diag(2)
        c = CosetIndex(A, (5,))
        assert c.rep == (1,) and c.label() == "1"
        with pytest.raises(SingularModulus):
            CosetIndex(IntSymMatrix.diag(0), (0,))

    def test_lattice_mask(self):
        A = IntSymMatrix([[2, 1], [1, 3]])
        V = np.array([[2, 1], [1, 3], [3, 4], [1, 0], [0, 0]])
        assert lattice_mask(A, V).tolist() == [True, True, True, False, True]


def test_smith_normal_form_identity():
    rows = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    U, d, V = smith_normal_form(rows)
    D = np.array(U) @ np.array(rows) @ np.array(V)
    assert np.array_equal(D, np.diag(d))
    assert d == [2, 6, 12]
    assert abs(int_det(U)) == 1 and abs(int_det(V)) == 1


def test_rational_inverse_roundtrip():
    rows = [[4, 1, 0], [1, 3, 1], [0, 1, 2]]
    inv = rational_inverse(rows)
    prod = [[sum(Fraction(rows[i][k]) * inv[k][j] for k in range(3)) for j in range(3)]
            for i in range(3)]
    assert prod == [[1 if i == j else 0 for j in range(3)] for i in range(3)]


class TestSkew:
    def test_from_theta12(self):
        th = SkewMatrix.from_theta12(0.3)
        assert th.array.tolist() == [[0.0, 0.3], [-0.3, 0.0]]
        assert not th.is_zero() and SkewMatrix.zero(2).is_zero()

    def test_rejects_nonskew(self):
        with pytest.raises(ThetaError):
            SkewMatrix([[0.0, 1.0], [1.0, 0.0]])


class TestLiterals:
    def test_complex_matrix_pairs(self):
        M = parse_complex_matrix("[[0,1]]", 1)
        assert M.shape == (1, 1) and M[0, 0] == 1j
        M = parse_complex_matrix("[[[1,0],2],[2,[0,1]]]")
        assert M[1, 1] == 1j and M[0, 1] == 2

    def test_bad_literals(self):
        with pytest.raises(ThetaError):
            parse_complex_matrix("[[0,1")
        with pytest.raises(ThetaError):
            parse_int_matrix("[[1.5]]")
        with pytest.raises(DimensionMismatch):
            parse_complex_vector("[1,2]", 3)

    def test_complex_symmetry_check(self):
        check_complex_symmetric(np.array([[1, 2j], [2j, 1]]))
        with pytest.raises(NotCompatible):
            check_complex_symmetric(np.array([[1, 2j], [2.1j, 1]]))
