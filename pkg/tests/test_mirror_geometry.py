import itertools

import numpy as np
import pytest

from nctheta.errors import NotPositiveDefinite, ParallelLagrangians
from nctheta.linalg_core import IntSymMatrix
from nctheta.mirror_geometry import (
    AffineLagrangian,
    SymplecticForm,
    c_mirror,
    intersection_count,
    intersection_point,
    mirror_tensor,
    triangle_area,
    triangle_for_offset,
)
from nctheta.structure_constants import LabelTriple, structure_tensor

D = IntSymMatrix.diag
A1, A2, A3 = D(1, -4), D(2, -2), D(4, -1)


def L(a, c):
    return AffineLagrangian(D(a), [c])


class TestIntersection:
    def test_examples(self):
        assert np.array_equal(intersection_point(L(0, 0), L(1, 0)), [0, 0])
        assert np.allclose(intersection_point(L(0, 0), L(1, 1)), [-1, 0])
        assert np.allclose(intersection_point(L(0, 0), L(3, 0)), [0, 0])

    def test_lies_on_both(self):
        La = AffineLagrangian(A1, [0.3, -1])
        Lb = AffineLagrangian(A3, [2, 0.5])
        p = intersection_point(La, Lb)
        x, y = p[:2], p[2:]
        assert np.allclose(A1.to_float() @ x + La.c, y)
        assert np.allclose(A3.to_float() @ x + Lb.c, y)

    def test_parallel(self):
        with pytest.raises(ParallelLagrangians):
            intersection_point(L(2, 0), L(2, 1))

    def test_counts_equal_det(self):
        assert intersection_count(D(0), D(3)) == 3
        assert intersection_count(A1, A2) == 2
        assert intersection_count(A1, A3) == 9


class TestArea:
    def test_degenerate(self):
        p = [0.2, 0.4]
        assert triangle_area(p, p, p) == 0

    def test_example(self):
        assert abs(triangle_area([-1, 0], [0.5, 1.5], [0, 0]) - 1.5) < 1e-15
        assert abs(triangle_for_offset(D(0), D(1), D(3), [1], [0]) - 1.5) < 1e-15

    def test_swap_negates(self):
        a, b, c = [-1, 0], [0.5, 1.5], [0, 0]
        assert triangle_area(b, a, c) == -triangle_area(a, b, c)

    def test_symplectic_form(self):
        w = SymplecticForm(1)
        assert w([1, 0], [0, 1]) == -1 and w([0, 1], [1, 0]) == 1

    def test_positive_on_enumerated_terms(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            u = rng.integers(-4, 5, size=2)
            rho = rng.integers(-4, 5, size=2)
            # the area is v^T Q v with Q = A_ab^{-1} + A_bc^{-1} positive definite
            assert triangle_for_offset(A1, A2, A3, u, rho) >= -1e-12


class TestCMirror:
    def test_n1_examples(self):
        assert abs(c_mirror(D(0), D(1), D(3), [0], [0], [0]) - 1.0000000130248243) < 1e-15
        assert abs(c_mirror(D(0), D(1), D(3), [0], [1], [0]) - 0.017966582042258858) < 1e-15

    def test_empty_sum(self):
        assert c_mirror(D(0), D(2), D(4), [0], [1], [0]) == 0

    def test_not_positive(self):
        with pytest.raises(NotPositiveDefinite):
            c_mirror(A2, A1, A3, [0, 0], [0, 0], [0, 0])

    def test_n1_triples_match_analytic(self):
        for a, b, c in itertools.product(range(0, 6), repeat=3):
            if not (a < b < c and c - a <= 5):
                continue
            A_a, A_b, A_c = D(a), D(b), D(c)
            want = structure_tensor(LabelTriple(A_a, A_b, A_c)).values.real
            got = mirror_tensor(A_a, A_b, A_c)
            assert np.max(np.abs(got - want) / np.maximum(np.abs(want), 1e-300)) < 1e-10

    def test_det4_triple_matches_analytic(self):
        want = structure_tensor(LabelTriple(A1, A2, A3)).values.real
        got = mirror_tensor(A1, A2, A3)
        assert got.shape == (2, 2, 9)
        nz = want != 0
        assert np.array_equal(got != 0, nz)
        assert np.max(np.abs(got[nz] - want[nz]) / want[nz]) < 1e-10
