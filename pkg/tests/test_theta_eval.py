import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nctheta.errors import (
    IndexModulusMismatch,
    NotCompatible,
    NotPositiveDefinite,
    NotSiegel,
    TruncationOverflow,
)
from nctheta.lattice import choose_radius, gaussian_lattice_sum, gaussian_majorant, tail_bound
from nctheta.linalg_core import CosetIndex, IntSymMatrix, SkewMatrix
from nctheta.theta_eval import (
    NCDeformation,
    SiegelPoint,
    ThetaCharacteristics,
    compute_M,
    e_comm,
    e_comm_via_theta,
    e_nc,
    e_nc_via_theta,
    normalization,
    poisson_check,
    theta_with_char,
)

A1, A2, A3 = IntSymMatrix.diag(1, -4), IntSymMatrix.diag(2, -2), IntSymMatrix.diag(4, -1)
TH = SkewMatrix.from_theta12(0.3)
JACOBI_1 = math.fsum(math.exp(-math.pi * m * m) for m in range(-10, 11))


def brute_theta(c1, c2, omega, z, R=12):
    n = len(c1)
    total = 0j
    for m in itertools.product(range(-R, R + 1), repeat=n):
        y = np.array(m) + c1
        total += np.exp(1j * math.pi * y @ omega @ y + 2j * math.pi * y @ (z + c2))
    return total


class TestLattice:
    def test_tail_bound_dominates_actual_tail(self):
        lam = 0.7
        for R in (1, 2, 4):
            actual = sum(math.exp(-math.pi * lam * w * w) for w in range(-60, 61) if abs(w) > R)
            assert tail_bound(gaussian_majorant(lam), 1, R) >= actual

    def test_radius_grows_as_tol_shrinks(self):
        h = gaussian_majorant(1.0)
        assert choose_radius(h, 2, 1e-4) <= choose_radius(h, 2, 1e-14)

    def test_overflow(self):
        with pytest.raises(TruncationOverflow):
            gaussian_lattice_sum(np.array([[1e-6]]), np.zeros(1), tol=1e-14, max_radius=20)

    def test_off_center_sum(self):
        # a far-away center must not lose the mass of the sum
        val, _ = gaussian_lattice_sum(np.array([[1.0]]), np.array([37.3]))
        want = math.fsum(math.exp(-math.pi * (w + 0.3) ** 2) for w in range(-30, 31))
        assert abs(val - want) < 1e-13


class TestThetaWithChar:
    def test_jacobi_value(self):
        v = theta_with_char(ThetaCharacteristics.zero(1), 1j * np.eye(1), [0])
        assert abs(v - 1.08643481121330801) < 1e-13
        assert abs(v - JACOBI_1) < 1e-13

    def test_periodic_in_z(self):
        ch = ThetaCharacteristics.zero(1)
        assert abs(theta_with_char(ch, [[1j]], [1]) - theta_with_char(ch, [[1j]], [0])) < 1e-13

    def test_diagonal_factorizes(self):
        v2 = theta_with_char(ThetaCharacteristics.zero(2), 1j * np.eye(2), [0, 0])
        assert abs(v2 - JACOBI_1 ** 2) < 1e-12

    @pytest.mark.parametrize("omega", [[[-1j]], [[1.0]], [[1j, 0.5], [0.4, 1j]]])
    def test_not_siegel(self, omega):
        with pytest.raises(NotSiegel):
            SiegelPoint(np.array(omega))

    @settings(max_examples=25, deadline=None)
    @given(st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-0.5, 0.5),
                     st.floats(0, 1), st.floats(-1, 1), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5)))
    def test_matches_brute_force(self, p):
        re12, c1a, c1b, c2a, x, y1, y2 = p
        omega = np.array([[0.3 + 1.2j, re12 + 0.3j], [re12 + 0.3j, -0.2 + 0.9j]])
        c1, c2 = np.array([c1a, c1b]), np.array([c2a, 0.25])
        z = np.array([x + 1j * y1, 0.2 + 1j * y2])
        got = theta_with_char(ThetaCharacteristics(c1, c2), omega, z, tol=1e-14)
        # c1 is reduced mod 1; integer shifts of c1 only reindex the sum
        want = brute_theta(np.mod(c1, 1.0), c2, omega, z)
        assert abs(got - want) <= 1e-11 * max(1.0, abs(want))

    def test_c2_integer_shift_phase(self):
        c1, c2, k = np.array([0.25]), np.array([0.1]), np.array([1.0])
        a = theta_with_char(ThetaCharacteristics(c1, c2 + k), [[1j]], [0.3])
        b = theta_with_char(ThetaCharacteristics(c1, c2), [[1j]], [0.3])
        assert abs(a - b * cmath.exp(2j * math.pi * 0.25)) < 1e-13


class TestEComm:
    def test_n1_value(self):
        Z, O = IntSymMatrix.diag(0), IntSymMatrix.diag(1)
        assert abs(e_comm(Z, O, [0], [0]) - JACOBI_1) < 1e-13
        assert abs(e_comm(Z, O, [0], [1]) - JACOBI_1) < 1e-13

    def test_diagonal_labels_factorize(self):
        one = e_comm(IntSymMatrix.diag(0), IntSymMatrix.diag(1), [0], [0])
        two = e_comm(IntSymMatrix.diag(0), IntSymMatrix.diag(2), [0], [0])
        assert abs(e_comm(A1, A2, [0, 0], [0, 0]) - one * two) < 1e-13

    def test_not_positive_definite(self):
        with pytest.raises(NotPositiveDefinite):
            e_comm(A2, A1, [0, 0], [0, 0])

    def test_coset_index_modulus_checked(self):
        with pytest.raises(IndexModulusMismatch):
            e_comm(A1, A2, CosetIndex(IntSymMatrix.diag(3, 3), (0, 0)), [0, 0])

    def test_mu_depends_only_on_coset(self):
        z = [0.2 + 0.1j, -0.3 + 0.4j]
        assert abs(e_comm(A1, A3, [1, 2], z) - e_comm(A1, A3, [4, -1], z)) < 1e-12

    @settings(max_examples=20, deadline=None)
    @given(st.floats(-1, 1), st.floats(-1, 1), st.integers(-3, 3), st.integers(-3, 3))
    def test_quasi_periodic(self, x, y, l1, l2):
        z = np.array([x + 0.5j * y, 0.3 - 0.2j])
        a = e_comm(A1, A2, [1, 1], z)
        b = e_comm(A1, A2, [1, 1], z + np.array([l1, l2]))
        assert abs(a - b) <= 1e-10 * max(1.0, abs(a))

    def test_poisson_against_theta_form(self):
        rng = np.random.default_rng(3)
        for z in rng.uniform(-0.7, 0.7, size=(10, 2)) + 1j * rng.uniform(-0.7, 0.7, size=(10, 2)):
            for mu in ([0, 0], [0, 1], [2, 1]):
                a, b = e_comm(A1, A3, mu, z, 1e-14), e_comm_via_theta(A1, A3, mu, z, 1e-14)
                assert abs(a - b) <= 1e-11 * abs(a)

    def test_poisson_random_cases(self):
        assert poisson_check(seed=11).passed


class TestDeformation:
    def test_M_commutative_exact(self):
        M = compute_M(A1, A2, SkewMatrix.zero(2))
        assert np.array_equal(M, np.diag([1.0, 2.0]).astype(complex))

    def test_M_example(self):
        M = compute_M(A1, A2, TH)
        want = np.array([[1, -0.9j], [-0.9j, 2]]) / 1.405
        assert np.max(np.abs(M - want)) < 1e-14

    def test_incompatible(self):
        with pytest.raises(NotCompatible):
            compute_M(A1, IntSymMatrix.diag(1, -3), TH)
        with pytest.raises(NotCompatible):
            NCDeformation(TH, [A1, IntSymMatrix.diag(1, -3)])

    def test_compatibility_is_equal_determinant(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            a, b, d = rng.integers(-6, 7, size=3)
            A = np.array([[a, b], [b, d]], dtype=float)
            t = rng.uniform(-2, 2)
            th = np.array([[0, t], [-t, 0]])
            assert np.allclose(A @ th @ A, np.linalg.det(A) * th)

    def test_normalization_trivial_at_zero(self):
        assert normalization(A1, A2, SkewMatrix.zero(2)) == 1

    def test_normalization_continuous_in_theta(self):
        vals = [normalization(A1, A2, SkewMatrix.from_theta12(t)) for t in np.linspace(0, 0.3, 31)]
        assert max(abs(b - a) for a, b in zip(vals, vals[1:])) < 0.05

    def test_e_nc_reduces_to_e_comm(self):
        z = [0.3 + 0.2j, -0.1 + 0.5j]
        assert abs(e_nc(A1, A2, [1, 0], z, SkewMatrix.zero(2)) - e_comm(A1, A2, [1, 0], z)) < 1e-14
        Z, O = IntSymMatrix.diag(0), IntSymMatrix.diag(1)
        assert e_nc(Z, O, [0], [0.2], SkewMatrix.zero(1)) == e_comm(Z, O, [0], [0.2])

    def test_e_nc_small_theta_continuity(self):
        z = [0.3 + 0.2j, -0.1 + 0.5j]
        a = e_nc(A1, A2, [0, 1], z, SkewMatrix.from_theta12(1e-8))
        b = e_comm(A1, A2, [0, 1], z)
        assert abs(a - b) < 1e-6 * abs(b)

    def test_e_nc_direct_double_sum(self):
        M = compute_M(A1, A2, TH)
        C = normalization(A1, A2, TH)
        brute = sum(np.exp(-math.pi * np.array(w) @ M @ np.array(w))
                    for w in itertools.product(range(-12, 13), repeat=2))
        assert abs(e_nc(A1, A2, [0, 0], [0, 0], TH) - C * brute) < 1e-13
        assert abs(e_nc(A1, A2, [0, 0], [0, 0], TH)) > 0

    def test_e_nc_theta_form(self):
        rng = np.random.default_rng(9)
        for z in rng.uniform(-0.8, 0.8, size=(8, 2)) + 1j * rng.uniform(-0.8, 0.8, size=(8, 2)):
            for A_a, A_b, mu in ((A1, A2, [0, 1]), (A2, A3, [1, 0]), (A1, A3, [2, 1])):
                a = e_nc(A_a, A_b, mu, z, TH, 1e-14)
                b = e_nc_via_theta(A_a, A_b, mu, z, TH, 1e-14)
                assert abs(a - b) <= 1e-11 * abs(a)
