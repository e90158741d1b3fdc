"""Tests for the closed-form kinematics."""

import cmath
import math

import numpy as np
import pytest

from boussinesq_asymptotics.config import ZETA_MAX
from boussinesq_asymptotics.errors import BranchCutError, DomainError, PoleError
from boussinesq_asymptotics.spectral_core import (
    OMEGA,
    OMEGA2,
    SQRT3,
    BranchLog,
    branch_log,
    d2phi_dk2,
    dphi_dk,
    l_func,
    phi,
    polish_saddle,
    r_tilde,
    saddle_points,
    sixth_roots,
    split_pair,
    theta,
    z_func,
)


def _make_random_k(n: int = 100, seed: int = 42) -> np.ndarray:
    """Random points in the annulus 0.3 < |k| < 2."""
    rng = np.random.default_rng(seed)
    return rng.uniform(0.3, 2.0, n) * np.exp(1j * rng.uniform(-np.pi, np.pi, n))


class TestLAndZ:
    def test_l3_at_one(self) -> None:
        assert l_func(3, 1.0 + 0j) == pytest.approx(1j / SQRT3, abs=1e-15)

    def test_z3_at_i(self) -> None:
        assert z_func(3, 1j) == pytest.approx(-1j / (2 * SQRT3), abs=1e-15)

    def test_index_shift(self) -> None:
        k = 0.7 + 0.2j
        assert l_func(1, OMEGA * k) == pytest.approx(l_func(2, k), abs=1e-14)

    def test_rotation_identity(self) -> None:
        ks = _make_random_k()
        for j in (1, 2, 3):
            nxt = j % 3 + 1
            np.testing.assert_allclose(l_func(j, OMEGA * ks), l_func(nxt, ks), atol=1e-13)
            np.testing.assert_allclose(z_func(j, OMEGA * ks), z_func(nxt, ks), atol=1e-13)

    def test_inversion_identity(self) -> None:
        ks = _make_random_k(seed=7)
        for j, partner in ((1, 2), (2, 1), (3, 3)):
            np.testing.assert_allclose(l_func(j, 1.0 / ks), l_func(partner, ks), atol=1e-13)

    def test_zero_is_rejected(self) -> None:
        with pytest.raises(DomainError):
            l_func(1, 0j)
        with pytest.raises(DomainError):
            z_func(2, 0j)

    def test_bad_index(self) -> None:
        with pytest.raises(DomainError):
            l_func(4, 1.0 + 0j)

    def test_sixth_roots(self) -> None:
        roots = sixth_roots()
        assert len(roots) == 6
        np.testing.assert_allclose(roots**6, np.ones(6), atol=1e-14)
        assert roots[2] == pytest.approx(OMEGA, abs=1e-15)


class TestPhases:
    def test_rotated_phase_relations(self) -> None:
        zeta, k = 0.3, 1.1 * cmath.exp(0.4j)
        assert phi(31, zeta, k) == pytest.approx(-phi(21, zeta, OMEGA2 * k), abs=1e-13)
        assert phi(32, zeta, k) == pytest.approx(phi(21, zeta, OMEGA * k), abs=1e-13)

    def test_schwarz_symmetry(self) -> None:
        ks = _make_random_k(20, seed=3)
        np.testing.assert_allclose(phi(21, 0.2, np.conj(ks)), np.conj(phi(21, 0.2, ks)), atol=1e-13)

    def test_theta_scales_with_t(self) -> None:
        k = 0.9 + 0.4j
        assert theta(21, 3.0, 10.0, k) == pytest.approx(10.0 * phi(21, 0.3, k), rel=1e-14)

    def test_theta_rejects_nonpositive_t(self) -> None:
        with pytest.raises(DomainError):
            theta(21, 1.0, 0.0, 1.0 + 0j)

    def test_unknown_pair(self) -> None:
        with pytest.raises(DomainError):
            split_pair(12)

    def test_derivative_matches_finite_difference(self) -> None:
        h = 1e-6
        for k in _make_random_k(5, seed=11):
            fd = (phi(21, 0.25, k + h) - phi(21, 0.25, k - h)) / (2 * h)
            assert dphi_dk(21, 0.25, k) == pytest.approx(fd, abs=1e-7)


class TestSaddlePoints:
    def test_small_zeta_limit(self) -> None:
        s = saddle_points(1e-9)
        assert s.k4 == pytest.approx(cmath.exp(-1j * math.pi / 4), abs=1e-8)
        assert s.k2 == pytest.approx(cmath.exp(-3j * math.pi / 4), abs=1e-8)

    def test_unit_modulus_and_conjugates(self) -> None:
        s = saddle_points(0.4)
        assert abs(s.k2) == pytest.approx(1.0, abs=1e-12)
        assert abs(s.k4) == pytest.approx(1.0, abs=1e-12)
        assert s.k1 == s.k2.conjugate()
        assert s.k3 == s.k4.conjugate()

    def test_argument_ranges(self) -> None:
        for zeta in np.linspace(0.02, ZETA_MAX - 0.02, 12):
            s = saddle_points(float(zeta))
            assert -math.pi / 4 < cmath.phase(s.k4) < -math.pi / 6
            assert -3 * math.pi / 4 < cmath.phase(s.k2) < -2 * math.pi / 3

    def test_stationarity_by_finite_difference(self) -> None:
        h = 1e-6
        for zeta in np.linspace(0.05, 0.52, 50):
            for kj in saddle_points(float(zeta)).points:
                fd = (phi(21, zeta, kj + h) - phi(21, zeta, kj - h)) / (2 * h)
                assert abs(fd) < 1e-8

    def test_rotated_saddles(self) -> None:
        s = saddle_points(0.25)
        for kj in s.points:
            assert abs(dphi_dk(31, 0.25, OMEGA * kj)) < 1e-12
            assert abs(dphi_dk(32, 0.25, OMEGA2 * kj)) < 1e-12

    def test_newton_polish_barely_moves(self) -> None:
        s = saddle_points(0.3)
        polished, moved = polish_saddle(0.3, s.k4)
        assert moved < 1e-12
        assert abs(d2phi_dk2(21, 0.3, polished)) > 0

    @pytest.mark.parametrize("zeta", [0.0, -0.1, ZETA_MAX, 1.0])
    def test_outside_sector(self, zeta: float) -> None:
        with pytest.raises(DomainError):
            saddle_points(zeta)


class TestRTilde:
    def test_zero_at_omega(self) -> None:
        assert abs(r_tilde(OMEGA)) < 1e-15

    def test_real_on_circle(self) -> None:
        assert abs(np.imag(r_tilde(cmath.exp(0.3j)))) < 1e-12

    def test_factorization_identity(self) -> None:
        k = cmath.exp(0.3j)
        rhs = r_tilde(1 / (OMEGA * k)) * r_tilde(1 / (OMEGA2 * k))
        assert r_tilde(k) == pytest.approx(rhs, abs=1e-12)

    @pytest.mark.parametrize("pole", [OMEGA2, -OMEGA2])
    def test_poles(self, pole: complex) -> None:
        with pytest.raises(PoleError):
            r_tilde(pole)


class TestBranchLog:
    def test_ln_s_normalization(self) -> None:
        value = branch_log("ln_s", 1j, 1j + 1.0)
        assert value.imag == pytest.approx(2 * math.pi, abs=1e-14)
        assert value.real == pytest.approx(0.0, abs=1e-15)

    def test_ln_tilde_s_normalization(self) -> None:
        value = branch_log("ln_tilde_s", 1j, 1j + 1.0)
        assert value.imag == pytest.approx(0.0, abs=1e-14)

    def test_normalization_for_arc_points(self) -> None:
        for angle in (math.pi / 3, 0.45 * math.pi, 0.6 * math.pi):
            s = cmath.exp(1j * angle)
            assert BranchLog("ln_s", s)(s + 1.0).imag == pytest.approx(2 * math.pi, abs=1e-12)

    def test_continuity_off_cut(self) -> None:
        log = BranchLog("ln_s", cmath.exp(0.6j * math.pi))
        k = 1.5 + 0.0j
        for eps in (1e-6, 1e-8):
            upper, lower = log(k + 1j * eps), log(k - 1j * eps)
            assert abs(upper - lower) < 10 * eps

    def test_jump_across_ray_cut(self) -> None:
        log = BranchLog("ln_s", 1j)
        k = 2.5j
        left, right = log(k - 1e-6), log(k + 1e-6)
        assert abs(abs(left.imag - right.imag) - 2 * math.pi) < 1e-5

    def test_on_cut_raises(self) -> None:
        with pytest.raises(BranchCutError):
            branch_log("ln_s", 1j, 3j)
        with pytest.raises(BranchCutError):
            branch_log("ln_tilde_s", 1j, -0.5 + 0j)

    def test_principal_and_ln0(self) -> None:
        assert branch_log("principal", 0j, -1.0 + 1e-3j).imag == pytest.approx(math.pi, abs=1e-2)
        assert branch_log("ln_0", 0j, 1.0 - 1e-3j).imag == pytest.approx(2 * math.pi, abs=1e-2)

    def test_branch_point_must_be_on_arc(self) -> None:
        with pytest.raises(DomainError):
            BranchLog("ln_s", 0.5j)
        with pytest.raises(DomainError):
            BranchLog("ln_tilde_s", cmath.exp(0.4j))
