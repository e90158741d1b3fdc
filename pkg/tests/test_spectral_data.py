"""Tests for spectral-data evaluators and the synthetic admissible families."""

import math

import numpy as np
import pytest

from boussinesq_asymptotics.errors import AdmissibilityError, DomainError, PoleError, RegionMismatch
from boussinesq_asymptotics.forward_scattering import circle_symmetry_residual
from boussinesq_asymptotics.spectral_core import OMEGA, OMEGA2, r_tilde
from boussinesq_asymptotics.spectral_data import (
    DecoupledCircleData,
    PerturbedSpectralData,
    TabulatedSpectralData,
    ZeroSpectralData,
    single_lobe,
    synthetic_spectral_data,
    two_lobe,
    validate_support,
)


def _make_circle_points(n: int = 200, seed: int = 42) -> np.ndarray:
    """Random unit-circle points at least 2 degrees away from the sixth roots."""
    rng = np.random.default_rng(seed)
    deg = rng.uniform(0.0, 360.0, 4 * n)
    dist = np.abs((deg + 30.0) % 60.0 - 30.0)
    return np.exp(1j * np.radians(deg[dist > 2.0][:n]))


def _make_tabulated(per_arc: int = 20) -> TabulatedSpectralData:
    gap = 1e-3
    theta = np.concatenate(
        [np.linspace(j * np.pi / 3 + gap, (j + 1) * np.pi / 3 - gap, per_arc) for j in range(6)]
    )
    rho = np.geomspace(1.001, 8.0, 12)
    sigma = np.linspace(0.2, 0.999, 8)
    return TabulatedSpectralData(
        circle_theta=theta,
        circle_r1=0.1 * np.exp(1j * theta),
        circle_r2=0.05 * np.cos(theta) + 0j,
        ray_rho=rho,
        ray_r1=0.2 * np.exp(-rho) + 0j,
        segment_sigma=sigma,
        segment_r2=0.1 * sigma + 0j,
    )


class TestZeroData:
    def test_everything_vanishes(self) -> None:
        data = ZeroSpectralData()
        ks = _make_circle_points(20)
        np.testing.assert_allclose(data.r1(ks), 0.0)
        np.testing.assert_allclose(data.r2(ks), 0.0)
        np.testing.assert_allclose(data.f(ks), 1.0)

    def test_family_lookup(self) -> None:
        assert isinstance(synthetic_spectral_data("zero"), ZeroSpectralData)


class TestContourDispatch:
    def test_r1_vanishes_on_upper_segment(self) -> None:
        data = two_lobe()
        assert data.r1(0.5j) == 0

    def test_r1_off_contour(self) -> None:
        with pytest.raises(RegionMismatch):
            two_lobe().r1(0.5 + 0.5j)

    def test_r2_off_contour(self) -> None:
        with pytest.raises(RegionMismatch):
            two_lobe().r2(2.0 + 0j)

    @pytest.mark.parametrize("pole", [OMEGA2, -OMEGA2])
    def test_r2_pole(self, pole: complex) -> None:
        with pytest.raises(PoleError):
            two_lobe().r2(pole)

    def test_array_shape_preserved(self) -> None:
        ks = _make_circle_points(12).reshape(3, 4)
        assert two_lobe().r1(ks).shape == (3, 4)

    def test_ray_values_decay(self) -> None:
        data = two_lobe()
        near, far = abs(data.r1(-1.5j)), abs(data.r1(-8.0j))
        assert far < near


class TestDecoupledFamilies:
    def test_one_plus_r1r2_is_one_minus_b_squared(self) -> None:
        data = two_lobe()
        ks = _make_circle_points(100)
        expected = 1.0 - np.abs(data.b(np.angle(ks))) ** 2
        np.testing.assert_allclose(data.one_plus_r1r2(ks), expected, atol=1e-13)

    def test_kbar_symmetry_on_circle(self) -> None:
        data = two_lobe()
        ks = _make_circle_points(100, seed=1)
        np.testing.assert_allclose(data.r2(ks), r_tilde(ks) * np.conj(data.r1(ks)), atol=1e-13)

    @pytest.mark.parametrize("family", ["single_lobe", "two_lobe"])
    def test_circle_symmetry(self, family: str) -> None:
        data = synthetic_spectral_data(family)
        assert circle_symmetry_residual(data, _make_circle_points(300, seed=5)) < 1e-12

    def test_single_lobe_zeros_of_f(self) -> None:
        data = single_lobe()
        assert abs(data.f(1.0 + 0j)) < 1e-14
        assert abs(data.f(OMEGA)) < 1e-14

    def test_one_plus_r1r2_nonnegative(self) -> None:
        data = two_lobe()
        ks = _make_circle_points(200, seed=9)
        assert np.all(np.real(data.one_plus_r1r2(ks)) > 0)

    def test_single_lobe_width_range(self) -> None:
        with pytest.raises(AdmissibilityError):
            single_lobe(half_width_deg=40.0)

    def test_unknown_family(self) -> None:
        with pytest.raises(DomainError):
            synthetic_spectral_data("three_lobe")


class TestSupportValidation:
    def test_rotated_overlap_rejected(self) -> None:
        with pytest.raises(AdmissibilityError):
            validate_support([(10.0, 50.0), (125.0, 170.0)], [0.5, 0.5])

    def test_support_containing_i_rejected(self) -> None:
        with pytest.raises(AdmissibilityError):
            validate_support([(80.0, 100.0)], [0.5])

    def test_amplitude_range(self) -> None:
        with pytest.raises(AdmissibilityError):
            validate_support([(20.0, 55.0)], [1.2])

    def test_singular_angle_rejected(self) -> None:
        with pytest.raises(AdmissibilityError):
            DecoupledCircleData([(50.0, 70.0)], [0.3], label="bad")

    def test_length_mismatch(self) -> None:
        with pytest.raises(AdmissibilityError):
            validate_support([(20.0, 55.0)], [0.3, 0.4])


class TestPerturbation:
    def test_r2_defect_breaks_circle_symmetry(self) -> None:
        base = two_lobe()
        eps = 1e-3
        perturbed = PerturbedSpectralData(base, "r2", math.radians(40.0), eps)
        # omega k lands on the defect centre
        k = np.array([np.exp(1j * math.radians(-80.0))])
        assert circle_symmetry_residual(perturbed, k) == pytest.approx(eps, rel=1e-6)
        assert circle_symmetry_residual(base, k) < 1e-12

    def test_defect_is_local(self) -> None:
        base = two_lobe()
        perturbed = PerturbedSpectralData(base, "r2", math.radians(40.0), 1e-3)
        k = np.exp(1j * math.radians(200.0))
        assert perturbed.r2(k) == pytest.approx(base.r2(k), abs=1e-15)

    def test_bad_target(self) -> None:
        with pytest.raises(DomainError):
            PerturbedSpectralData(two_lobe(), "r3", 0.0, 1e-3)


class TestTabulatedData:
    def test_circle_interpolation(self) -> None:
        data = _make_tabulated()
        theta = np.array([0.3, 1.4, 2.2, -0.7, -2.5])
        ks = np.exp(1j * theta)
        np.testing.assert_allclose(data.r1(ks), 0.1 * ks, atol=1e-7)
        np.testing.assert_allclose(data.r2(ks), 0.05 * np.cos(theta), atol=1e-7)

    def test_ray_interpolation_and_cutoff(self) -> None:
        data = _make_tabulated()
        assert data.r1(-3.0j) == pytest.approx(0.2 * math.exp(-3.0), abs=1e-4)
        assert data.r1(-20.0j) == 0

    def test_segment_interpolation(self) -> None:
        data = _make_tabulated()
        assert data.r2(-0.5j) == pytest.approx(0.05, abs=1e-10)

    def test_gap_without_smoothness_certificate(self) -> None:
        data = _make_tabulated()
        data.smooth_across_gaps = False
        with pytest.raises(RegionMismatch):
            data.r1(np.exp(1j * (np.pi / 3 + 1e-4)))

    def test_mode(self) -> None:
        assert _make_tabulated().mode == "from_initial_data"
