"""Tests for the parabolic cylinder functions and the two model problems on the cross."""

import cmath
import math

import mpmath
import numpy as np
import pytest

from boussinesq_asymptotics.config import MODEL1_SAMPLE_Q, MODEL2_SAMPLE_Q, PSI_JUMP_POINTS
from boussinesq_asymptotics.errors import (
    AdmissibilityError,
    BranchCutError,
    DegenerateBeta,
    DomainError,
    RegionMismatch,
)
from boussinesq_asymptotics.model_rhp import (
    X_RAYS,
    CrossPoint,
    ModelParams1,
    ModelParams2,
    ModelRHP,
    beta_model1,
    beta_model2,
    log_pcf_D,
    mX_eval,
    pcf_D,
    pcf_D_prime,
    psi_matrix,
    vpsi_explicit,
)


def _mp_pcfd(order: complex, z: complex) -> complex:
    with mpmath.workdps(30):
        return complex(mpmath.pcfd(mpmath.mpc(order.real, order.imag), mpmath.mpc(z.real, z.imag)))


def _make_params2() -> ModelParams2:
    return ModelParams2.from_free(*MODEL2_SAMPLE_Q)


class TestParabolicCylinder:
    @pytest.mark.parametrize("order", [0.3j, -0.3j, 0.5 + 0.2j])
    @pytest.mark.parametrize("z", [0.4 + 0.1j, -1.5 + 2.0j, 3.0 - 4.0j])
    def test_series_matches_mpmath(self, order: complex, z: complex) -> None:
        assert pcf_D(order, z) == pytest.approx(_mp_pcfd(order, z), rel=1e-10)

    @pytest.mark.parametrize("order", [0.3j, -0.3j])
    @pytest.mark.parametrize("angle", [0.3, 1.2, 2.0, -0.5, -1.2, -1.9])
    def test_expansion_matches_mpmath(self, order: complex, angle: float) -> None:
        z = cmath.rect(8.0, angle)
        assert pcf_D(order, z) == pytest.approx(_mp_pcfd(order, z), rel=1e-8)

    def test_integer_orders(self) -> None:
        for z in (0.5 + 0.5j, 2.0 - 1.0j, 7.0 + 1.0j):
            assert pcf_D(0, z) == pytest.approx(cmath.exp(-z * z / 4), rel=1e-12)
            assert pcf_D(1, z) == pytest.approx(z * cmath.exp(-z * z / 4), rel=1e-12)

    def test_order_zero_on_real_axis(self) -> None:
        assert pcf_D(0, 1.3 + 0j) == pytest.approx(math.exp(-0.4225), rel=1e-13)

    def test_three_term_recurrence(self) -> None:
        a, z = 0.4j, 2.0 + 1.0j
        residual = pcf_D(a + 1, z) - z * pcf_D(a, z) + a * pcf_D(a - 1, z)
        assert abs(residual) < 1e-9 * abs(z * pcf_D(a, z))

    def test_leading_asymptotics_improve_like_inverse_square(self) -> None:
        a = -0.4j
        errors = []
        for r in (8.0, 16.0, 32.0):
            z = cmath.rect(r, -math.pi / 4)
            errors.append(abs(cmath.exp(log_pcf_D(a, z) - a * cmath.log(z) + z * z / 4) - 1.0))
        assert errors[0] < 1e-2
        for coarse, fine in zip(errors, errors[1:]):
            assert coarse / fine == pytest.approx(4.0, rel=0.1)

    def test_derivative(self) -> None:
        order, z, h = 0.2j, 1.1 + 0.7j, 1e-6
        fd = (pcf_D(order, z + h) - pcf_D(order, z - h)) / (2 * h)
        assert pcf_D_prime(order, z) == pytest.approx(fd, rel=1e-7)

    def test_log_is_finite_on_both_sides_of_crossover(self) -> None:
        for r in (5.9, 6.1):
            assert math.isfinite(log_pcf_D(0.4j, cmath.rect(r, 1.0)).real)

    def test_order_limit(self) -> None:
        with pytest.raises(DomainError):
            pcf_D(12.0, 1.0 + 0j)


class TestParameters:
    def test_model1_nu(self) -> None:
        q = 0.6
        assert ModelParams1(q).nu == pytest.approx(-math.log(1 - q * q) / (2 * math.pi))

    def test_model1_requires_disk(self) -> None:
        with pytest.raises(AdmissibilityError):
            ModelParams1(1.0 + 0j)

    def test_model2_constraint(self) -> None:
        p = _make_params2()
        assert p.constraint_residual < 1e-15
        with pytest.raises(AdmissibilityError):
            ModelParams2(p.q2, p.q4 + 1e-3, p.q5, p.q6)

    def test_model2_positivity(self) -> None:
        with pytest.raises(AdmissibilityError):
            ModelParams2.from_free(0.1, 0.8, 0.7)

    def test_embedding(self) -> None:
        p = ModelParams1(0.4 - 0.2j).as_model2()
        assert p.q6 == 0.4 - 0.2j
        assert p.nu_hat2 == pytest.approx(ModelParams1(0.4 - 0.2j).nu, abs=1e-15)

    def test_to_dict(self) -> None:
        payload = _make_params2().to_dict()
        assert set(payload) == {"q2", "q4", "q5", "q6", "nu2", "nu4", "nu5", "nu_hat2"}


class TestBeta:
    def test_model1_product(self) -> None:
        p = ModelParams1(MODEL1_SAMPLE_Q)
        assert beta_model1(p).product == pytest.approx(p.nu, abs=1e-12)

    def test_model2_product(self) -> None:
        p = _make_params2()
        assert beta_model2(p).product == pytest.approx(p.nu_hat2, abs=1e-12)

    def test_model1_embedding(self) -> None:
        p = ModelParams1(MODEL1_SAMPLE_Q)
        direct, embedded = beta_model1(p), beta_model2(p.as_model2())
        assert embedded.b12 == pytest.approx(direct.b12, abs=1e-12)
        assert embedded.b21 == pytest.approx(direct.b21, abs=1e-12)

    def test_zero_q(self) -> None:
        beta = beta_model1(ModelParams1(0j))
        assert beta.b12 == 0 and beta.b21 == 0


class TestPsi:
    def test_jump_is_constant_and_explicit(self) -> None:
        model = ModelRHP(2, _make_params2(), degenerate="raise")
        plus, minus = vpsi_explicit(model.params2)
        np.testing.assert_allclose(plus, minus, atol=1e-12)
        for x in PSI_JUMP_POINTS:
            np.testing.assert_allclose(model.psi_jump(x), plus, atol=1e-7)

    def test_ode_and_determinant(self) -> None:
        model = ModelRHP(2, _make_params2())
        samples = (0.8 + 0.6j, -1.1 + 0.4j, 1.2 - 0.5j, -0.7 - 1.3j)
        dets = [model.det_psi(z) for z in samples]
        for z in samples:
            assert model.ode_residual(z) < 1e-7
        assert max(abs(d - dets[0]) for d in dets) < 1e-8

    def test_first_row_and_column_trivial(self) -> None:
        psi = psi_matrix(_make_params2(), 0.8 + 0.6j)
        assert psi[0, 0] == 1
        assert np.all(psi[0, 1:] == 0) and np.all(psi[1:, 0] == 0)

    def test_real_line_rejected(self) -> None:
        with pytest.raises(BranchCutError):
            psi_matrix(_make_params2(), 1.5 + 0j)

    def test_degenerate_modes(self) -> None:
        params = ModelParams1(0j)
        with pytest.raises(DegenerateBeta):
            ModelRHP(1, params, degenerate="raise").psi(0.9 + 0.4j)
        np.testing.assert_allclose(ModelRHP(1, params).mX(0.9 + 0.4j), np.eye(3), atol=1e-10)


class TestCross:
    def test_point_validation(self) -> None:
        with pytest.raises(RegionMismatch):
            CrossPoint(1.0 + 0.5j, "X1")
        with pytest.raises(DomainError):
            CrossPoint.on_ray("X5", 1.0)
        with pytest.raises(DomainError):
            CrossPoint(0j, "X1")

    def test_normal_points_left(self) -> None:
        point = CrossPoint.on_ray("X1", 1.0)
        assert point.normal == pytest.approx(cmath.exp(3j * math.pi / 4))

    @pytest.mark.parametrize("model", [1, 2])
    def test_jump_on_every_ray(self, model: int) -> None:
        params = ModelParams1(MODEL1_SAMPLE_Q) if model == 1 else _make_params2()
        rhp = ModelRHP(model, params)
        for ray in X_RAYS:
            for s in (0.7, 1.8):
                assert rhp.jump_residual(CrossPoint.on_ray(ray, s)) < 1e-7

    @pytest.mark.parametrize("model", [1, 2])
    def test_large_z(self, model: int) -> None:
        params = ModelParams1(MODEL1_SAMPLE_Q) if model == 1 else _make_params2()
        rhp = ModelRHP(model, params)
        near = max(rhp.large_z_residual(cmath.rect(50.0, a)) for a in (math.pi / 8, -3 * math.pi / 8))
        far = max(rhp.large_z_residual(cmath.rect(200.0, a)) for a in (math.pi / 8, -3 * math.pi / 8))
        assert near < 1e-3
        assert far <= near

    def test_m1_pattern(self) -> None:
        m1 = ModelRHP(1, ModelParams1(MODEL1_SAMPLE_Q)).m1()
        assert m1[0, 2] != 0 and m1[2, 0] != 0
        m1[0, 2] = m1[2, 0] = 0
        assert np.all(m1 == 0)

    def test_on_cross_rejected(self) -> None:
        with pytest.raises(BranchCutError):
            mX_eval(2, _make_params2(), cmath.rect(1.0, math.pi / 4))

    def test_model_parameter_mismatch(self) -> None:
        with pytest.raises(DomainError):
            ModelRHP(1, _make_params2())
