"""Tests for the leading-order asymptotic formula and the grid sweep."""

import dataclasses
import math

import numpy as np
import pandas as pd
import pytest

from boussinesq_asymptotics.asymptotics import (
    AsymptoticTerm,
    defect_table,
    dphi_dzeta,
    evaluate_grid,
    gamma_arg,
    gamma_modulus_residual,
    leading_term,
    phase_saddle,
    q_coefficients,
)
from boussinesq_asymptotics.cauchy_parametrix import CauchyParametrix, NuValues
from boussinesq_asymptotics.config import DEFECT_COLUMNS, RESULT_COLUMNS
from boussinesq_asymptotics.errors import AdmissibilityError, DomainError, GammaArgError
from boussinesq_asymptotics.spectral_core import phi, saddle_points
from boussinesq_asymptotics.spectral_data import ZeroSpectralData, two_lobe

ZETA = 0.3
NODES = 201


@pytest.fixture(scope="module")
def parametrix() -> CauchyParametrix:
    return CauchyParametrix(two_lobe(), ZETA, NODES)


def _saddle_phase(pair: int, zeta: float) -> float:
    return float(np.imag(phi(pair, zeta, phase_saddle(pair, zeta))))


class TestPhaseDerivative:
    @pytest.mark.parametrize(("pair", "zeta"), [(31, 0.3), (32, 0.45)])
    def test_matches_five_point_difference(self, pair: int, zeta: float) -> None:
        h = 1e-3
        f = [_saddle_phase(pair, zeta + m * h) for m in (-2, -1, 1, 2)]
        fd = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
        assert dphi_dzeta(pair, zeta) == pytest.approx(fd, abs=1e-6)

    @pytest.mark.parametrize("pair", [31, 32])
    def test_rotated_route(self, pair: int) -> None:
        assert dphi_dzeta(pair, 0.2, "rotated") == pytest.approx(dphi_dzeta(pair, 0.2), abs=1e-10)

    def test_unknown_route(self) -> None:
        with pytest.raises(DomainError):
            dphi_dzeta(31, 0.2, "sideways")

    def test_saddles(self) -> None:
        s = saddle_points(0.2)
        assert phase_saddle(31, 0.2) == s.omega_k4
        assert phase_saddle(32, 0.2) == s.omega2_k2


class TestQCoefficients:
    def test_zero_data(self) -> None:
        q = q_coefficients(ZETA, ZeroSpectralData())
        assert q.q_tilde1 == 0 and q.q2 == 0 and q.combination == 0

    def test_admissibility(self) -> None:
        q = q_coefficients(ZETA, two_lobe())
        assert q.admissibility_residual < 1e-9
        assert abs(q.q_tilde1) < 1.0

    def test_f_identities(self) -> None:
        data = two_lobe()
        s = saddle_points(ZETA)
        q = q_coefficients(ZETA, data)
        f_star = 1.0 + abs(q.q2) ** 2 - abs(q.q4) ** 2
        f_omega = 1.0 - abs(q.q5) ** 2 - abs(q.q6) ** 2
        assert f_star == pytest.approx(complex(data.f(s.omega2_k2)), abs=1e-9)
        assert f_omega == pytest.approx(complex(data.f(s.omega_k2)), abs=1e-9)

    def test_serializes(self) -> None:
        payload = q_coefficients(ZETA, two_lobe()).to_dict()
        assert payload["q2_sign"] in (1, -1)
        assert len(payload["q6_minus_q2q5"]) == 2


class TestGamma:
    @pytest.mark.parametrize("nu", [0.05, 0.3, 1.0])
    def test_modulus_identity(self, nu: float) -> None:
        assert gamma_modulus_residual(nu) < 1e-12

    def test_arg_undefined_at_zero(self) -> None:
        with pytest.raises(GammaArgError):
            gamma_arg(0.0)

    def test_arg_is_continuous(self) -> None:
        values = [gamma_arg(nu) for nu in np.linspace(0.1, 3.0, 30)]
        assert np.max(np.abs(np.diff(values))) < 1.0


class TestLeadingTerm:
    def test_term_value(self) -> None:
        term = AsymptoticTerm(amplitude=2.0, phase=0.0, carrier=0.0, nu=0.1, which="saddle_omega_k4")
        assert term.value(4.0) == pytest.approx(1.0)

    def test_zero_data_vanishes(self) -> None:
        parametrix = CauchyParametrix(ZeroSpectralData(), ZETA, NODES)
        q = q_coefficients(ZETA, ZeroSpectralData())
        u, (term1, term2) = leading_term(ZETA, 10.0, parametrix.bundle(10.0), q)
        assert u == 0.0
        assert term1.vanishing and term2.vanishing

    def test_phase_increment(self, parametrix: CauchyParametrix) -> None:
        q = q_coefficients(ZETA, two_lobe())
        t1, t2 = 10.0, 1000.0
        _, (a, _) = leading_term(ZETA, t1, parametrix.bundle(t1), q)
        _, (b, _) = leading_term(ZETA, t2, parametrix.bundle(t2), q)
        expected = -(t2 - t1) * _saddle_phase(31, ZETA) - a.nu * math.log(t2 / t1)
        assert b.phase - a.phase == pytest.approx(expected, abs=1e-8)

    def test_amplitude_is_t_independent(self, parametrix: CauchyParametrix) -> None:
        q = q_coefficients(ZETA, two_lobe())
        amps = [leading_term(ZETA, t, parametrix.bundle(t), q)[1][0].amplitude for t in (100.0, 1000.0, 10000.0)]
        assert max(amps) - min(amps) < 1e-10

    def test_bundle_mismatch(self, parametrix: CauchyParametrix) -> None:
        q = q_coefficients(ZETA, two_lobe())
        with pytest.raises(DomainError):
            leading_term(ZETA, 20.0, parametrix.bundle(10.0), q)

    def test_negative_nu_rejected(self, parametrix: CauchyParametrix) -> None:
        q = q_coefficients(ZETA, two_lobe())
        bundle = dataclasses.replace(parametrix.bundle(10.0), nus=NuValues(-0.1, 0.0, 0.0, 0.0, 0.0))
        with pytest.raises(AdmissibilityError):
            leading_term(ZETA, 10.0, bundle, q)


class TestEvaluateGrid:
    def test_empty_grid(self) -> None:
        table, defects = evaluate_grid([], [], two_lobe())
        assert table.empty
        assert list(table.columns) == list(RESULT_COLUMNS)
        assert defects == []

    def test_rows_and_columns(self) -> None:
        table, defects = evaluate_grid([ZETA], [10.0, 100.0], two_lobe(), spline_nodes=NODES)
        assert defects == []
        assert len(table) == 2
        np.testing.assert_allclose(table["x"], table["zeta"] * table["t"])
        assert table["A1"].nunique() == 1

    def test_failures_become_defects(self) -> None:
        table, defects = evaluate_grid([0.7], [10.0, 100.0], two_lobe(), spline_nodes=NODES)
        assert table.empty
        assert len(defects) == 2
        assert defects[0]["error"] == "DomainError"
        assert list(defect_table(defects).columns) == list(DEFECT_COLUMNS)

    def test_process_pool_matches_sequential(self) -> None:
        zetas, ts = [0.25, 0.35], [10.0, 100.0]
        sequential, seq_defects = evaluate_grid(zetas, ts, two_lobe(), spline_nodes=NODES)
        pooled, pool_defects = evaluate_grid(zetas, ts, two_lobe(), spline_nodes=NODES, workers=2)
        pd.testing.assert_frame_equal(sequential, pooled, check_exact=False, rtol=1e-12)
        assert seq_defects == pool_defects
        assert list(pooled["zeta"]) == [0.25, 0.25, 0.35, 0.35]
