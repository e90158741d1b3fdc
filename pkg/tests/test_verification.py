"""Tests for the verification records and suites."""

import math

import pytest

from boussinesq_asymptotics.config import DEFECT_EPS, DEFECT_THETA_DEG
from boussinesq_asymptotics.errors import DomainError
from boussinesq_asymptotics.spectral_data import PerturbedSpectralData, ZeroSpectralData, two_lobe
from boussinesq_asymptotics.verification import (
    SUITES,
    CheckRecord,
    VerificationReport,
    assumptions_suite,
    model_rhp_suite,
    run_suites,
    symmetry_suite,
)


def _make_report() -> VerificationReport:
    return VerificationReport(
        [
            CheckRecord("a", "symmetry", 1e-12, 1e-9, k=1j),
            CheckRecord("b", "symmetry", 1e-3, 1e-9),
            CheckRecord("b", "symmetry", math.inf, 1e-9),
            CheckRecord("c", "factorization", 1.0, 1e-9, report_only=True),
        ]
    )


class TestCheckRecord:
    def test_pass_and_fail(self) -> None:
        assert CheckRecord("x", "symmetry", 1e-10, 1e-9).passed
        assert not CheckRecord("x", "symmetry", 1e-8, 1e-9).passed
        assert not CheckRecord("x", "symmetry", math.nan, 1e-9).passed

    def test_report_only_never_fails(self) -> None:
        assert CheckRecord("x", "factorization", math.inf, 0.0, report_only=True).passed

    def test_schema(self) -> None:
        row = CheckRecord("x", "symmetry", math.inf, 1e-9, k=0.5 - 2j, message="boom").to_dict()
        assert row == {
            "check": "x",
            "suite": "symmetry",
            "k_re": 0.5,
            "k_im": -2.0,
            "residual": None,
            "tolerance": 1e-9,
            "pass": False,
            "message": "boom",
        }

    def test_schema_without_k(self) -> None:
        row = CheckRecord("x", "model-rhp", 0.0, 0.0).to_dict()
        assert row["k_re"] is None and row["k_im"] is None
        assert row["pass"] is True


class TestVerificationReport:
    def test_counts(self) -> None:
        payload = _make_report().to_dict()
        assert payload["passed"] == 2
        assert payload["failed"] == 2
        assert payload["failing_checks"] == ["symmetry/b"]

    def test_passed_flag(self) -> None:
        assert not _make_report().passed
        assert VerificationReport().passed


class TestSuites:
    def test_unknown_suite(self) -> None:
        with pytest.raises(DomainError):
            run_suites(two_lobe(), only=["symmetry", "spelling"])

    def test_suite_names(self) -> None:
        assert "model-rhp" in SUITES and len(SUITES) == 6

    def test_model_rhp_suite_passes(self) -> None:
        records = model_rhp_suite()
        assert records
        failing = [r.check for r in records if not r.passed]
        assert failing == []

    def test_symmetry_suite_on_zero_data(self) -> None:
        records = symmetry_suite(ZeroSpectralData())
        assert all(r.passed for r in records)
        assert {r.check for r in records} >= {"vsymm_A", "vsymm_B", "saddle_stationarity"}

    def test_assumptions_pass_for_decoupled_family(self) -> None:
        records = assumptions_suite(two_lobe())
        assert all(r.passed for r in records)

    def test_injected_defect_is_detected(self) -> None:
        defective = PerturbedSpectralData(two_lobe(), "r2", math.radians(DEFECT_THETA_DEG), DEFECT_EPS)
        report = run_suites(defective, only=["assumptions"])
        assert "assumptions/r2_symmetry" in report.failing_checks()
        assert not report.passed

    def test_only_selects_suites(self) -> None:
        report = run_suites(two_lobe(), only=["model-rhp"])
        assert {r.suite for r in report.records} == {"model-rhp"}
