"""Numerical verification suites; every record carries its residual and the tolerance it was judged against."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

import numpy as np

from boussinesq_asymptotics.asymptotics import dphi_dzeta, gamma_modulus_residual, q_coefficients
from boussinesq_asymptotics.cauchy_parametrix import CauchyParametrix
from boussinesq_asymptotics.config import (
    ARC_SPLINE_NODES,
    BOUNDARY_OFFSET,
    MODEL1_SAMPLE_Q,
    MODEL2_SAMPLE_Q,
    MX_LARGE_Z_RADII,
    NU_NEGATIVE_TOL,
    PSI_JUMP_POINTS,
    SCHEMA_VERSION,
    TOL_ADMISSIBILITY,
    TOL_BETA,
    TOL_D10_MODULUS,
    TOL_D20_MODULUS,
    TOL_DETERMINANT,
    TOL_GAMMA,
    TOL_JUMP_RATIO,
    TOL_MX_JUMP,
    TOL_MX_LARGE_Z,
    TOL_PHASE_INCREMENT,
    TOL_PSI_JUMP,
    TOL_REPRESENTATION,
    TOL_SADDLE,
    TOL_SYMMETRY,
    TOL_V1S_REPORT,
    VERIFY_ARC_POINTS,
    VERIFY_CIRCLE_DEG,
    VERIFY_LENS_POINTS,
    VERIFY_OFF_CIRCLE,
    VERIFY_RAY_RADII,
    VERIFY_T,
    VERIFY_T_LIST,
    VERIFY_X,
    VERIFY_ZETAS,
)
from boussinesq_asymptotics.errors import BoussinesqError, DomainError
from boussinesq_asymptotics.forward_scattering import check_assumptions, spectral_grid
from boussinesq_asymptotics.model_rhp import (
    X_RAYS,
    CrossPoint,
    ModelParams1,
    ModelParams2,
    ModelRHP,
    beta_model1,
    beta_model2,
    vpsi_explicit,
)
from boussinesq_asymptotics.rhp_jumps import (
    FACTORIZATIONS,
    sample_lens_arc,
    v1s_residual,
    verify_factorizations,
    verify_v_symmetry,
)
from boussinesq_asymptotics.spectral_core import OMEGA, OMEGA2, dphi_dk, phi, saddle_points
from boussinesq_asymptotics.spectral_data import SpectralData

logger = logging.getLogger(__name__)

SUITES: tuple[str, ...] = ("symmetry", "factorization", "parametrix", "asymptotics", "model-rhp", "assumptions")

# ray angles (degrees) of the contour outside the circle
_RAY_DEG: tuple[float, ...] = (30.0, 90.0, 150.0, 210.0, 270.0, 330.0)


@dataclass(frozen=True)
class CheckRecord:
    check: str
    suite: str
    residual: float
    tolerance: float
    k: Optional[complex] = None
    report_only: bool = False
    message: str = ""

    @property
    def passed(self) -> bool:
        if self.report_only:
            return True
        return math.isfinite(self.residual) and self.residual <= self.tolerance

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "check": self.check,
            "suite": self.suite,
            "k_re": None if self.k is None else float(np.real(self.k)),
            "k_im": None if self.k is None else float(np.imag(self.k)),
            "residual": self.residual if math.isfinite(self.residual) else None,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }
        if self.report_only:
            out["report_only"] = True
        if self.message:
            out["message"] = self.message
        return out


@dataclass
class VerificationReport:
    records: list[CheckRecord] = field(default_factory=list)

    @property
    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def failing_checks(self) -> list[str]:
        return sorted({f"{r.suite}/{r.check}" for r in self.failures})

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": SCHEMA_VERSION,
            "records": [r.to_dict() for r in self.records],
            "passed": len(self.records) - len(self.failures),
            "failed": len(self.failures),
            "failing_checks": self.failing_checks(),
        }


class _Recorder:
    """Collects records for one suite and turns library errors into failed records."""

    def __init__(self, suite: str) -> None:
        self.suite = suite
        self.records: list[CheckRecord] = []

    def add(
        self, check: str, residual: float, tolerance: float, k: Optional[complex] = None, report_only: bool = False
    ) -> None:
        self.records.append(CheckRecord(check, self.suite, float(residual), tolerance, k, report_only))

    def guarded(self, check: str, tolerance: float, fun: Callable[[], float], k: Optional[complex] = None) -> None:
        try:
            residual = fun()
        except BoussinesqError as exc:
            logger.warning("%s/%s raised %s: %s", self.suite, check, type(exc).__name__, exc)
            self.records.append(
                CheckRecord(check, self.suite, math.inf, tolerance, k, message=f"{type(exc).__name__}: {exc}")
            )
            return
        self.add(check, residual, tolerance, k)


# --- symmetry ---


def _contour_samples() -> list[complex]:
    circle = [complex(np.exp(1j * math.radians(d))) for d in VERIFY_CIRCLE_DEG]
    rays = [complex(rho * np.exp(1j * math.radians(d))) for d in _RAY_DEG for rho in VERIFY_RAY_RADII]
    return circle + rays


def symmetry_suite(spectral: SpectralData, zetas: Sequence[float] = VERIFY_ZETAS, seed: int = 0) -> list[CheckRecord]:
    rec = _Recorder("symmetry")
    for k in _contour_samples():
        try:
            res_a, res_b = verify_v_symmetry(VERIFY_X, VERIFY_T, k, spectral)
        except BoussinesqError as exc:
            logger.warning("vsymm at k = %s raised %s", k, exc)
            res_a = res_b = math.inf
        rec.add("vsymm_A", res_a, TOL_SYMMETRY, k)
        rec.add("vsymm_B", res_b, TOL_SYMMETRY, k)

    rng = np.random.default_rng(seed)
    ks = 0.4 + rng.uniform(0.0, 1.2, 6) * np.exp(1j * rng.uniform(-math.pi, math.pi, 6))
    for zeta in zetas:
        for k in ks:
            rec.add("phi31_rotation", abs(phi(31, zeta, k) + phi(21, zeta, OMEGA2 * k)), TOL_SYMMETRY, complex(k))
            rec.add("phi32_rotation", abs(phi(32, zeta, k) - phi(21, zeta, OMEGA * k)), TOL_SYMMETRY, complex(k))
        s = saddle_points(zeta)
        for kj in s.points:
            rec.add("saddle_stationarity", abs(complex(dphi_dk(21, zeta, kj))), TOL_SADDLE, kj)
    return rec.records


# --- factorizations ---


def factorization_suite(spectral: SpectralData, zetas: Sequence[float] = VERIFY_ZETAS) -> list[CheckRecord]:
    rec = _Recorder("factorization")
    for zeta in zetas:
        x = zeta * VERIFY_T
        for group in FACTORIZATIONS:
            for k in sample_lens_arc(group, zeta, VERIFY_LENS_POINTS):
                k = complex(k)
                try:
                    result = verify_factorizations(x, VERIFY_T, k, spectral)[group]
                except BoussinesqError as exc:
                    logger.warning("factorization %s at k = %s raised %s", group, k, exc)
                    rec.add(f"vp1p_{group}", math.inf, TOL_SYMMETRY, k)
                    continue
                rec.add(f"vp1p_{group}", result.product_residual, result.tolerance, k)
                rec.add(f"vp1p_{group}_coefficients", result.coefficient_residual, result.coefficient_tolerance, k)
        for k in sample_lens_arc("101112", zeta, 3):
            k = complex(k)
            try:
                rec.add("v1s_identity", v1s_residual(x, VERIFY_T, k, spectral), TOL_V1S_REPORT, k, report_only=True)
            except BoussinesqError as exc:
                logger.warning("v1s report at k = %s raised %s", k, exc)
    return rec.records


# --- parametrix ---


# arc index -> (delta jump, Delta33 jump, Delta11 jump, Delta22 jump) as functions of (spectral, k)
_Jump = Callable[[SpectralData, complex], complex]
_JUMPS: dict[int, tuple[_Jump, _Jump, _Jump, _Jump]] = {
    1: (
        lambda sp, k: sp.one_plus_r1r2(OMEGA2 * k),
        lambda sp, k: 1.0 / sp.one_plus_r1r2(OMEGA2 * k),
        lambda sp, k: sp.one_plus_r1r2(OMEGA2 * k),
        lambda sp, k: 1.0 + 0.0j,
    ),
    2: (
        lambda sp, k: sp.one_plus_r1r2(k),
        lambda sp, k: sp.one_plus_r1r2(k) / sp.f(k),
        lambda sp, k: sp.f(k),
        lambda sp, k: 1.0 / sp.one_plus_r1r2(k),
    ),
    3: (
        lambda sp, k: sp.f(k),
        lambda sp, k: sp.one_plus_r1r2(k) / sp.f(k),
        lambda sp, k: sp.f(k),
        lambda sp, k: 1.0 / sp.one_plus_r1r2(k),
    ),
    4: (
        lambda sp, k: sp.f(k),
        lambda sp, k: 1.0 / sp.f(OMEGA2 * k),
        lambda sp, k: sp.f(k),
        lambda sp, k: sp.f(OMEGA2 * k) / sp.f(k),
    ),
    5: (
        lambda sp, k: sp.f(OMEGA2 * k),
        lambda sp, k: 1.0 / sp.f(OMEGA2 * k),
        lambda sp, k: sp.f(k),
        lambda sp, k: sp.f(OMEGA2 * k) / sp.f(k),
    ),
}


def _arc_samples(parametrix: CauchyParametrix, j: int, n: int) -> np.ndarray:
    spec = parametrix.arcs[j].spec
    ta, tb = spec.theta_start, spec.theta_end
    margin = 0.1 * (tb - ta)
    return np.exp(1j * np.linspace(ta + margin, tb - margin, n))


def _ratio_residual(plus: complex, minus: complex, expected: complex) -> float:
    return abs(plus / minus / expected - 1.0)


def parametrix_suite(
    spectral: SpectralData,
    zetas: Sequence[float] = VERIFY_ZETAS,
    ts: Sequence[float] = VERIFY_T_LIST,
    spline_nodes: int = ARC_SPLINE_NODES,
) -> list[CheckRecord]:
    rec = _Recorder("parametrix")
    h = BOUNDARY_OFFSET
    for zeta in zetas:
        try:
            parametrix = CauchyParametrix(spectral, zeta, spline_nodes)
        except BoussinesqError as exc:
            rec.add("parametrix_build", math.inf, 0.0)
            logger.warning("parametrix at zeta = %.6g failed: %s", zeta, exc)
            continue
        nus = parametrix.nus
        rec.add("nu1_nonnegative", max(0.0, -nus.nu1), NU_NEGATIVE_TOL)
        rec.add("nu_hat2_nonnegative", max(0.0, -nus.nu_hat2), NU_NEGATIVE_TOL)
        rec.add("nu3_consistency", abs(nus.nu3 - nus.nu3_alt), TOL_SYMMETRY)

        for j, (delta_jump, d33_jump, d11_jump, d22_jump) in _JUMPS.items():
            for k in _arc_samples(parametrix, j, VERIFY_ARC_POINTS):
                k = complex(k)
                inside, outside = k * (1.0 - h), k * (1.0 + h)
                rec.guarded(
                    f"delta{j}_jump",
                    TOL_JUMP_RATIO,
                    lambda: _ratio_residual(
                        complex(parametrix.delta(j, inside)), complex(parametrix.delta(j, outside)), delta_jump(spectral, k)
                    ),
                    k,
                )
                rec.guarded(
                    "Delta33_jump",
                    TOL_JUMP_RATIO,
                    lambda: _ratio_residual(
                        complex(parametrix.delta33(inside)), complex(parametrix.delta33(outside)), d33_jump(spectral, k)
                    ),
                    k,
                )
                diag_in = parametrix.Delta_diag(inside)
                diag_out = parametrix.Delta_diag(outside)
                rec.guarded(
                    "Delta11_jump",
                    TOL_JUMP_RATIO,
                    lambda: _ratio_residual(complex(diag_in[0]), complex(diag_out[0]), d11_jump(spectral, k)),
                    k,
                )
                rec.guarded(
                    "Delta22_jump",
                    TOL_JUMP_RATIO,
                    lambda: _ratio_residual(complex(diag_in[1]), complex(diag_out[1]), d22_jump(spectral, k)),
                    k,
                )

        for k in VERIFY_OFF_CIRCLE:
            k = complex(k)
            rec.guarded(
                "Delta33_inversion",
                TOL_REPRESENTATION,
                lambda: abs(complex(parametrix.delta33(1.0 / k)) - complex(parametrix.delta33(k))),
                k,
            )
            for j in (2, 3, 4, 5):
                rec.guarded(
                    f"delta{j}_representation",
                    TOL_REPRESENTATION,
                    lambda: abs(complex(parametrix.delta(j, k)) - complex(parametrix.delta(j, k, "a"))),
                    k,
                )

        for t in ts:
            try:
                bundle = parametrix.bundle(t)
            except BoussinesqError as exc:
                logger.warning("bundle at (%.6g, %.6g) failed: %s", zeta, t, exc)
                rec.add("d10_modulus", math.inf, TOL_D10_MODULUS)
                rec.add("d20_modulus", math.inf, TOL_D20_MODULUS)
                continue
            rec.add("d10_modulus", abs(abs(bundle.d10) - 1.0), TOL_D10_MODULUS)
            expected = math.exp(math.pi * (2.0 * nus.nu2 - nus.nu4))
            rec.add("d20_modulus", abs(abs(bundle.d20) - expected), TOL_D20_MODULUS)
            for name, report in bundle.regularization.items():
                if report is not None:
                    rec.add(f"{name}_stabilization", report.stabilization, report.tolerance)
                    rec.add(f"{name}_subtraction_agreement", report.agreement, report.tolerance, report_only=True)
        if len(ts) >= 2:
            t1, t2 = ts[0], ts[-1]
            rec.guarded(
                "d10_phase_increment",
                TOL_PHASE_INCREMENT,
                lambda: abs(
                    parametrix.bundle(t2).log_d10.imag
                    - parametrix.bundle(t1).log_d10.imag
                    + nus.nu1 * math.log(t2 / t1)
                ),
            )
    return rec.records


# --- asymptotics ---


def asymptotics_suite(spectral: SpectralData, zetas: Sequence[float] = VERIFY_ZETAS) -> list[CheckRecord]:
    rec = _Recorder("asymptotics")
    for nu in (0.05, 0.3, 1.0):
        rec.add("gamma_modulus", gamma_modulus_residual(nu), TOL_GAMMA)
    for zeta in zetas:
        for pair in (31, 32):
            rec.guarded(
                f"dphi_dzeta_{pair}_route",
                TOL_SYMMETRY,
                lambda: abs(dphi_dzeta(pair, zeta) - dphi_dzeta(pair, zeta, route="rotated")),
            )
        try:
            q = q_coefficients(zeta, spectral)
        except BoussinesqError as exc:
            logger.warning("q coefficients at zeta = %.6g failed: %s", zeta, exc)
            rec.add("q_admissibility", math.inf, TOL_ADMISSIBILITY)
            continue
        rec.add("q_admissibility", q.admissibility_residual, TOL_ADMISSIBILITY)
        s = saddle_points(zeta)
        f4 = 1.0 + abs(q.q2) ** 2 - abs(q.q4) ** 2
        f5 = 1.0 - abs(q.q5) ** 2 - abs(q.q6) ** 2
        rec.add("q_f_identity_k_star", abs(f4 - complex(spectral.f(s.omega2_k2))), TOL_ADMISSIBILITY, s.omega2_k2)
        rec.add("q_f_identity_omega_k2", abs(f5 - complex(spectral.f(s.omega_k2))), TOL_ADMISSIBILITY, s.omega_k2)
        rec.add("q_tilde1_in_disk", max(0.0, abs(q.q_tilde1) - 1.0 + NU_NEGATIVE_TOL), 0.0)
        try:
            params = ModelParams2.from_coefficients(q)
        except BoussinesqError as exc:
            logger.warning("model parameters at zeta = %.6g inadmissible: %s", zeta, exc)
            rec.add("beta_product_spectral", math.inf, TOL_BETA)
            continue
        beta = beta_model2(params)
        rec.add("beta_product_spectral", abs(beta.product - params.nu_hat2), TOL_BETA)
    return rec.records


# --- model problems ---


def _model_checks(rec: _Recorder, model: ModelRHP, tag: str) -> None:
    for ray in X_RAYS:
        for s in (0.7, 1.8):
            point = CrossPoint.on_ray(ray, s)
            rec.guarded(f"mX_jump_{tag}_{ray}", TOL_MX_JUMP, lambda: model.jump_residual(point), point.z)
    phases = (math.pi / 8, 5 * math.pi / 8, -3 * math.pi / 8, -7 * math.pi / 8)
    residuals: dict[float, list[float]] = {}
    for radius in MX_LARGE_Z_RADII:
        for phase in phases:
            z = complex(radius * np.exp(1j * phase))
            try:
                value = model.large_z_residual(z)
            except BoussinesqError as exc:
                logger.warning("large-z check at %s raised %s", z, exc)
                value = math.inf
            residuals.setdefault(radius, []).append(value)
            rec.add(f"mX_large_z_{tag}", value, TOL_MX_LARGE_Z, z)
    inner, outer = (max(residuals[r]) for r in MX_LARGE_Z_RADII)
    rec.add(f"mX_large_z_improves_{tag}", max(0.0, outer - inner), 0.0)
    m1 = model.m1()
    mask = np.ones((3, 3), dtype=bool)
    if model.model == 1:
        mask[0, 2] = mask[2, 0] = False
    else:
        mask[1, 2] = mask[2, 1] = False
    rec.add(f"m1_pattern_{tag}", float(np.max(np.abs(m1[mask]))), 0.0)


def model_rhp_suite() -> list[CheckRecord]:
    rec = _Recorder("model-rhp")
    p1 = ModelParams1(MODEL1_SAMPLE_Q)
    p2 = ModelParams2.from_free(*MODEL2_SAMPLE_Q)
    b1, b2 = beta_model1(p1), beta_model2(p2)
    rec.add("beta_product_1", abs(b1.product - p1.nu), TOL_BETA)
    rec.add("beta_product_2", abs(b2.product - p2.nu_hat2), TOL_BETA)
    embedded = beta_model2(p1.as_model2())
    rec.add("beta_embedding_1", max(abs(embedded.b12 - b1.b12), abs(embedded.b21 - b1.b21)), TOL_BETA)
    zero = beta_model1(ModelParams1(0j))
    rec.add("beta_zero_1", max(abs(zero.b12), abs(zero.b21)), 0.0)

    plus, minus = vpsi_explicit(p2)
    rec.add("vpsi_explicit_agreement", float(np.max(np.abs(plus - minus))), TOL_BETA)

    model2 = ModelRHP(2, p2, degenerate="raise")
    jumps: list[np.ndarray] = []
    for x in PSI_JUMP_POINTS:
        try:
            jumps.append(model2.psi_jump(x))
        except BoussinesqError as exc:
            logger.warning("psi jump at x = %g raised %s", x, exc)
            rec.add("psi_jump_constancy", math.inf, TOL_PSI_JUMP, complex(x))
    for x, v in zip(PSI_JUMP_POINTS, jumps):
        rec.add("psi_jump_constancy", float(np.max(np.abs(v - jumps[0]))), TOL_PSI_JUMP, complex(x))
        rec.add("psi_jump_explicit", float(np.max(np.abs(v - plus))), TOL_PSI_JUMP, complex(x))

    samples = (0.8 + 0.6j, -1.1 + 0.4j, 0.3 + 1.7j, 1.2 - 0.5j, -0.7 - 1.3j, 2.1 - 0.2j)
    dets = []
    for z in samples:
        rec.guarded("psi_ode_residual", TOL_PSI_JUMP, lambda: model2.ode_residual(z), z)
        try:
            dets.append(model2.det_psi(z))
        except BoussinesqError as exc:
            logger.warning("det psi at %s raised %s", z, exc)
    if dets:
        rec.add("psi_det_constant", max(abs(d - dets[0]) for d in dets), 1e-8)
    first_row = model2.psi(samples[0])
    rec.add("psi_first_row_column", float(np.max(np.abs(np.concatenate([first_row[0, 1:], first_row[1:, 0]])))), 0.0)

    _model_checks(rec, ModelRHP(1, p1), "1")
    _model_checks(rec, model2, "2")
    trivial = ModelRHP(1, ModelParams1(0j))
    rec.guarded("mX_trivial_1", TOL_DETERMINANT, lambda: float(np.max(np.abs(trivial.mX(0.9 + 0.4j) - np.eye(3)))))
    return rec.records


# --- assumptions ---


def assumptions_suite(spectral: SpectralData) -> list[CheckRecord]:
    rec = _Recorder("assumptions")
    report = check_assumptions(spectral, spectral_grid())
    rec.add("r2_symmetry", report.circle_symmetry_residual or 0.0, TOL_SYMMETRY)
    rec.add("assumption_iii", report.max_r1_segment, report.tolerance_iii)
    if report.kbar_symmetry_residual is not None:
        rec.add("r1r2_kbar_symmetry", report.kbar_symmetry_residual, TOL_SYMMETRY)
    return rec.records


def run_suites(
    spectral: SpectralData,
    only: Optional[Iterable[str]] = None,
    zetas: Sequence[float] = VERIFY_ZETAS,
    ts: Sequence[float] = VERIFY_T_LIST,
    spline_nodes: int = ARC_SPLINE_NODES,
    seed: int = 0,
) -> VerificationReport:
    """Run the selected suites (all by default).

    Raises:
        DomainError: for an unknown suite name.
    """
    selected = list(SUITES) if only is None else list(only)
    unknown = [name for name in selected if name not in SUITES]
    if unknown:
        raise DomainError(f"unknown suite(s) {unknown}; expected a subset of {SUITES}")
    report = VerificationReport()
    for name in selected:
        logger.info("Running %s suite", name)
        if name == "symmetry":
            records = symmetry_suite(spectral, zetas, seed)
        elif name == "factorization":
            records = factorization_suite(spectral, zetas)
        elif name == "parametrix":
            records = parametrix_suite(spectral, zetas, ts, spline_nodes)
        elif name == "asymptotics":
            records = asymptotics_suite(spectral, zetas)
        elif name == "model-rhp":
            records = model_rhp_suite()
        else:
            records = assumptions_suite(spectral)
        failed = sum(not r.passed for r in records)
        logger.info("%s: %d checks, %d failed", name, len(records), failed)
        report.records.extend(records)
    return report
