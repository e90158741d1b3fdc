"""Leading-order long-time asymptotics of u(x, t) in the sector 0 < x/t < 1/sqrt(3)."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Any, Iterable, Optional

import numpy as np
import pandas as pd
from scipy.special import loggamma
from threadpoolctl import threadpool_limits

from boussinesq_asymptotics.cauchy_parametrix import CauchyParametrix, ParametrixBundle
from boussinesq_asymptotics.config import (
    ARC_SPLINE_NODES,
    DEFECT_COLUMNS,
    ERROR_ORDER,
    NU_NEGATIVE_TOL,
    RESULT_COLUMNS,
    TOL_ADMISSIBILITY,
    TOL_AMPLITUDE_IMAG,
)
from boussinesq_asymptotics.errors import AdmissibilityError, BoussinesqError, DomainError, GammaArgError
from boussinesq_asymptotics.spectral_core import (
    OMEGA,
    OMEGA2,
    SQRT3,
    check_zeta,
    l_func,
    phi,
    r_tilde,
    saddle_points,
    split_pair,
)
from boussinesq_asymptotics.spectral_data import SpectralData

logger = logging.getLogger(__name__)

SADDLE_NAMES: dict[int, str] = {31: "saddle_omega_k4", 32: "saddle_omega2_k2"}


def phase_saddle(pair: int, zeta: float) -> complex:
    """Saddle point of Phi_pair carried by the leading term: omega k4 for 31, omega^2 k2 for 32, k4 for 21."""
    s = saddle_points(zeta)
    if pair == 31:
        return s.omega_k4
    if pair == 32:
        return s.omega2_k2
    split_pair(pair)
    return s.k4


def dphi_dzeta(pair: int, zeta: float, route: str = "direct") -> float:
    """Total zeta-derivative of Im Phi_pair at its moving saddle.

    Stationarity removes the k-derivative term, leaving Im(l_i - l_j) at the saddle.
    The "rotated" route uses Phi_31(zeta, k) = -Phi_21(zeta, omega^2 k) and
    Phi_32(zeta, k) = Phi_21(zeta, omega k).
    """
    check_zeta(zeta)
    k = phase_saddle(pair, zeta)
    if route == "direct":
        i, j = split_pair(pair)
        return float(np.imag(l_func(i, k) - l_func(j, k)))
    if route != "rotated":
        raise DomainError(f"unknown route {route!r}")
    if pair == 31:
        return float(-np.imag(l_func(2, OMEGA2 * k) - l_func(1, OMEGA2 * k)))
    if pair == 32:
        return float(np.imag(l_func(2, OMEGA * k) - l_func(1, OMEGA * k)))
    return dphi_dzeta(pair, zeta)


# --- q coefficients ---


@dataclass(frozen=True)
class QCoefficients:
    q_tilde1: complex
    q2: complex
    q4: complex
    q5: complex
    q6: complex
    q2_sign: int = 1

    @property
    def combination(self) -> complex:
        """q6 - q2 q5."""
        return self.q6 - self.q2 * self.q5

    @property
    def admissibility_residual(self) -> float:
        return abs(self.q4 - np.conj(self.q5) - self.q2 * np.conj(self.q6))

    def to_dict(self) -> dict[str, Any]:
        return {
            name: [float(np.real(v)), float(np.imag(v))]
            for name, v in (
                ("q_tilde1", self.q_tilde1),
                ("q2", self.q2),
                ("q4", self.q4),
                ("q5", self.q5),
                ("q6", self.q6),
                ("q6_minus_q2q5", self.combination),
            )
        } | {"q2_sign": self.q2_sign, "admissibility_residual": self.admissibility_residual}


def q_coefficients(zeta: float, spectral: SpectralData, tol: float = TOL_ADMISSIBILITY) -> QCoefficients:
    """q~1 at k4 and q2, q4, q5, q6 at k* = omega^2 k2, 1/(omega k2), omega k2, 1/k2.

    The square root of r~(k*) in q2 is principal unless the opposite sign is
    needed for q4 - conj(q5) - q2 conj(q6) = 0; a flip is logged.
    """
    s = saddle_points(zeta)
    k_star = s.omega2_k2
    points = {"k4": s.k4, "q4": 1.0 / (OMEGA * s.k2), "q5": s.omega_k2, "q6": 1.0 / s.k2}

    def scaled(k: complex) -> complex:
        return complex(np.sqrt(abs(r_tilde(k))) * spectral.r1(k))

    q_tilde1 = scaled(points["k4"])
    q4, q5, q6 = scaled(points["q4"]), scaled(points["q5"]), scaled(points["q6"])
    q2 = complex(np.sqrt(complex(r_tilde(k_star))) * spectral.r1(k_star))
    coeffs = QCoefficients(q_tilde1, q2, q4, q5, q6)
    if coeffs.admissibility_residual > tol:
        flipped = QCoefficients(q_tilde1, -q2, q4, q5, q6, q2_sign=-1)
        if flipped.admissibility_residual < coeffs.admissibility_residual:
            logger.warning(
                "q2 square-root sign flipped at zeta = %.6g (residual %.3e -> %.3e)",
                zeta,
                coeffs.admissibility_residual,
                flipped.admissibility_residual,
            )
            coeffs = flipped
    return coeffs


# --- gamma kernel ---


def gamma_arg(nu: float) -> float:
    """arg Gamma(i nu) on the continuous branch of log Gamma."""
    if abs(nu) < 1e-300:
        raise GammaArgError("arg Gamma(i nu) is undefined at nu = 0")
    return float(np.imag(loggamma(1j * nu)))


def gamma_modulus_residual(nu: float) -> float:
    """Relative deviation of |Gamma(i nu)|^2 from pi / (nu sinh(pi nu))."""
    exact = math.pi / (nu * math.sinh(math.pi * nu))
    return abs(math.exp(2.0 * float(np.real(loggamma(1j * nu)))) / exact - 1.0)


# --- leading term ---


@dataclass(frozen=True)
class AsymptoticTerm:
    amplitude: float
    phase: float
    carrier: float
    nu: float
    which: str
    vanishing: bool = False

    def value(self, t: float) -> float:
        return self.amplitude / math.sqrt(t) * math.cos(self.phase)

    def to_dict(self) -> dict[str, Any]:
        return {
            "amplitude": self.amplitude,
            "phase": self.phase,
            "carrier": self.carrier,
            "nu": self.nu,
            "which": self.which,
            "vanishing": self.vanishing,
        }


def _checked_nu(nu: float, name: str) -> float:
    if nu < -NU_NEGATIVE_TOL:
        raise AdmissibilityError(f"{name} = {nu:.3e} is negative; spectral data are not admissible")
    return max(nu, 0.0)


def _real_amplitude(value: complex, name: str) -> float:
    if abs(value.imag) > TOL_AMPLITUDE_IMAG * max(1.0, abs(value)):
        raise AdmissibilityError(f"{name} has imaginary part {value.imag:.3e}")
    return value.real


def leading_term(
    zeta: float, t: float, bundle: ParametrixBundle, q: QCoefficients
) -> tuple[float, tuple[AsymptoticTerm, AsymptoticTerm]]:
    """u ~ A1/sqrt(t) cos(alpha1) + A2/sqrt(t) cos(alpha2).

    Args:
        zeta: x / t.
        t: time, at least T_MIN.
        bundle: parametrix scalars at (zeta, t).
        q: coefficients at zeta.

    Returns:
        The leading-order value of u and the two terms (omega k4 first).

    Raises:
        AdmissibilityError: if nu1 or nu_hat2 is negative beyond tolerance.
    """
    if abs(bundle.zeta - zeta) > 1e-15 or bundle.t != t:
        raise DomainError(f"bundle is for (zeta, t) = ({bundle.zeta}, {bundle.t}), not ({zeta}, {t})")
    s = saddle_points(zeta)
    nu1 = _checked_nu(bundle.nus.nu1, "nu1")
    nu_hat2 = _checked_nu(bundle.nus.nu_hat2, "nu_hat2")
    a1, a2 = s.omega_k4, s.omega2_k2
    carrier1 = -t * float(np.imag(phi(31, zeta, a1)))
    carrier2 = -t * float(np.imag(phi(32, zeta, a2)))

    if nu1 > 0.0 and q.q_tilde1 != 0:
        numerator = -4.0 * SQRT3 * math.sqrt(nu1) * dphi_dzeta(31, zeta) * math.sin(np.angle(a1))
        denominator = -1j * a1 * bundle.z1_star * math.sqrt(abs(r_tilde(1.0 / s.k4)))
        amp1 = _real_amplitude(complex(numerator / denominator), "A1")
        phase1 = 0.75 * math.pi - float(np.angle(q.q_tilde1)) + gamma_arg(nu1) + bundle.log_d10.imag + carrier1
        term1 = AsymptoticTerm(amp1, phase1, carrier1, nu1, SADDLE_NAMES[31])
    else:
        term1 = AsymptoticTerm(0.0, 0.0, carrier1, nu1, SADDLE_NAMES[31], vanishing=True)

    if nu_hat2 > 0.0 and q.combination != 0:
        numerator = (
            -4.0
            * SQRT3
            * math.sqrt(nu_hat2)
            * math.sqrt(abs(r_tilde(1.0 / s.k2)))
            * dphi_dzeta(32, zeta)
            * math.sin(np.angle(a2))
        )
        denominator = -1j * a2 * bundle.z2_star
        amp2 = _real_amplitude(complex(numerator / denominator), "A2")
        phase2 = 0.75 * math.pi - float(np.angle(q.combination)) + gamma_arg(nu_hat2) + bundle.log_d20.imag + carrier2
        term2 = AsymptoticTerm(amp2, phase2, carrier2, nu_hat2, SADDLE_NAMES[32])
    else:
        term2 = AsymptoticTerm(0.0, 0.0, carrier2, nu_hat2, SADDLE_NAMES[32], vanishing=True)

    u = term1.value(t) + term2.value(t)
    return u, (term1, term2)


# --- grid sweep ---


def _defect(zeta: float, t: Optional[float], exc: Exception) -> dict[str, Any]:
    return {"zeta": zeta, "t": t, "error": type(exc).__name__, "message": str(exc)}


def _evaluate_zeta(
    zeta: float, ts: list[float], spectral: SpectralData, spline_nodes: int
) -> tuple[list[dict[str, Any]], list[dict[str, Any]]]:
    """Rows and defects of one zeta column; one parametrix is shared along t."""
    rows: list[dict[str, Any]] = []
    defects: list[dict[str, Any]] = []
    try:
        parametrix = CauchyParametrix(spectral, zeta, spline_nodes)
        q = q_coefficients(zeta, spectral)
    except BoussinesqError as exc:
        logger.warning("zeta = %.6g skipped: %s", zeta, exc)
        return rows, [_defect(zeta, t, exc) for t in ts]
    for t in ts:
        try:
            bundle = parametrix.bundle(t)
            u, (term1, term2) = leading_term(zeta, t, bundle, q)
        except BoussinesqError as exc:
            logger.warning("(zeta, t) = (%.6g, %.6g) skipped: %s", zeta, t, exc)
            defects.append(_defect(zeta, t, exc))
            continue
        rows.append(
            {
                "zeta": zeta,
                "t": t,
                "x": zeta * t,
                "u_leading": u,
                "A1": term1.amplitude,
                "A2": term2.amplitude,
                "alpha1": term1.phase,
                "alpha2": term2.phase,
                "nu1": term1.nu,
                "nu_hat2": term2.nu,
            }
        )
    return rows, defects


def evaluate_grid(
    zetas: Iterable[float],
    ts: Iterable[float],
    spectral: SpectralData,
    spline_nodes: int = ARC_SPLINE_NODES,
    workers: int = 1,
) -> tuple[pd.DataFrame, list[dict[str, Any]]]:
    """Leading term on a (zeta, t) grid.

    Per-point failures are collected as defects; the sweep never aborts on a
    BoussinesqError. With workers > 1 the zeta columns are spread over a process
    pool, each worker capped at one BLAS thread; rows keep the zeta order.

    Returns:
        (table with RESULT_COLUMNS, list of defect rows with DEFECT_COLUMNS keys)
    """
    zetas = [float(z) for z in zetas]
    ts = [float(t) for t in ts]
    column = partial(_evaluate_zeta, ts=ts, spectral=spectral, spline_nodes=spline_nodes)
    if workers > 1 and len(zetas) > 1:
        with ProcessPoolExecutor(
            max_workers=min(workers, len(zetas)), initializer=threadpool_limits, initargs=(1,)
        ) as pool:
            results = list(pool.map(column, zetas))
    else:
        results = [column(zeta) for zeta in zetas]
    rows = [row for part, _ in results for row in part]
    defects = [defect for _, part in results for defect in part]
    table = pd.DataFrame(rows, columns=list(RESULT_COLUMNS))
    logger.info(
        "Evaluated %d grid points (%d defects, error order %s, %d workers)",
        len(table),
        len(defects),
        ERROR_ORDER,
        max(1, workers),
    )
    return table, defects


def defect_table(defects: list[dict[str, Any]]) -> pd.DataFrame:
    return pd.DataFrame(defects, columns=list(DEFECT_COLUMNS))
