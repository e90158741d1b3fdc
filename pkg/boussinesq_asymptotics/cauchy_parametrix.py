"""Cauchy-type integrals delta_1..delta_5, chi_j, the products D1, D2, the diagonal parametrix and phase factors."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional

import numpy as np
from scipy.integrate import quad_vec
from scipy.interpolate import CubicSpline

from boussinesq_asymptotics.config import (
    ARC_SPLINE_NODES,
    BRANCH_CUT_TOL,
    ENDPOINT_TOL,
    EPSILON_SCHEDULE,
    LOG_ARG_FLOOR,
    NEAR_ARC_DISTANCE,
    NEAR_CONTOUR_MIN,
    QUAD_EPSABS,
    QUAD_EPSREL,
    QUAD_LIMIT,
    REGULARIZATION_RTOL,
    SIGN_CONDITION_RTOL,
    T_MIN,
)
from boussinesq_asymptotics.errors import (
    BranchCutError,
    DomainError,
    NearContourError,
    RegularizationError,
    SignConditionError,
)
from boussinesq_asymptotics.spectral_core import (
    OMEGA,
    OMEGA2,
    TWO_PI,
    BranchLog,
    ComplexLike,
    SaddleSet,
    check_zeta,
    distance_to_arc,
    distance_to_ray,
    saddle_points,
)
from boussinesq_asymptotics.spectral_data import SpectralData

logger = logging.getLogger(__name__)

INTEGRAND_KINDS: tuple[str, ...] = ("log_1pr1r2", "log_1pr1r2_rot", "log_f", "log_f_rot")
BRANCHES: dict[str, str] = {"a": "ln_s", "b": "ln_tilde_s", "ln_s": "ln_s", "ln_tilde_s": "ln_tilde_s"}

# Arguments of delta_j appearing in the products, as functions of k.
_ARGUMENTS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "k": lambda k: k,
    "wk": lambda k: OMEGA * k,
    "w2k": lambda k: OMEGA2 * k,
    "inv": lambda k: 1.0 / k,
    "inv_w": lambda k: 1.0 / (OMEGA * k),
    "inv_w2": lambda k: 1.0 / (OMEGA2 * k),
}

# Exponent tables: {j: {argument: power}}.
D1_EXPONENTS: dict[int, dict[str, int]] = {
    1: {"w2k": 1, "inv_w": 2, "wk": 1, "inv": -1, "inv_w2": -1},
    2: {"k": 1, "w2k": 1, "inv": 2, "wk": -2, "inv_w2": -1, "inv_w": -1},
    3: {"wk": 1, "w2k": 1, "inv_w": 2, "k": -2, "inv": -1, "inv_w2": -1},
    4: {"w2k": 2, "inv": 1, "inv_w": 1, "k": -1, "wk": -1, "inv_w2": -2},
    5: {"wk": 2, "inv_w": 1, "inv_w2": 1, "k": -1, "inv": -2, "w2k": -1},
}
D2_EXPONENTS: dict[int, dict[str, int]] = {
    1: {"w2k": 2, "inv_w": 1, "inv_w2": 1, "k": -1, "inv": -2, "wk": -1},
    2: {"inv": 1, "inv_w": 1, "wk": -1, "inv_w2": -2, "w2k": -1},
    3: {"w2k": 2, "inv_w": 1, "inv_w2": 1, "inv": -2, "wk": -1},
    4: {"w2k": 1, "inv_w": 2, "wk": -2, "inv_w2": -1, "inv": -1},
    5: {"wk": 1, "inv_w2": 2, "w2k": 1, "inv": -1, "inv_w": -1},
}
DELTA33_EXPONENTS: dict[int, dict[str, int]] = {
    1: {"w2k": 1, "inv_w": 1, "k": -1, "inv": -1},
    2: {"k": 1, "inv": 1, "wk": -1, "inv_w2": -1},
    3: {"w2k": 1, "inv_w": 1, "k": -1, "inv": -1},
    4: {"w2k": 1, "inv_w": 1, "wk": -1, "inv_w2": -1},
    5: {"wk": 1, "inv_w2": 1, "k": -1, "inv": -1},
}


def _complex_json(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _finite_or_none(value: float) -> Optional[float]:
    return float(value) if math.isfinite(value) else None


# --- nu exponents ---


@dataclass(frozen=True)
class NuValues:
    """Exponents nu_1..nu_5 and nu_hat_2 = nu_2 + nu_5 - nu_4 at a given zeta."""

    nu1: float
    nu2: float
    nu3: float
    nu4: float
    nu5: float
    nu3_alt: float = 0.0

    @property
    def nu_hat2(self) -> float:
        return self.nu2 + self.nu5 - self.nu4

    def to_dict(self) -> dict[str, float]:
        return {
            "nu1": self.nu1,
            "nu2": self.nu2,
            "nu3": self.nu3,
            "nu4": self.nu4,
            "nu5": self.nu5,
            "nu_hat2": self.nu_hat2,
            "nu3_alt": self.nu3_alt,
        }


def _nu(value: complex, name: str) -> float:
    value = complex(value)
    if value.real <= 0.0:
        raise DomainError(f"log argument for {name} is not positive: {value}")
    if abs(value.imag) > 1e-8 * abs(value):
        logger.debug("log argument for %s has imaginary part %.3e", name, value.imag)
    return -math.log(abs(value)) / TWO_PI


def nu_values(zeta: float, spectral: SpectralData) -> NuValues:
    """nu_1 at k4, nu_2, nu_4 at omega^2 k2, nu_3 at i and nu_5 at omega k2.

    Raises:
        DomainError: if one of the log arguments is not positive.
    """
    s = saddle_points(zeta)
    return NuValues(
        nu1=_nu(spectral.one_plus_r1r2(s.k4), "nu1"),
        nu2=_nu(spectral.one_plus_r1r2(s.omega2_k2), "nu2"),
        nu3=_nu(spectral.f(1j), "nu3"),
        nu4=_nu(spectral.f(s.omega2_k2), "nu4"),
        nu5=_nu(spectral.f(s.omega_k2), "nu5"),
        nu3_alt=_nu(spectral.one_plus_r1r2(OMEGA2 * 1j), "nu3"),
    )


# --- arcs ---


@dataclass(frozen=True)
class ArcIntegralSpec:
    """A counterclockwise unit-circle arc and the function whose logarithm is integrated along it."""

    start: complex
    end: complex
    integrand_kind: str
    regularized: bool = False
    epsilon_schedule: tuple[float, ...] = EPSILON_SCHEDULE

    def __post_init__(self) -> None:
        if self.integrand_kind not in INTEGRAND_KINDS:
            raise DomainError(f"unknown integrand kind {self.integrand_kind!r}")
        if not 0.0 < self.theta_start < self.theta_end < math.pi:
            raise DomainError(f"arc [{self.start}, {self.end}] is not a counterclockwise upper arc")
        eps = self.epsilon_schedule
        if len(eps) < 3 or any(b >= a for a, b in zip(eps, eps[1:])) or eps[-1] <= 0.0:
            raise DomainError(f"epsilon schedule must hold at least three decreasing positive steps, got {eps}")

    @property
    def theta_start(self) -> float:
        return math.atan2(self.start.imag, self.start.real)

    @property
    def theta_end(self) -> float:
        return math.atan2(self.end.imag, self.end.real)


def arc_specs(saddles: SaddleSet) -> dict[int, ArcIntegralSpec]:
    """Arcs of delta_1..delta_5; delta_4 and delta_5 end at omega where f may vanish."""
    a1, a2 = saddles.omega_k4, saddles.omega2_k2
    return {
        1: ArcIntegralSpec(a1, 1j, "log_1pr1r2_rot"),
        2: ArcIntegralSpec(1j, a2, "log_1pr1r2"),
        3: ArcIntegralSpec(1j, a2, "log_f"),
        4: ArcIntegralSpec(a2, OMEGA, "log_f", regularized=True),
        5: ArcIntegralSpec(a2, OMEGA, "log_f_rot", regularized=True),
    }


class ArcLog:
    """g along one arc, tabulated once on Chebyshev nodes in the angle.

    Quadrature nodes read g, ln g and d ln g = g'/g from the spline only; the
    spectral functions are called once per node at construction and for
    endpoint scalars.
    """

    def __init__(self, spec: ArcIntegralSpec, spectral: SpectralData, nodes: int = ARC_SPLINE_NODES) -> None:
        self.spec = spec
        self._spectral = spectral
        self._nodes = nodes
        self._spline: Optional[CubicSpline] = None

    def g(self, s: ComplexLike) -> ComplexLike:
        s = np.asarray(s, dtype=complex)
        kind = self.spec.integrand_kind
        if kind == "log_1pr1r2":
            return self._spectral.one_plus_r1r2(s)
        if kind == "log_1pr1r2_rot":
            return self._spectral.one_plus_r1r2(OMEGA2 * s)
        if kind == "log_f":
            return self._spectral.f(s)
        return self._spectral.f(OMEGA2 * s)

    def log_g(self, s: ComplexLike) -> ComplexLike:
        g = np.asarray(self.g(s), dtype=complex)
        return np.log(np.where(np.abs(g) < LOG_ARG_FLOOR, LOG_ARG_FLOOR, g))

    @property
    def spline(self) -> CubicSpline:
        if self._spline is None:
            ta, tb = self.spec.theta_start, self.spec.theta_end
            m = np.arange(self._nodes)
            theta = 0.5 * (ta + tb) - 0.5 * (tb - ta) * np.cos(np.pi * m / (self._nodes - 1))
            self._spline = CubicSpline(theta, self.g(np.exp(1j * theta)))
        return self._spline

    def g_theta(self, theta: float) -> complex:
        """g(e^{i theta}) from the spline."""
        return complex(self.spline(theta))

    def log_g_theta(self, theta: float) -> complex:
        g = self.g_theta(theta)
        return complex(np.log(g if abs(g) >= LOG_ARG_FLOOR else LOG_ARG_FLOOR))

    def dlog(self, theta: float) -> complex:
        """d ln g / d theta."""
        g = self.g_theta(theta)
        if abs(g) < LOG_ARG_FLOOR:
            g = LOG_ARG_FLOOR
        return complex(self.spline(theta, 1)) / g


def _integrate(fun: Callable[[float], np.ndarray], a: float, b: float, points: Iterable[float] = ()) -> np.ndarray:
    """Adaptive Gauss-Kronrod of a complex vector integrand over [a, b]."""

    def stacked(theta: float) -> np.ndarray:
        val = np.atleast_1d(np.asarray(fun(theta), dtype=complex))
        return np.concatenate([val.real, val.imag])

    inner = sorted({float(p) for p in points if a < p < b})
    res, _err = quad_vec(
        stacked,
        a,
        b,
        epsabs=QUAD_EPSABS,
        epsrel=QUAD_EPSREL,
        limit=QUAD_LIMIT,
        norm="max",
        points=inner or None,
    )
    half = res.size // 2
    return res[:half] + 1j * res[half:]


# --- regularization report ---


@dataclass(frozen=True)
class RegularizationReport:
    """epsilon-schedule values of a regularized chi, their extrapolations and the subtraction value."""

    epsilons: tuple[float, ...]
    values: tuple[complex, ...]
    extrapolated: complex
    finer_pair: complex
    subtracted: complex
    observed_order: float
    tolerance: float

    @property
    def stabilization(self) -> float:
        return abs(self.extrapolated - self.finer_pair)

    @property
    def agreement(self) -> float:
        return abs(self.extrapolated - self.subtracted)

    @property
    def passed(self) -> bool:
        return self.stabilization <= self.tolerance * max(1.0, abs(self.extrapolated))

    def to_dict(self) -> dict[str, Any]:
        return {
            "epsilons": list(self.epsilons),
            "values": [_complex_json(v) for v in self.values],
            "extrapolated": _complex_json(self.extrapolated),
            "finer_pair": _complex_json(self.finer_pair),
            "subtracted": _complex_json(self.subtracted),
            "observed_order": _finite_or_none(self.observed_order),
            "stabilization": self.stabilization,
            "agreement": self.agreement,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def richardson_limit(epsilons: tuple[float, ...], values: np.ndarray) -> np.ndarray:
    """Polynomial extrapolation of values(eps) to eps = 0 (Lagrange form)."""
    h = np.asarray(epsilons, dtype=float)
    out = np.zeros_like(np.asarray(values[0], dtype=complex))
    for i in range(len(h)):
        weight = 1.0
        for j in range(len(h)):
            if j != i:
                weight *= h[j] / (h[j] - h[i])
        out = out + weight * np.asarray(values[i])
    return out


# --- parametrix ---


@dataclass
class ParametrixBundle:
    """Scalars of the global parametrix at (zeta, t) plus the evaluator that produced them."""

    zeta: float
    t: float
    nus: NuValues
    z1_star: complex
    z2_star: complex
    log_z1_star: complex
    log_z2_star: complex
    d10: complex
    d20: complex
    log_d10: complex
    log_d20: complex
    D1: complex
    D2: complex
    chi_values: dict[str, complex]
    regularization: dict[str, RegularizationReport]
    parametrix: "CauchyParametrix" = field(repr=False, compare=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "zeta": self.zeta,
            "t": self.t,
            "nus": self.nus.to_dict(),
            "z1_star": _complex_json(self.z1_star),
            "z2_star": _complex_json(self.z2_star),
            "d10": _complex_json(self.d10),
            "d20": _complex_json(self.d20),
            "abs_d10": abs(self.d10),
            "abs_d20": abs(self.d20),
            "arg_d10": self.log_d10.imag,
            "arg_d20": self.log_d20.imag,
            "D1_at_omega_k4": _complex_json(self.D1),
            "D2_at_omega2_k2": _complex_json(self.D2),
            "chi": {name: _complex_json(v) for name, v in self.chi_values.items()},
            "regularization": {name: rep.to_dict() for name, rep in self.regularization.items()},
        }


class CauchyParametrix:
    """delta_j, chi_j, D1, D2 and Delta for one spectral dataset at one zeta.

    Arc splines are built on first use and reused afterwards.
    """

    def __init__(self, spectral: SpectralData, zeta: float, spline_nodes: int = ARC_SPLINE_NODES) -> None:
        check_zeta(zeta)
        self.spectral = spectral
        self.zeta = zeta
        self.saddles = saddle_points(zeta)
        self.specs = arc_specs(self.saddles)
        self.arcs = {j: ArcLog(spec, spectral, spline_nodes) for j, spec in self.specs.items()}
        self.nus = nu_values(zeta, spectral)
        self._static: Optional[dict[str, Any]] = None

    def _arc(self, j: int) -> ArcLog:
        if j not in self.arcs:
            raise DomainError(f"delta index must be 1..5, got {j}")
        return self.arcs[j]

    # direct Cauchy integral

    def log_delta(self, j: int, k: ComplexLike) -> ComplexLike:
        """ln delta_j(k) = (1/2 pi i) int ln g(s) ds / (s - k) along the arc.

        Raises:
            NearContourError: if k lies (numerically) on the arc.
        """
        arc = self._arc(j)
        spec = arc.spec
        shape = np.shape(k)
        ks = np.atleast_1d(np.asarray(k, dtype=complex)).ravel()
        ta, tb = spec.theta_start, spec.theta_end
        dist = distance_to_arc(ks, ta, tb)
        if np.any(dist < NEAR_CONTOUR_MIN):
            raise NearContourError(f"delta_{j} requested at distance {float(np.min(dist)):.2e} from its arc")
        theta_star = np.clip(np.angle(ks), ta, tb)
        s_star = np.exp(1j * theta_star)
        g_star = np.asarray(arc.spline(theta_star), dtype=complex)
        use = (dist < NEAR_ARC_DISTANCE) & (np.abs(g_star) > LOG_ARG_FLOOR)
        log_star = np.zeros_like(ks)
        jump = np.zeros_like(ks)
        if np.any(use):
            log_star[use] = np.log(g_star[use])
            kn, sn = ks[use], s_star[use]
            jump[use] = np.log((spec.end - kn) / (sn - kn)) + np.log((sn - kn) / (spec.start - kn))

        def integrand(theta: float) -> np.ndarray:
            s = np.exp(1j * theta)
            return (arc.log_g_theta(theta) - log_star) * 1j * s / (s - ks)

        total = _integrate(integrand, ta, tb, points=theta_star[use])
        out = (total + log_star * jump) / (2j * math.pi)
        return out.reshape(shape)[()]

    def delta(self, j: int, k: ComplexLike, method: str = "direct") -> ComplexLike:
        """delta_j(k) by direct integration or by the closed form on branch 'a' or 'b'."""
        if method == "direct":
            return np.exp(self.log_delta(j, k))
        return self.delta_closed_form(j, k, method)

    # chi integrals

    def _kind(self, j: int, branch: str) -> str:
        if branch not in BRANCHES:
            raise DomainError(f"unknown branch {branch!r}")
        kind = BRANCHES[branch]
        if j == 1 and kind == "ln_tilde_s":
            raise DomainError("delta_1 has no tilde-branch representation")
        return kind

    def _check_cuts(self, spec: ArcIntegralSpec, kind: str, ks: np.ndarray) -> None:
        """k must avoid the cuts of every ln_s(k - s), s on the arc; the far endpoint itself is allowed."""
        ta, tb = spec.theta_start, spec.theta_end
        if kind == "ln_s":
            lo, hi = min(ta, math.pi / 2.0), max(tb, math.pi / 2.0)
            ray = distance_to_ray(ks, 1j, 1j)
            far = spec.start if ta < math.pi / 2.0 - 1e-12 else spec.end
        else:
            lo, hi = ta, math.pi
            ray = distance_to_ray(ks, 0.0, -1.0)
            far = spec.start
        dist = np.minimum(distance_to_arc(ks, lo, hi), ray)
        on_cut = (dist < BRANCH_CUT_TOL * np.maximum(1.0, np.abs(ks))) & (np.abs(ks - far) > ENDPOINT_TOL)
        if np.any(on_cut):
            raise BranchCutError(f"{kind} integrand evaluated on a cut at k = {ks[on_cut][0]}")

    def _chi_integral(
        self,
        j: int,
        kind: str,
        ks: np.ndarray,
        theta_end: float,
        offset: np.ndarray,
        theta_start: Optional[float] = None,
    ) -> np.ndarray:
        arc = self.arcs[j]
        ta = arc.spec.theta_start if theta_start is None else theta_start
        near = distance_to_arc(ks, ta, theta_end) < NEAR_ARC_DISTANCE
        points = np.clip(np.angle(ks[near]), ta, theta_end)

        def integrand(theta: float) -> np.ndarray:
            s = complex(np.exp(1j * theta))
            return (BranchLog(kind, s).value(ks) - offset) * arc.dlog(theta)

        return _integrate(integrand, ta, theta_end, points=points)

    def chi(self, j: int, k: ComplexLike, branch: str = "a") -> ComplexLike:
        """chi_j(k) = (1/2 pi i) int ln_s(k - s) d ln g(s); j = 4, 5 in the subtracted proper form."""
        arc = self._arc(j)
        spec = arc.spec
        kind = self._kind(j, branch)
        shape = np.shape(k)
        ks = np.atleast_1d(np.asarray(k, dtype=complex)).ravel()
        self._check_cuts(spec, kind, ks)
        if not spec.regularized:
            out = self._chi_integral(j, kind, ks, spec.theta_end, np.zeros_like(ks)) / (2j * math.pi)
        else:
            l_end = np.asarray(BranchLog(kind, spec.end)(ks), dtype=complex)
            integral = self._chi_integral(j, kind, ks, spec.theta_end, l_end)
            out = (integral - l_end * arc.log_g(spec.start)) / (2j * math.pi)
        return out.reshape(shape)[()]

    def chi_schedule(self, j: int, k: complex, branch: str = "b") -> RegularizationReport:
        """Regularized chi_j(k) along the epsilon schedule, extrapolated to epsilon = 0."""
        arc = self._arc(j)
        spec = arc.spec
        if not spec.regularized:
            raise DomainError(f"chi_{j} is not a regularized integral")
        kind = self._kind(j, branch)
        if spec.epsilon_schedule[0] >= spec.theta_end - spec.theta_start:
            raise RegularizationError(f"epsilon schedule {spec.epsilon_schedule} exceeds the length of arc {j}")
        ks = np.atleast_1d(np.asarray(k, dtype=complex))
        self._check_cuts(spec, kind, ks)
        l_end = np.asarray(BranchLog(kind, spec.end)(ks), dtype=complex)
        zeros = np.zeros_like(ks)
        # one integral to the coarsest cutoff, then the short pieces between cutoffs
        values = []
        integral = zeros
        previous: Optional[float] = None
        for eps in spec.epsilon_schedule:
            theta_eps = spec.theta_end - eps
            integral = integral + self._chi_integral(j, kind, ks, theta_eps, zeros, theta_start=previous)
            previous = theta_eps
            values.append(complex(((integral - l_end * arc.log_g_theta(theta_eps)) / (2j * math.pi))[0]))
        h = spec.epsilon_schedule
        extrapolated = complex(richardson_limit(h, np.array(values)))
        finer_pair = (h[-2] * values[-1] - h[-1] * values[-2]) / (h[-2] - h[-1])
        first, second = abs(values[0] - values[1]), abs(values[1] - values[2])
        if first == 0.0 or second == 0.0:
            order = math.inf
        else:
            order = math.log(first / second) / math.log(h[0] / h[1])
        return RegularizationReport(
            epsilons=tuple(h),
            values=tuple(values),
            extrapolated=extrapolated,
            finer_pair=complex(finer_pair),
            subtracted=complex(np.atleast_1d(self.chi(j, ks, branch))[0]),
            observed_order=order,
            tolerance=REGULARIZATION_RTOL,
        )

    def chi_tilde(self, j: int, k: complex, check: bool = True) -> tuple[complex, Optional[RegularizationReport]]:
        """chi~_j(k) for j = 4, 5 on the tilde branch, with the epsilon-schedule report.

        Raises:
            RegularizationError: if the schedule extrapolation does not stabilize.
        """
        if j not in (4, 5):
            raise DomainError(f"chi~_j is defined for j = 4, 5, got {j}")
        if not check:
            return complex(np.atleast_1d(self.chi(j, k, "b"))[0]), None
        report = self.chi_schedule(j, k, "b")
        if not report.passed:
            raise RegularizationError(
                f"chi~_{j} schedule did not stabilize: |E0 - E0'| = {report.stabilization:.3e}"
            )
        logger.debug(
            "chi~_%d at %s: order %.2f, subtraction vs schedule %.2e", j, k, report.observed_order, report.agreement
        )
        return report.subtracted, report

    # closed forms

    def delta_closed_form(self, j: int, k: ComplexLike, branch: str = "a") -> ComplexLike:
        """exp(i nu_end ln(k - end) - i nu_start ln(k - start) - chi_j(k)) on the chosen branch.

        For the regularized arcs the endpoint omega carries no log term.
        """
        arc = self._arc(j)
        spec = arc.spec
        kind = self._kind(j, branch)
        ks = np.asarray(k, dtype=complex)
        nu_start = -complex(arc.log_g(spec.start)) / TWO_PI
        exponent = -np.asarray(self.chi(j, ks, branch)) - 1j * nu_start * BranchLog(kind, spec.start)(ks)
        if not spec.regularized:
            nu_end = -complex(arc.log_g(spec.end)) / TWO_PI
            exponent = exponent + 1j * nu_end * BranchLog(kind, spec.end)(ks)
        return np.exp(exponent)[()]

    # products

    def _log_product(self, table: dict[int, dict[str, int]], k: ComplexLike) -> ComplexLike:
        ks = np.asarray(k, dtype=complex)
        total = np.zeros_like(ks)
        for j, powers in table.items():
            points = np.stack([_ARGUMENTS[name](ks) for name in powers])
            logs = np.asarray(self.log_delta(j, points))
            for row, power in enumerate(powers.values()):
                total = total + power * logs[row]
        return total[()]

    def D_products(self, k: ComplexLike) -> tuple[ComplexLike, ComplexLike]:
        """(D1(k), D2(k))."""
        return np.exp(self._log_product(D1_EXPONENTS, k)), np.exp(self._log_product(D2_EXPONENTS, k))

    def delta33(self, k: ComplexLike) -> ComplexLike:
        return np.exp(self._log_product(DELTA33_EXPONENTS, k))

    def Delta_diag(self, k: ComplexLike) -> tuple[ComplexLike, ComplexLike, ComplexLike]:
        """(Delta11, Delta22, Delta33) with Delta11(k) = Delta33(omega k), Delta22(k) = Delta33(omega^2 k)."""
        ks = np.asarray(k, dtype=complex)
        return self.delta33(OMEGA * ks), self.delta33(OMEGA2 * ks), self.delta33(ks)

    def Delta_matrix(self, k: complex) -> np.ndarray:
        return np.diag(np.array(self.Delta_diag(complex(k)), dtype=complex))

    # phase factors

    def z_stars(self) -> tuple[complex, complex, complex, complex]:
        """z1_star, z2_star and their logarithms with arg z1 = pi/2 - arg(omega k4), arg z2 = pi/2 - arg(omega^2 k2).

        Raises:
            SignConditionError: if -i omega k4 z1 or -i omega^2 k2 z2 cannot be made positive.
        """
        zeta = self.zeta
        k4, k2 = self.saddles.k4, self.saddles.k2
        rad1 = OMEGA * (4.0 - 3.0 * k4 * zeta - k4**3 * zeta) / (4.0 * k4**4)
        rad2 = -OMEGA2 * (4.0 - 3.0 * k2 * zeta - k2**3 * zeta) / (4.0 * k2**4)
        prefactor = math.sqrt(2.0) * np.exp(0.25j * math.pi)
        out = []
        for name, rad, tangent in (("z1", rad1, -1j * OMEGA * k4), ("z2", rad2, -1j * OMEGA2 * k2)):
            z = complex(prefactor * np.sqrt(complex(rad)))
            w = tangent * z
            if w.real < 0.0:
                z, w = -z, -w
            if abs(w.imag) > SIGN_CONDITION_RTOL * abs(w) or w.real <= 0.0:
                raise SignConditionError(f"{name}_star violates its positivity condition: {w}")
            rotated = self.saddles.omega_k4 if name == "z1" else self.saddles.omega2_k2
            arg = math.pi / 2.0 - math.atan2(rotated.imag, rotated.real)
            out.append((z, complex(math.log(abs(z)), arg)))
        (z1, log_z1), (z2, log_z2) = out
        return z1, z2, log_z1, log_z2

    def static_phase(self) -> dict[str, Any]:
        """t-independent ingredients of d10 and d20 (cached)."""
        if self._static is None:
            s = self.saddles
            a1, a2 = s.omega_k4, s.omega2_k2
            z1, z2, log_z1, log_z2 = self.z_stars()
            chi1 = complex(self.chi(1, a1, "a"))
            chi2 = complex(self.chi(2, a2, "a"))
            chi3 = complex(self.chi(3, a2, "a"))
            chi4, rep4 = self.chi_tilde(4, a2)
            chi5, rep5 = self.chi_tilde(5, a2)
            ln_i = BranchLog("ln_s", 1j)
            log_d1 = complex(self._log_product(D1_EXPONENTS, a1))
            log_d2 = complex(self._log_product(D2_EXPONENTS, a2))
            self._static = {
                "z1": z1,
                "z2": z2,
                "log_z1": log_z1,
                "log_z2": log_z2,
                "chi": {"chi1": chi1, "chi2": chi2, "chi3": chi3, "chi_tilde4": chi4, "chi_tilde5": chi5},
                "regularization": {"chi_tilde4": rep4, "chi_tilde5": rep5},
                "ln_i_a1": complex(ln_i(a1)),
                "ln_i_a2": complex(ln_i(a2)),
                "log_D1": log_d1,
                "log_D2": log_d2,
            }
        return self._static

    def bundle(self, t: float) -> ParametrixBundle:
        if t < T_MIN:
            raise DomainError(f"t must be at least {T_MIN}, got {t}")
        st = self.static_phase()
        nu = self.nus
        chi = st["chi"]
        log_t = math.log(t)
        log_d10 = (
            -2.0 * TWO_PI * nu.nu1
            + 2.0 * chi["chi1"]
            - 2j * nu.nu3 * st["ln_i_a1"]
            - 1j * nu.nu1 * log_t
            - 2j * nu.nu1 * st["log_z1"]
            + st["log_D1"]
        )
        power = nu.nu4 - nu.nu5 - nu.nu2
        log_d20 = (
            -2.0 * chi["chi2"]
            + chi["chi3"]
            - chi["chi_tilde4"]
            + 2.0 * chi["chi_tilde5"]
            + 1j * nu.nu3 * st["ln_i_a2"]
            + 1j * power * (log_t + 2.0 * st["log_z2"])
            + st["log_D2"]
        )
        return ParametrixBundle(
            zeta=self.zeta,
            t=t,
            nus=nu,
            z1_star=st["z1"],
            z2_star=st["z2"],
            log_z1_star=st["log_z1"],
            log_z2_star=st["log_z2"],
            d10=complex(np.exp(log_d10)),
            d20=complex(np.exp(log_d20)),
            log_d10=complex(log_d10),
            log_d20=complex(log_d20),
            D1=complex(np.exp(st["log_D1"])),
            D2=complex(np.exp(st["log_D2"])),
            chi_values=dict(chi),
            regularization=dict(st["regularization"]),
            parametrix=self,
        )


# --- functional entry points ---


def chi(j: int, zeta: float, k: ComplexLike, spectral: SpectralData, branch: str = "a") -> ComplexLike:
    if j not in (1, 2, 3):
        raise DomainError(f"chi_j is defined for j = 1, 2, 3, got {j}")
    return CauchyParametrix(spectral, zeta).chi(j, k, branch)


def chi_tilde(j: int, zeta: float, k: complex, spectral: SpectralData) -> complex:
    value, _report = CauchyParametrix(spectral, zeta).chi_tilde(j, k)
    return value


def delta(j: int, zeta: float, k: ComplexLike, spectral: SpectralData, method: str = "direct") -> ComplexLike:
    return CauchyParametrix(spectral, zeta).delta(j, k, method)


def D_products(zeta: float, k: ComplexLike, spectral: SpectralData) -> tuple[ComplexLike, ComplexLike]:
    return CauchyParametrix(spectral, zeta).D_products(k)


def Delta_diag(zeta: float, k: ComplexLike, spectral: SpectralData) -> tuple[ComplexLike, ComplexLike, ComplexLike]:
    return CauchyParametrix(spectral, zeta).Delta_diag(k)


def phase_factors(zeta: float, t: float, parametrix: CauchyParametrix) -> tuple[complex, complex, complex, complex]:
    """(z1_star, z2_star, d10, d20) at (zeta, t)."""
    if abs(parametrix.zeta - zeta) > 1e-15:
        raise DomainError(f"parametrix was built for zeta = {parametrix.zeta}, not {zeta}")
    b = parametrix.bundle(t)
    return b.z1_star, b.z2_star, b.d10, b.d20
