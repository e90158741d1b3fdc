"""Model Riemann-Hilbert problems on the cross X and their parabolic-cylinder solutions."""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Literal, Union

import mpmath
import numpy as np
from scipy.special import rgamma

from boussinesq_asymptotics.asymptotics import QCoefficients
from boussinesq_asymptotics.config import (
    BRANCH_CUT_TOL,
    CROSS_ANGLE_TOL,
    MODEL_CONSTRAINT_TOL,
    MX_NORMAL_OFFSET,
    NU_NEGATIVE_TOL,
    PCF_ASYMPTOTIC_MAX_TERMS,
    PCF_CROSSOVER,
    PCF_DPS,
    PCF_MATCH_TOL,
    PCF_MAX_ORDER,
    PCF_OVERLAP,
)
from boussinesq_asymptotics.errors import (
    AccuracyError,
    AdmissibilityError,
    BranchCutError,
    DegenerateBeta,
    DomainError,
    RegionMismatch,
)
from boussinesq_asymptotics.spectral_core import TWO_PI

logger = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(TWO_PI)
SIGMA_TILDE = np.diag([0.0, 1.0, -1.0]).astype(complex)

# Swaps indices 1 and 2, carrying the (2,3) block of model 2 onto the (1,3) block of model 1.
_SWAP12 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)

CROSS_RAYS: dict[str, float] = {
    "X1": math.pi / 4,
    "X2": 3 * math.pi / 4,
    "X3": -3 * math.pi / 4,
    "X4": -math.pi / 4,
    "R_plus": 0.0,
    "R_minus": math.pi,
}
X_RAYS: tuple[str, ...] = ("X1", "X2", "X3", "X4")

DegenerateMode = Literal["raise", "limit"]


# --- Parabolic cylinder functions ---


def _check_order(order: complex) -> None:
    if abs(order) > PCF_MAX_ORDER:
        raise DomainError(f"parabolic cylinder order {order} exceeds {PCF_MAX_ORDER}")


def _log_pcf_series(order: complex, z: complex) -> complex:
    """log D_order(z) from the Kummer-function form of the Maclaurin series, in extended precision."""
    with mpmath.workdps(PCF_DPS):
        a = mpmath.mpc(order.real, order.imag)
        w = mpmath.mpc(z.real, z.imag)
        x = w * w / 2
        even = mpmath.sqrt(mpmath.pi) * mpmath.rgamma((1 - a) / 2) * mpmath.hyp1f1(-a / 2, mpmath.mpf(1) / 2, x)
        odd = mpmath.sqrt(2 * mpmath.pi) * w * mpmath.rgamma(-a / 2) * mpmath.hyp1f1((1 - a) / 2, mpmath.mpf(3) / 2, x)
        value = mpmath.power(2, a / 2) * mpmath.exp(-x / 2) * (even - odd)
        if value == 0:
            return complex(-math.inf, 0.0)
        return complex(mpmath.log(value))


def _asymptotic_series(p: complex, sign: int, w2: complex) -> complex:
    """sum_s sign^s (p)_{2s} / (s! (2 w^2)^s), truncated at its smallest term."""
    total = term = 1.0 + 0.0j
    previous = math.inf
    for s in range(PCF_ASYMPTOTIC_MAX_TERMS):
        term = term * sign * (p + 2 * s) * (p + 2 * s + 1) / ((s + 1) * 2 * w2)
        size = abs(term)
        if size >= previous:
            break
        total += term
        if size <= 1e-17 * abs(total):
            break
        previous = size
    return total


def _log_add(a: complex, b: complex) -> complex:
    top = max(a.real, b.real)
    return top + cmath.log(cmath.exp(a - top) + cmath.exp(b - top))


def _log_pcf_asymptotic(order: complex, z: complex) -> complex:
    """log D_order(z) from the large-|z| expansion.

    The recessive e^{z^2/4} series is added once |arg z| > pi/2, with the
    e^{+i pi order} connection coefficient in the upper half-plane and
    e^{-i pi order} in the lower one.
    """
    log_w = cmath.log(z)
    w2 = z * z
    log_main = order * log_w - w2 / 4 + cmath.log(_asymptotic_series(-order, -1, w2))
    phase = cmath.phase(z)
    if abs(phase) <= math.pi / 2:
        return log_main
    side = 1 if phase > 0 else -1
    coef = -SQRT_2PI * complex(rgamma(-order)) * cmath.exp(side * 1j * math.pi * order)
    if coef == 0:
        return log_main
    log_extra = cmath.log(coef) + (-order - 1) * log_w + w2 / 4 + cmath.log(_asymptotic_series(order + 1, 1, w2))
    return _log_add(log_main, log_extra)


@lru_cache(maxsize=4096)
def crossover_mismatch(order: complex, direction: float) -> float:
    """Relative disagreement of the two representations at the outer edge of the overlap band."""
    z = cmath.rect(PCF_OVERLAP[1], direction)
    diff = _log_pcf_asymptotic(order, z) - _log_pcf_series(order, z)
    return abs(cmath.exp(diff) - 1.0)


def log_pcf_D(order: complex, z: complex) -> complex:
    """Logarithm of D_order(z), defined modulo 2 pi i.

    Raises:
        DomainError: If |order| exceeds PCF_MAX_ORDER.
        AccuracyError: If series and expansion disagree at the cross-over.
    """
    order, z = complex(order), complex(z)
    _check_order(order)
    if abs(z) <= PCF_CROSSOVER:
        return _log_pcf_series(order, z)
    direction = round(cmath.phase(z), 8)
    mismatch = crossover_mismatch(order, direction)
    if mismatch > PCF_MATCH_TOL:
        raise AccuracyError(
            f"D_{order} series/asymptotic mismatch {mismatch:.3e} at arg z = {direction:.4f}"
        )
    return _log_pcf_asymptotic(order, z)


def pcf_D(order: complex, z: complex) -> complex:
    """Parabolic cylinder function D_order(z)."""
    return cmath.exp(log_pcf_D(order, z))


def pcf_D_prime(order: complex, z: complex) -> complex:
    """D'_order(z) = (z/2) D_order(z) - D_{order+1}(z)."""
    return complex(z) / 2 * pcf_D(order, z) - pcf_D(complex(order) + 1, z)


def _pcf_branch(order: complex, rotation: complex, z: complex) -> tuple[complex, complex]:
    """log D_order(rotation * z) and its logarithmic z-derivative."""
    w = rotation * z
    log_d = log_pcf_D(order, w)
    ratio = cmath.exp(log_pcf_D(order + 1, w) - log_d)
    return log_d, rotation * (w / 2 - ratio)


# --- Parameters ---


@dataclass(frozen=True)
class CrossPoint:
    z: complex
    ray: str

    def __post_init__(self) -> None:
        if self.ray not in CROSS_RAYS:
            raise DomainError(f"unknown ray {self.ray!r}")
        if self.z == 0:
            raise DomainError("the origin lies on every ray")
        gap = abs((cmath.phase(self.z) - CROSS_RAYS[self.ray] + math.pi) % TWO_PI - math.pi)
        if gap > CROSS_ANGLE_TOL:
            raise RegionMismatch(f"{self.z} is not on ray {self.ray} (angle off by {gap:.2e})")

    @classmethod
    def on_ray(cls, ray: str, s: float) -> "CrossPoint":
        if ray not in CROSS_RAYS:
            raise DomainError(f"unknown ray {ray!r}")
        return cls(s * cmath.exp(1j * CROSS_RAYS[ray]), ray)

    @property
    def direction(self) -> complex:
        return cmath.exp(1j * CROSS_RAYS[self.ray])

    @property
    def normal(self) -> complex:
        """Unit normal pointing to the + (left) side of the outward-oriented ray."""
        return 1j * self.direction


def _clamped_nu(value: float, name: str) -> float:
    if value < -NU_NEGATIVE_TOL:
        raise AdmissibilityError(f"{name} = {value:.3e} is negative")
    return max(value, 0.0)


@dataclass(frozen=True)
class ModelParams1:
    q: complex

    def __post_init__(self) -> None:
        if not abs(self.q) < 1.0:
            raise AdmissibilityError(f"|q| = {abs(self.q):.6f} must be < 1")

    @property
    def nu(self) -> float:
        return -math.log1p(-abs(self.q) ** 2) / TWO_PI

    def as_model2(self) -> "ModelParams2":
        """Embedding with q2 = q4 = q5 = 0, q6 = q; its (2,3) block is this problem's (1,3) block."""
        return ModelParams2(0j, 0j, 0j, complex(self.q))

    def to_dict(self) -> dict[str, Any]:
        q = complex(self.q)
        return {"q": [q.real, q.imag], "nu": self.nu}


@dataclass(frozen=True)
class ModelParams2:
    q2: complex
    q4: complex
    q5: complex
    q6: complex

    def __post_init__(self) -> None:
        if not self.f4 > 0:
            raise AdmissibilityError(f"1 + |q2|^2 - |q4|^2 = {self.f4:.3e} must be positive")
        if not self.d5 > 0:
            raise AdmissibilityError(f"1 - |q5|^2 - |q6|^2 = {self.d5:.3e} must be positive")
        if self.constraint_residual > MODEL_CONSTRAINT_TOL:
            raise AdmissibilityError(
                f"q4 - conj(q5) - q2 conj(q6) = {self.constraint_residual:.3e} exceeds {MODEL_CONSTRAINT_TOL}"
            )
        _clamped_nu(self.nu2 + self.nu5 - self.nu4, "nu_hat2")

    @classmethod
    def from_free(cls, q2: complex, q5: complex, q6: complex) -> "ModelParams2":
        """Resolve q4 from the constraint q4 = conj(q5) + q2 conj(q6)."""
        q2, q5, q6 = complex(q2), complex(q5), complex(q6)
        return cls(q2, q5.conjugate() + q2 * q6.conjugate(), q5, q6)

    @classmethod
    def from_coefficients(cls, coefficients: QCoefficients) -> "ModelParams2":
        params = cls.from_free(coefficients.q2, coefficients.q5, coefficients.q6)
        drift = abs(params.q4 - coefficients.q4)
        if drift > MODEL_CONSTRAINT_TOL:
            logger.debug("q4 re-resolved from the constraint; quadrature value differs by %.3e", drift)
        return params

    @property
    def constraint_residual(self) -> float:
        return abs(self.q4 - self.q5.conjugate() - self.q2 * self.q6.conjugate())

    @property
    def combination(self) -> complex:
        return self.q6 - self.q2 * self.q5

    @property
    def d2(self) -> float:
        return 1.0 + abs(self.q2) ** 2

    @property
    def d5(self) -> float:
        return 1.0 - abs(self.q5) ** 2 - abs(self.q6) ** 2

    @property
    def f4(self) -> float:
        return 1.0 + abs(self.q2) ** 2 - abs(self.q4) ** 2

    @property
    def nu2(self) -> float:
        return -math.log(self.d2) / TWO_PI

    @property
    def nu4(self) -> float:
        return -math.log(self.f4) / TWO_PI

    @property
    def nu5(self) -> float:
        return -math.log(self.d5) / TWO_PI

    @property
    def nu_hat2(self) -> float:
        return _clamped_nu(self.nu2 + self.nu5 - self.nu4, "nu_hat2")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            name: [complex(getattr(self, name)).real, complex(getattr(self, name)).imag]
            for name in ("q2", "q4", "q5", "q6")
        }
        out.update(nu2=self.nu2, nu4=self.nu4, nu5=self.nu5, nu_hat2=self.nu_hat2)
        return out


ModelParams = Union[ModelParams1, ModelParams2]


@dataclass(frozen=True)
class BetaPair:
    b12: complex
    b21: complex

    @property
    def product(self) -> complex:
        return self.b12 * self.b21

    def to_dict(self) -> dict[str, list[float]]:
        return {"b12": [self.b12.real, self.b12.imag], "b21": [self.b21.real, self.b21.imag]}


def _sinh_gamma_inverse(nu: float, sign: int) -> complex:
    """1 / ((e^{pi nu} - e^{-pi nu}) Gamma(sign i nu)), continued to nu = 0."""
    if nu <= NU_NEGATIVE_TOL:
        return sign * 1j / TWO_PI
    return complex(rgamma(sign * 1j * nu)) / (2.0 * math.sinh(math.pi * nu))


def beta_model1(params: ModelParams1) -> BetaPair:
    nu = params.nu
    q = complex(params.q)
    scale = math.exp(math.pi * nu / 2) * SQRT_2PI
    b12 = cmath.exp(3j * math.pi / 4) * scale * q.conjugate() * _sinh_gamma_inverse(nu, -1)
    b21 = cmath.exp(-3j * math.pi / 4) * scale * q * _sinh_gamma_inverse(nu, 1)
    return BetaPair(b12, b21)


def beta_model2(params: ModelParams2) -> BetaPair:
    nu = params.nu_hat2
    c = params.combination
    scale = math.exp(math.pi * nu / 2) * SQRT_2PI
    b12 = (
        cmath.exp(3j * math.pi / 4)
        * scale
        * math.exp(TWO_PI * (params.nu4 - params.nu2))
        * c.conjugate()
        * _sinh_gamma_inverse(nu, -1)
    )
    b21 = cmath.exp(-3j * math.pi / 4) * scale * math.exp(TWO_PI * params.nu2) * c * _sinh_gamma_inverse(nu, 1)
    return BetaPair(b12, b21)


def _upper(value: complex) -> np.ndarray:
    m = np.eye(3, dtype=complex)
    m[1, 2] = value
    return m


def _lower(value: complex) -> np.ndarray:
    m = np.eye(3, dtype=complex)
    m[2, 1] = value
    return m


def _sigma_exp(a: float) -> np.ndarray:
    return np.diag([1.0, math.exp(a), math.exp(-a)]).astype(complex)


def vpsi_explicit(params: ModelParams2) -> tuple[np.ndarray, np.ndarray]:
    """Constant jump of psi across R_plus and R_minus as triangular-diagonal-triangular products."""
    c = params.combination
    plus = _upper(c.conjugate() / params.d2) @ _sigma_exp(math.pi * (2 * params.nu2 - params.nu4)) @ _lower(-c / params.d2)
    minus = _lower(-c / params.d5) @ _sigma_exp(math.pi * (params.nu4 - 2 * params.nu5)) @ _upper(c.conjugate() / params.d5)
    return plus, minus


# --- Solution of the model problems ---


@dataclass(frozen=True)
class _PsiParts:
    log22: complex
    log33: complex
    dlog22: complex
    dlog33: complex
    g23: complex
    g32: complex


class ModelRHP:
    """Explicit solution of model problem 1 or 2 built from parabolic cylinder functions.

    Model 1 is evaluated through its model-2 embedding and the 1<->2 index swap.
    ``degenerate="limit"`` replaces psi_23 and psi_32 by their nu_hat2 -> 0 limit
    (zero) instead of raising DegenerateBeta.
    """

    def __init__(self, model: int, params: ModelParams, degenerate: DegenerateMode = "limit") -> None:
        if model == 1 and isinstance(params, ModelParams1):
            self.params2 = params.as_model2()
            self.beta = beta_model1(params)
        elif model == 2 and isinstance(params, ModelParams2):
            self.params2 = params
            self.beta = beta_model2(params)
        else:
            raise DomainError(f"model {model} does not take {type(params).__name__}")
        if degenerate not in ("raise", "limit"):
            raise DomainError(f"unknown degenerate mode {degenerate!r}")
        self.model = model
        self.params = params
        self.degenerate = degenerate
        self.nu = self.params2.nu_hat2
        self._beta2 = beta_model2(self.params2)

    def _own(self, m: np.ndarray) -> np.ndarray:
        return _SWAP12 @ m @ _SWAP12 if self.model == 1 else m

    @property
    def is_degenerate(self) -> bool:
        return self.nu <= NU_NEGATIVE_TOL

    def _parts(self, z: complex) -> _PsiParts:
        if z.imag == 0:
            raise BranchCutError(f"psi is sectionally defined off the real line, got z = {z}")
        p, nu = self.params2, self.nu
        if z.imag > 0:
            rot33, pre33 = cmath.exp(-1j * math.pi / 4), math.pi * nu / 4
            rot22, pre22 = cmath.exp(-3j * math.pi / 4), -3 * math.pi * nu / 4
        else:
            shift = math.pi * (p.nu4 - 2 * p.nu2)
            rot33, pre33 = cmath.exp(3j * math.pi / 4), -3 * math.pi * nu / 4 - shift
            rot22, pre22 = cmath.exp(1j * math.pi / 4), math.pi * nu / 4 + shift
        log33, dlog33 = _pcf_branch(-1j * nu, rot33, z)
        log22, dlog22 = _pcf_branch(1j * nu, rot22, z)
        if self.is_degenerate:
            if self.degenerate == "raise":
                raise DegenerateBeta(f"nu_hat2 = {nu:.3e}: beta coefficients vanish")
            g23 = g32 = 0j
        else:
            g23 = (1j * dlog33 + z / 2) / self._beta2.b21
            g32 = (-1j * dlog22 + z / 2) / self._beta2.b12
        return _PsiParts(log22 + pre22, log33 + pre33, dlog22, dlog33, g23, g32)

    def _psi2(self, z: complex) -> tuple[np.ndarray, np.ndarray]:
        parts = self._parts(z)
        e22, e33 = cmath.exp(parts.log22), cmath.exp(parts.log33)
        psi = np.eye(3, dtype=complex)
        psi[1, 1] = e22
        psi[1, 2] = e33 * parts.g23
        psi[2, 1] = e22 * parts.g32
        psi[2, 2] = e33
        dpsi = np.zeros((3, 3), dtype=complex)
        d22, d33 = e22 * parts.dlog22, e33 * parts.dlog33
        dpsi[1, 1] = d22
        dpsi[2, 2] = d33
        if not self.is_degenerate:
            nu = self.nu
            dd33 = -(z * z / 4 - 0.5j - nu) * e33
            dd22 = -(z * z / 4 + 0.5j - nu) * e22
            dpsi[1, 2] = (1j * dd33 + e33 / 2 + z / 2 * d33) / self._beta2.b21
            dpsi[2, 1] = (-1j * dd22 + e22 / 2 + z / 2 * d22) / self._beta2.b12
        return psi, dpsi

    def psi(self, z: complex) -> np.ndarray:
        return self._own(self._psi2(complex(z))[0])

    def psi_derivative(self, z: complex) -> np.ndarray:
        return self._own(self._psi2(complex(z))[1])

    def ode_coefficient(self, z: complex) -> np.ndarray:
        """-(i z / 2) sigma_tilde + i beta_12 E_23 - i beta_21 E_32, in this model's indexing."""
        m = -0.5j * complex(z) * SIGMA_TILDE
        m[1, 2] += 1j * self._beta2.b12
        m[2, 1] -= 1j * self._beta2.b21
        return self._own(m)

    def ode_residual(self, z: complex) -> float:
        psi, dpsi = self._psi2(complex(z))
        lhs = np.linalg.solve(psi.T, dpsi.T).T
        return float(np.max(np.abs(self._own(lhs) - self.ode_coefficient(z))))

    def det_psi(self, z: complex) -> complex:
        return complex(np.linalg.det(self._psi2(complex(z))[0]))

    def psi_jump(self, x: float, offset: float = MX_NORMAL_OFFSET) -> np.ndarray:
        """psi_-^{-1} psi_+ on the real line from second-order one-sided limits."""
        if x == 0:
            raise DomainError("psi jump is sampled away from the origin")
        plus = 2 * self.psi(x + 1j * offset) - self.psi(x + 2j * offset)
        minus = 2 * self.psi(x - 1j * offset) - self.psi(x - 2j * offset)
        return np.linalg.solve(minus, plus)

    def _b_inverse(self, phase: float) -> tuple[complex, str]:
        """Off-diagonal entry and position of B(z)^{-1} in the sector of arg z."""
        p = self.params2
        c = p.combination
        if 0 < phase < math.pi / 4:
            return c / p.d2, "lower"
        if 3 * math.pi / 4 < phase:
            return -c.conjugate() / p.d5, "upper"
        if phase < -3 * math.pi / 4:
            return -c / p.d5, "lower"
        if -math.pi / 4 < phase < 0:
            return c.conjugate() / p.d2, "upper"
        return 0j, "none"

    def _mX2(self, z: complex) -> np.ndarray:
        if z == 0:
            raise DomainError("m^X is evaluated away from the origin")
        phase = cmath.phase(z)
        gaps = [abs((phase - CROSS_RAYS[ray] + math.pi) % TWO_PI - math.pi) for ray in X_RAYS]
        if min(gaps) <= CROSS_ANGLE_TOL or abs(z.imag) <= BRANCH_CUT_TOL * abs(z):
            raise BranchCutError(f"z = {z} lies on the cross or the real line")
        p = self.params2
        parts = self._parts(z)
        log_z = cmath.log(z)
        log0 = log_z if z.imag > 0 else log_z + 2j * math.pi
        le22 = 1j * z * z / 4 - 1j * (p.nu2 - p.nu4 / 2) * log0 - 1j * (p.nu5 - p.nu4 / 2) * log_z
        le33 = -le22
        b, kind = self._b_inverse(phase)
        a22 = cmath.exp(parts.log22 + le22)
        a33 = cmath.exp(parts.log33 + le33)
        m = np.eye(3, dtype=complex)
        m[1, 1] = a22
        m[2, 1] = parts.g32 * a22
        m[1, 2] = parts.g23 * a33
        m[2, 2] = a33
        if kind == "lower":
            cross = cmath.exp(parts.log33 + le22)
            m[1, 1] += b * parts.g23 * cross
            m[2, 1] += b * cross
        elif kind == "upper":
            cross = cmath.exp(parts.log22 + le33)
            m[1, 2] += b * cross
            m[2, 2] += b * parts.g32 * cross
        return m

    def mX(self, z: complex) -> np.ndarray:
        return self._own(self._mX2(complex(z)))

    def vX(self, point: CrossPoint) -> np.ndarray:
        """Jump matrix on one of the four rays of X."""
        if point.ray not in X_RAYS:
            raise RegionMismatch(f"v^X lives on X1..X4, got {point.ray}")
        p = self.params2
        z = complex(point.z)
        log_z = cmath.log(z)
        log0 = log_z if z.imag > 0 else log_z + 2j * math.pi
        expo = -1j * (2 * p.nu5 - p.nu4) * log_z - 1j * (2 * p.nu2 - p.nu4) * log0 + 1j * z * z / 2
        grow, decay = cmath.exp(expo), cmath.exp(-expo)
        c = p.combination
        if point.ray == "X1":
            v = _lower(-c / p.d2 * grow)
        elif point.ray == "X2":
            v = _upper(-c.conjugate() / p.d5 * decay)
        elif point.ray == "X3":
            v = _lower(c / p.d5 * grow)
        else:
            v = _upper(c.conjugate() / p.d2 * decay)
        return self._own(v)

    def boundary_values(self, point: CrossPoint, offset: float = MX_NORMAL_OFFSET) -> tuple[np.ndarray, np.ndarray]:
        """Second-order one-sided limits m_+ and m_- along the ray normal."""
        n = point.normal * offset
        z = complex(point.z)
        plus = 2 * self.mX(z + n) - self.mX(z + 2 * n)
        minus = 2 * self.mX(z - n) - self.mX(z - 2 * n)
        return plus, minus

    def jump_residual(self, point: CrossPoint, offset: float = MX_NORMAL_OFFSET) -> float:
        plus, minus = self.boundary_values(point, offset)
        return float(np.max(np.abs(plus - minus @ self.vX(point))))

    def m1(self) -> np.ndarray:
        """Coefficient of 1/z in the large-z expansion of m^X."""
        m = np.zeros((3, 3), dtype=complex)
        m[1, 2] = self._beta2.b12
        m[2, 1] = self._beta2.b21
        return self._own(m)

    def large_z_residual(self, z: complex) -> float:
        z = complex(z)
        return float(np.max(np.abs(z * (self.mX(z) - np.eye(3)) - self.m1())))


def psi_matrix(params: ModelParams2, z: complex, degenerate: DegenerateMode = "raise") -> np.ndarray:
    """Explicit psi for model 2 off the real line.

    Raises:
        DegenerateBeta: If nu_hat2 = 0 and ``degenerate`` is "raise".
        BranchCutError: If z is real.
    """
    return ModelRHP(2, params, degenerate).psi(z)


def mX_eval(model: int, params: ModelParams, z: complex) -> np.ndarray:
    """Sectionally analytic solution m^X(z) of model problem 1 or 2 off the cross."""
    return ModelRHP(model, params).mX(z)
