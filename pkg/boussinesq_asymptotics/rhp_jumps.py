"""Jump matrices of the RH problem for n, their symmetries and the exact-mode lens factorizations."""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from boussinesq_asymptotics.config import (
    EXP_LOG_MAX,
    JUMP_EXCLUSION_RADIUS,
    TOL_COEFFICIENT,
    TOL_FACTORIZATION,
    UNIT_CIRCLE_RTOL,
)
from boussinesq_asymptotics.errors import PoleError, RegionMismatch
from boussinesq_asymptotics.spectral_core import OMEGA, OMEGA2, saddle_points, sixth_roots, theta
from boussinesq_asymptotics.spectral_data import SpectralData

logger = logging.getLogger(__name__)

A_CAL: np.ndarray = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)
B_CAL: np.ndarray = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)

# ray angle (degrees) -> index j of Gamma_j, inside and outside the unit disk
_INNER_RAYS: dict[int, int] = {90: 1, 150: 2, 210: 3, 270: 4, 330: 5, 30: 6}
_OUTER_RAYS: dict[int, int] = {270: 1, 330: 2, 30: 3, 90: 4, 150: 5, 210: 6}
# centre of each 60-degree circle arc -> label
_CIRCLE_ARCS: dict[int, str] = {0: "8", 60: "9", 120: "7", 180: "8", 240: "9", 300: "7"}

RAY_LABELS: tuple[str, ...] = tuple(f"{j}{p}" for j in range(1, 7) for p in ("'", "''"))
CIRCLE_LABELS: tuple[str, ...] = ("7", "8", "9")
FACTOR_LABELS: tuple[str, ...] = tuple(f"v{j}^(1)" for j in range(1, 13))
DIAGONAL_LABELS: tuple[str, ...] = ("v2^(1)", "v5^(1)", "v8^(1)", "v11^(1)")
REGION_LABELS: tuple[str, ...] = RAY_LABELS + CIRCLE_LABELS + FACTOR_LABELS

# lens arc (index of the middle factor) -> factor labels, target jump
FACTORIZATIONS: dict[str, tuple[tuple[str, str, str], str]] = {
    "123": (("v3^(1)", "v2^(1)", "v1^(1)"), "9"),
    "456": (("v4^(1)", "v5^(1)", "v6^(1)"), "9inv"),
    "789": (("v7^(1)", "v8^(1)", "v9^(1)"), "7"),
    "101112": (("v10^(1)", "v11^(1)", "v12^(1)"), "7"),
}
_ANGLE_TOL: float = 1e-9


@dataclass(frozen=True)
class SymmetryMatrices:
    A: np.ndarray
    B: np.ndarray


def symmetry_matrices() -> SymmetryMatrices:
    """The cyclic permutation A (A^3 = I) and the transposition B (B^2 = I)."""
    return SymmetryMatrices(A_CAL.copy(), B_CAL.copy())


@dataclass(frozen=True)
class JumpMatrix:
    region: str
    x: float
    t: float
    k: complex
    m: np.ndarray

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.m))


# --- geometry ---


def _deg(k: complex) -> float:
    return math.degrees(math.atan2(k.imag, k.real)) % 360.0


def classify(k: complex) -> str:
    """Label of the subcontour of Gamma containing k.

    Raises:
        RegionMismatch: if k is not on Gamma or is one of its intersection points.
    """
    k = complex(k)
    modulus = abs(k)
    if modulus == 0.0:
        raise RegionMismatch("k = 0 is an intersection point of the contour")
    angle = _deg(k)
    if abs(modulus - 1.0) <= UNIT_CIRCLE_RTOL:
        for centre, label in _CIRCLE_ARCS.items():
            offset = (angle - centre + 180.0) % 360.0 - 180.0
            if abs(offset) < 30.0 - _ANGLE_TOL:
                return label
        raise RegionMismatch(f"k = {k} is an intersection point of the circle and a ray")
    for ray in _INNER_RAYS:
        if abs((angle - ray + 180.0) % 360.0 - 180.0) <= _ANGLE_TOL:
            return f"{_INNER_RAYS[ray]}''" if modulus < 1.0 else f"{_OUTER_RAYS[ray]}'"
    raise RegionMismatch(f"k = {k} is not on the contour")


def lens_arcs(zeta: float) -> dict[str, tuple[float, float]]:
    """Angular extent (radians) of the four circle arcs in the sector pi/3 < arg k < 2 pi/3."""
    saddles = saddle_points(zeta)
    a4 = math.atan2(saddles.omega_k4.imag, saddles.omega_k4.real)
    a2 = math.atan2(saddles.omega2_k2.imag, saddles.omega2_k2.real)
    return {
        "123": (math.pi / 3.0, a4),
        "456": (a4, math.pi / 2.0),
        "789": (math.pi / 2.0, a2),
        "101112": (a2, 2.0 * math.pi / 3.0),
    }


def lens_group(label: str) -> str:
    j = int(label[1:].split("^")[0])
    return ("123", "456", "789", "101112")[(j - 1) // 3]


def sample_lens_arc(group: str, zeta: float, n: int, margin: float = 2.0 * JUMP_EXCLUSION_RADIUS) -> np.ndarray:
    """n points on a lens arc, kept margin radians from its endpoints (the chord is shorter than the angle)."""
    lo, hi = lens_arcs(zeta)[group]
    return np.exp(1j * np.linspace(lo + margin, hi - margin, n))


def _check_exclusion(k: complex) -> None:
    if np.min(np.abs(k - sixth_roots())) < JUMP_EXCLUSION_RADIUS:
        raise PoleError(f"k = {k} is within {JUMP_EXCLUSION_RADIUS:g} of a sixth root of unity")


def _check_region(label: str, k: complex, zeta: float) -> None:
    if label in FACTOR_LABELS:
        if abs(abs(k) - 1.0) > UNIT_CIRCLE_RTOL:
            raise RegionMismatch(f"{label} lives on the unit circle, got k = {k}")
        lo, hi = lens_arcs(zeta)[lens_group(label)]
        arg = math.atan2(k.imag, k.real)
        if not lo - _ANGLE_TOL <= arg <= hi + _ANGLE_TOL:
            raise RegionMismatch(f"k = {k} is not on the lens arc of {label}")
        return
    if label not in REGION_LABELS:
        raise RegionMismatch(f"unknown region label {label!r}")
    found = classify(k)
    if found != label:
        raise RegionMismatch(f"k = {k} lies on {found}, not on {label}")


# --- evaluation context ---


def scaled_exp(coef: complex, exponent: complex) -> complex:
    """coef * exp(exponent) with the modulus formed from ln|coef| + Re exponent.

    The log-modulus is clamped at EXP_LOG_MAX, so a small coefficient times a
    large exponential stays finite and no inf * 0 arises.
    """
    coef, exponent = complex(coef), complex(exponent)
    if coef == 0:
        return 0j
    log_modulus = min(math.log(abs(coef)) + exponent.real, EXP_LOG_MAX)
    return math.exp(log_modulus) * cmath.exp(1j * (cmath.phase(coef) + exponent.imag))


class _Context:
    """r1, r2, f and exp(+-theta_ij) at the points omega^j k, (omega^j k)^{-1}."""

    def __init__(self, x: float, t: float, k: complex, spectral: SpectralData) -> None:
        self.x = x
        self.t = t
        self.k = complex(k)
        self.spectral = spectral

    def r1(self, point: complex) -> complex:
        return complex(self.spectral.r1(point))

    def r2(self, point: complex) -> complex:
        return complex(self.spectral.r2(point))

    def rr(self, point: complex) -> complex:
        return self.r1(point) * self.r2(point)

    def f(self, point: complex) -> complex:
        return complex(self.spectral.f(point))

    def exponent(self, pair: int, sign: int) -> complex:
        return sign * complex(theta(pair, self.x, self.t, self.k))

    def e(self, pair: int, sign: int) -> complex:
        return scaled_exp(1.0, self.exponent(pair, sign))

    def term(self, coef: complex, pair: int, sign: int) -> complex:
        """coef * exp(sign theta_pair); zero coefficients never touch the exponential."""
        if coef == 0:
            return 0j
        return scaled_exp(coef, self.exponent(pair, sign))

    # frequently used arguments
    @property
    def wk(self) -> complex:
        return OMEGA * self.k

    @property
    def w2k(self) -> complex:
        return OMEGA2 * self.k

    @property
    def inv(self) -> complex:
        return 1.0 / self.k

    @property
    def inv_w(self) -> complex:
        return 1.0 / (OMEGA * self.k)

    @property
    def inv_w2(self) -> complex:
        return 1.0 / (OMEGA2 * self.k)


def _mat(rows: list[list[complex]]) -> np.ndarray:
    return np.array(rows, dtype=complex)


def _v_ray(label: str, c: _Context) -> np.ndarray:
    m = np.eye(3, dtype=complex)
    if label == "1'":
        m[0, 1] = c.term(-c.r1(c.k), 21, -1)
    elif label == "1''":
        m[1, 0] = c.term(c.r1(c.inv), 21, 1)
    elif label == "2'":
        m[1, 2] = c.term(-c.r2(c.inv_w), 32, -1)
    elif label == "2''":
        m[2, 1] = c.term(c.r2(c.wk), 32, 1)
    elif label == "3'":
        m[2, 0] = c.term(-c.r1(c.w2k), 31, 1)
    elif label == "3''":
        m[0, 2] = c.term(c.r1(c.inv_w2), 31, -1)
    elif label == "4'":
        m[0, 1] = c.term(-c.r2(c.inv), 21, -1)
    elif label == "4''":
        m[1, 0] = c.term(c.r2(c.k), 21, 1)
    elif label == "5'":
        m[1, 2] = c.term(-c.r1(c.wk), 32, -1)
    elif label == "5''":
        m[2, 1] = c.term(c.r1(c.inv_w), 32, 1)
    elif label == "6'":
        m[2, 0] = c.term(-c.r2(c.inv_w2), 31, 1)
    elif label == "6''":
        m[0, 2] = c.term(c.r2(c.w2k), 31, -1)
    return m


def _v7(c: _Context) -> np.ndarray:
    k, wk, w2k = c.k, c.wk, c.w2k
    return _mat(
        [
            [1.0, c.term(-c.r1(k), 21, -1), c.term(c.r2(w2k), 31, -1)],
            [
                c.term(-c.r2(k), 21, 1),
                1.0 + c.rr(k),
                c.term(c.r2(c.inv_w) - c.r2(k) * c.r2(w2k), 32, -1),
            ],
            [
                c.term(c.r1(w2k), 31, 1),
                c.term(c.r1(c.inv_w) - c.r1(k) * c.r1(w2k), 32, 1),
                c.f(w2k),
            ],
        ]
    )


def _v8(c: _Context) -> np.ndarray:
    k, wk = c.k, c.wk
    return _mat(
        [
            [c.f(k), c.term(c.r1(k), 21, -1), c.term(c.r1(c.inv_w2) - c.r1(k) * c.r1(wk), 31, -1)],
            [c.term(c.r2(k), 21, 1), 1.0, c.term(-c.r1(wk), 32, -1)],
            [
                c.term(c.r2(c.inv_w2) - c.r2(wk) * c.r2(k), 31, 1),
                c.term(-c.r2(wk), 32, 1),
                1.0 + c.rr(wk),
            ],
        ]
    )


def _v9(c: _Context) -> np.ndarray:
    wk, w2k = c.wk, c.w2k
    return _mat(
        [
            [
                1.0 + c.rr(w2k),
                c.term(c.r2(c.inv) - c.r2(wk) * c.r2(w2k), 21, -1),
                c.term(-c.r2(w2k), 31, -1),
            ],
            [c.term(c.r1(c.inv) - c.r1(wk) * c.r1(w2k), 21, 1), c.f(wk), c.term(c.r1(wk), 32, -1)],
            [c.term(-c.r1(w2k), 31, 1), c.term(c.r2(wk), 32, 1), 1.0],
        ]
    )


# --- lens factorization coefficients (exact mode: analytic parts are the functions themselves) ---


def c_coefficients(c: _Context) -> dict[str, complex]:
    one = 1.0 + c.rr(c.w2k)
    return {
        "c12": -c.r2(c.inv),
        "c13": c.r2(c.w2k) / one,
        "c23": c.r2(c.inv_w),
        "c21": -c.r1(c.inv),
        "c31": c.r1(c.w2k) / one,
        "c32": c.r1(c.inv_w),
    }


def a_coefficients(c: _Context) -> dict[str, complex]:
    k = c.k
    one = 1.0 + c.rr(k)
    fk = c.f(k)
    return {
        "a12": -c.r1(k) / one,
        "a13": -c.r1(c.inv_w2) / fk,
        "a23": (c.r2(c.inv_w) - c.r2(k) * c.r2(c.w2k)) / one,
        "a21": -c.r2(k) / one,
        "a31": -c.r2(c.inv_w2) / fk,
        "a32": (c.r1(c.inv_w) - c.r1(k) * c.r1(c.w2k)) / one,
    }


def b_coefficients(c: _Context) -> dict[str, complex]:
    k = c.k
    fk = c.f(k)
    f2 = c.f(c.w2k)
    return {
        "b12": -(c.r1(k) - c.r1(c.inv_w) * c.r1(c.inv_w2)) / fk,
        "b13": c.r2(c.w2k) / f2,
        "b23": (c.r2(c.inv_w) - c.r2(k) * c.r2(c.w2k)) / f2,
        "b21": -(c.r2(k) - c.r2(c.inv_w) * c.r2(c.inv_w2)) / fk,
        "b31": c.r1(c.w2k) / f2,
        "b32": (c.r1(c.inv_w) - c.r1(k) * c.r1(c.w2k)) / f2,
    }


def _upper_lens(c: _Context, q: dict[str, complex], p: str) -> np.ndarray:
    return _mat(
        [
            [1.0, c.term(q[f"{p}12"], 21, -1), c.term(q[f"{p}13"], 31, -1)],
            [0.0, 1.0, 0.0],
            [0.0, c.term(q[f"{p}32"], 32, 1), 1.0],
        ]
    )


def _lower_lens(c: _Context, q: dict[str, complex], p: str) -> np.ndarray:
    return _mat(
        [
            [1.0, 0.0, 0.0],
            [c.term(q[f"{p}21"], 21, 1), 1.0, c.term(q[f"{p}23"], 32, -1)],
            [c.term(q[f"{p}31"], 31, 1), 0.0, 1.0],
        ]
    )


def _factor(label: str, c: _Context) -> np.ndarray:
    k, wk, w2k = c.k, c.wk, c.w2k
    if label == "v1^(1)":
        return _mat(
            [
                [1.0, c.term(c.r2(c.inv), 21, -1), 0.0],
                [0.0, 1.0, 0.0],
                [c.term(-c.r1(w2k), 31, 1), c.term(c.r2(wk), 32, 1), 1.0],
            ]
        )
    if label == "v2^(1)":
        return np.eye(3, dtype=complex)
    if label == "v3^(1)":
        return _mat(
            [
                [1.0, 0.0, c.term(-c.r2(w2k), 31, -1)],
                [c.term(c.r1(c.inv), 21, 1), 1.0, c.term(c.r1(wk), 32, -1)],
                [0.0, 0.0, 1.0],
            ]
        )
    if label == "v4^(1)":
        return _upper_lens(c, c_coefficients(c), "c")
    if label == "v5^(1)":
        one = 1.0 + c.rr(w2k)
        return np.diag([1.0 / one, 1.0, one]).astype(complex)
    if label == "v6^(1)":
        return _lower_lens(c, c_coefficients(c), "c")
    if label == "v7^(1)":
        return _upper_lens(c, a_coefficients(c), "a")
    if label == "v8^(1)":
        fk, one = c.f(k), 1.0 + c.rr(k)
        return np.diag([1.0 / fk, one, fk / one]).astype(complex)
    if label == "v9^(1)":
        return _lower_lens(c, a_coefficients(c), "a")
    if label == "v10^(1)":
        b = b_coefficients(c)
        return _mat(
            [
                [1.0, c.term(b["b12"], 21, -1), c.term(b["b13"], 31, -1)],
                [0.0, 1.0, c.term(b["b23"], 32, -1)],
                [0.0, 0.0, 1.0],
            ]
        )
    if label == "v11^(1)":
        fk, f2 = c.f(k), c.f(w2k)
        return np.diag([1.0 / fk, fk / f2, f2]).astype(complex)
    if label == "v12^(1)":
        b = b_coefficients(c)
        return _mat(
            [
                [1.0, 0.0, 0.0],
                [c.term(b["b21"], 21, 1), 1.0, 0.0],
                [c.term(b["b31"], 31, 1), c.term(b["b32"], 32, 1), 1.0],
            ]
        )
    raise RegionMismatch(f"unknown factor label {label!r}")


_CIRCLE_TEMPLATES: dict[str, Callable[[_Context], np.ndarray]] = {"7": _v7, "8": _v8, "9": _v9}


def jump(region: str, x: float, t: float, k: complex, spectral: SpectralData) -> JumpMatrix:
    """Jump matrix of the given template at k.

    Raises:
        RegionMismatch: when k is not on the labelled subcontour.
        PoleError: when a template touches r2 at +-omega^2 or divides by a vanishing f.
    """
    k = complex(k)
    zeta = x / t
    _check_region(region, k, zeta)
    ctx = _Context(x, t, k, spectral)
    if region in _CIRCLE_TEMPLATES:
        m = _CIRCLE_TEMPLATES[region](ctx)
    elif region in FACTOR_LABELS:
        _check_exclusion(k)
        m = _factor(region, ctx)
    else:
        m = _v_ray(region, ctx)
    return JumpMatrix(region=region, x=x, t=t, k=k, m=m)


def jump_at(x: float, t: float, k: complex, spectral: SpectralData) -> np.ndarray:
    """v(x, t, k) using the label found by classify."""
    return jump(classify(k), x, t, k, spectral).m


def verify_v_symmetry(x: float, t: float, k: complex, spectral: SpectralData) -> tuple[float, float]:
    """Frobenius residuals of v(k) = A v(omega k) A^{-1} and v(k) = B v(1/k)^{-1} B."""
    k = complex(k)
    v = jump_at(x, t, k, spectral)
    rotated = A_CAL @ jump_at(x, t, OMEGA * k, spectral) @ np.linalg.inv(A_CAL)
    inverted = B_CAL @ np.linalg.inv(jump_at(x, t, 1.0 / k, spectral)) @ B_CAL
    return float(np.linalg.norm(v - rotated)), float(np.linalg.norm(v - inverted))


# --- coefficient extraction from an assembled matrix ---


def _extract_upper_diag_lower(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """m = T D S with T = [[1,*,*],[0,1,0],[0,*,1]], S = [[1,0,0],[*,1,*],[*,0,1]]."""
    d2 = m[1, 1]
    q21, q23 = m[1, 0] / d2, m[1, 2] / d2
    p12, p32 = m[0, 1] / d2, m[2, 1] / d2
    d3 = m[2, 2] - p32 * d2 * q23
    q31 = (m[2, 0] - p32 * d2 * q21) / d3
    p13 = (m[0, 2] - p12 * d2 * q23) / d3
    d1 = m[0, 0] - p12 * d2 * q21 - p13 * d3 * q31
    T = _mat([[1.0, p12, p13], [0.0, 1.0, 0.0], [0.0, p32, 1.0]])
    S = _mat([[1.0, 0.0, 0.0], [q21, 1.0, q23], [q31, 0.0, 1.0]])
    return T, np.diag([d1, d2, d3]), S


def _extract_udl(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """m = U D L with U upper and L lower unitriangular."""
    d3 = m[2, 2]
    l31, l32 = m[2, 0] / d3, m[2, 1] / d3
    u23, u13 = m[1, 2] / d3, m[0, 2] / d3
    d2 = m[1, 1] - u23 * d3 * l32
    l21 = (m[1, 0] - u23 * d3 * l31) / d2
    u12 = (m[0, 1] - u13 * d3 * l32) / d2
    d1 = m[0, 0] - u12 * d2 * l21 - u13 * d3 * l31
    U = _mat([[1.0, u12, u13], [0.0, 1.0, u23], [0.0, 0.0, 1.0]])
    L = _mat([[1.0, 0.0, 0.0], [l21, 1.0, 0.0], [l31, l32, 1.0]])
    return U, np.diag([d1, d2, d3]), L


def _extract_123(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """m = X Y with X = [[1,0,*],[*,1,*],[0,0,1]], Y = [[1,*,0],[0,1,0],[*,*,1]]."""
    y31, y32, x13, x23 = m[2, 0], m[2, 1], m[0, 2], m[1, 2]
    y12 = m[0, 1] - x13 * y32
    x21 = m[1, 0] - x23 * y31
    X = _mat([[1.0, 0.0, x13], [x21, 1.0, x23], [0.0, 0.0, 1.0]])
    Y = _mat([[1.0, y12, 0.0], [0.0, 1.0, 0.0], [y31, y32, 1.0]])
    return X, np.eye(3, dtype=complex), Y


@dataclass(frozen=True)
class FactorizationResidual:
    group: str
    k: complex
    product_residual: float
    coefficient_residual: float
    tolerance: float = TOL_FACTORIZATION
    coefficient_tolerance: float = TOL_COEFFICIENT

    @property
    def passed(self) -> bool:
        return self.product_residual < self.tolerance and self.coefficient_residual < self.coefficient_tolerance


def factorization_group(k: complex, zeta: float) -> Optional[str]:
    arg = math.atan2(complex(k).imag, complex(k).real)
    for group, (lo, hi) in lens_arcs(zeta).items():
        if lo < arg < hi:
            return group
    return None


def verify_factorizations(x: float, t: float, k: complex, spectral: SpectralData) -> dict[str, FactorizationResidual]:
    """Residual of the lens factorization used on the arc through k (exact spectral mode).

    Each factor is also recovered from the target matrix by elimination and
    compared entrywise with its defining formula.

    Raises:
        PoleError: when k is within the exclusion radius of a sixth root of unity.
        RegionMismatch: when k is not on one of the four lens arcs.
    """
    k = complex(k)
    _check_exclusion(k)
    zeta = x / t
    group = factorization_group(k, zeta) if abs(abs(k) - 1.0) <= UNIT_CIRCLE_RTOL else None
    if group is None:
        raise RegionMismatch(f"k = {k} is not on a lens arc for zeta = {zeta}")
    labels, target = FACTORIZATIONS[group]
    ctx = _Context(x, t, k, spectral)
    m = _v9(ctx) if target.startswith("9") else _v7(ctx)
    if target == "9inv":
        m = np.linalg.inv(m)
    factors = [_factor(label, ctx) for label in labels]
    product = factors[0] @ factors[1] @ factors[2]
    if group == "123":
        extracted = _extract_123(m)
    elif group == "101112":
        extracted = _extract_udl(m)
    else:
        extracted = _extract_upper_diag_lower(m)
    coeff = max(float(np.max(np.abs(e - f))) for e, f in zip(extracted, factors))
    result = FactorizationResidual(group, k, float(np.linalg.norm(m - product)), coeff)
    if not result.passed:
        logger.debug("Factorization %s fails at k = %s: %.3e / %.3e", group, k, result.product_residual, coeff)
    return {group: result}


def v1s_residual(x: float, t: float, k: complex, spectral: SpectralData) -> float:
    """|| v10(k)^{-1} A B v12(1/(omega k))^{-1} B A^{-1} - I || for k on the arc of v10 .. v12.

    In exact mode the product collapses to the identity; reported, never enforced.
    """
    k = complex(k)
    _check_exclusion(k)
    v10 = _factor("v10^(1)", _Context(x, t, k, spectral))
    v12 = _factor("v12^(1)", _Context(x, t, 1.0 / (OMEGA * k), spectral))
    v1s = np.linalg.inv(v10) @ A_CAL @ B_CAL @ np.linalg.inv(v12) @ B_CAL @ np.linalg.inv(A_CAL)
    return float(np.linalg.norm(v1s - np.eye(3)))
