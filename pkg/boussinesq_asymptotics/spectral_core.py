"""Closed-form kinematics: l_j, z_j, phase functions, saddle points, r-tilde and branch logarithms."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from boussinesq_asymptotics.config import (
    BRANCH_CUT_TOL,
    K_ZERO_TOL,
    POLE_TOL,
    SADDLE_PROXIMITY_WARN,
    UNIT_CIRCLE_RTOL,
    ZETA_MAX,
)
from boussinesq_asymptotics.errors import BranchCutError, DomainError, PoleError

logger = logging.getLogger(__name__)

ComplexLike = Union[complex, np.ndarray]

SQRT3: float = math.sqrt(3.0)
OMEGA: complex = complex(-0.5, SQRT3 / 2.0)
OMEGA2: complex = OMEGA.conjugate()
TWO_PI: float = 2.0 * math.pi
PHASE_PAIRS: tuple[int, ...] = (21, 31, 32)

_ROOTS: dict[int, complex] = {1: OMEGA, 2: OMEGA2, 3: 1.0 + 0.0j}

BranchKind = Literal["principal", "ln_0", "ln_s", "ln_tilde_s"]


def sixth_roots() -> np.ndarray:
    """Return kappa_j = exp(i pi (j - 1) / 3), j = 1..6."""
    return np.exp(1j * np.pi * np.arange(6) / 3.0)


def omega_power(j: int) -> complex:
    """Exact omega**j for integer j."""
    j = j % 3
    return _ROOTS[3] if j == 0 else _ROOTS[j]


def _as_k(k: ComplexLike) -> np.ndarray:
    arr = np.asarray(k, dtype=complex)
    if np.any(np.abs(arr) < K_ZERO_TOL):
        raise DomainError("k = 0 is outside the domain")
    return arr


def _check_index(j: int) -> None:
    if j not in _ROOTS:
        raise DomainError(f"index must be 1, 2 or 3, got {j}")


def l_func(j: int, k: ComplexLike) -> ComplexLike:
    """l_j(k) = i (w + 1/w) / (2 sqrt 3) with w = omega**j k."""
    _check_index(j)
    wk = _ROOTS[j] * _as_k(k)
    return 1j * (wk + 1.0 / wk) / (2.0 * SQRT3)


def z_func(j: int, k: ComplexLike) -> ComplexLike:
    """z_j(k) = i (w**2 + w**-2) / (4 sqrt 3) with w = omega**j k."""
    _check_index(j)
    wk = _ROOTS[j] * _as_k(k)
    return 1j * (wk**2 + wk**-2) / (4.0 * SQRT3)


def _l_prime(j: int, k: np.ndarray) -> np.ndarray:
    w = _ROOTS[j]
    return 1j * (w - 1.0 / (w * k**2)) / (2.0 * SQRT3)


def _z_prime(j: int, k: np.ndarray) -> np.ndarray:
    w = _ROOTS[j]
    return 1j * (2.0 * w**2 * k - 2.0 / (w**2 * k**3)) / (4.0 * SQRT3)


def _l_second(j: int, k: np.ndarray) -> np.ndarray:
    w = _ROOTS[j]
    return 1j * (2.0 / (w * k**3)) / (2.0 * SQRT3)


def _z_second(j: int, k: np.ndarray) -> np.ndarray:
    w = _ROOTS[j]
    return 1j * (2.0 * w**2 + 6.0 / (w**2 * k**4)) / (4.0 * SQRT3)


def split_pair(pair: int) -> tuple[int, int]:
    """Map a PhaseId (21, 31 or 32) to its index pair."""
    if pair not in PHASE_PAIRS:
        raise DomainError(f"phase pair must be one of {PHASE_PAIRS}, got {pair}")
    return divmod(pair, 10)


def phi(pair: int, zeta: float, k: ComplexLike) -> ComplexLike:
    """Phi_ij(zeta, k) = (l_i - l_j) zeta + (z_i - z_j)."""
    i, j = split_pair(pair)
    return (l_func(i, k) - l_func(j, k)) * zeta + (z_func(i, k) - z_func(j, k))


def theta(pair: int, x: float, t: float, k: ComplexLike) -> ComplexLike:
    """theta_ij(x, t, k) = t Phi_ij(x / t, k)."""
    if t <= 0:
        raise DomainError(f"t must be positive, got {t}")
    return t * phi(pair, x / t, k)


def dphi_dk(pair: int, zeta: float, k: ComplexLike) -> ComplexLike:
    """Analytic k-derivative of Phi_ij."""
    i, j = split_pair(pair)
    arr = _as_k(k)
    return (_l_prime(i, arr) - _l_prime(j, arr)) * zeta + (_z_prime(i, arr) - _z_prime(j, arr))


def d2phi_dk2(pair: int, zeta: float, k: ComplexLike) -> ComplexLike:
    i, j = split_pair(pair)
    arr = _as_k(k)
    return (_l_second(i, arr) - _l_second(j, arr)) * zeta + (_z_second(i, arr) - _z_second(j, arr))


def re_phi_sign(pair: int, zeta: float, k: ComplexLike) -> np.ndarray:
    """Pointwise sign of Re Phi_ij (signature-table sample)."""
    return np.sign(np.real(phi(pair, zeta, k)))


@dataclass(frozen=True)
class SaddleSet:
    """The four saddle points of Phi_21 at a given zeta."""

    zeta: float
    k1: complex
    k2: complex
    k3: complex
    k4: complex

    @property
    def points(self) -> tuple[complex, complex, complex, complex]:
        return (self.k1, self.k2, self.k3, self.k4)

    @property
    def omega_k4(self) -> complex:
        return OMEGA * self.k4

    @property
    def omega2_k2(self) -> complex:
        return OMEGA2 * self.k2

    @property
    def omega_k2(self) -> complex:
        return OMEGA * self.k2

    @property
    def inv_k2(self) -> complex:
        return 1.0 / self.k2

    def rotated(self, power: int) -> tuple[complex, ...]:
        """Saddles multiplied by omega**power (stationary for Phi_31 / Phi_32)."""
        w = omega_power(power)
        return tuple(w * kj for kj in self.points)


def check_zeta(zeta: float) -> None:
    if not 0.0 < zeta < ZETA_MAX:
        raise DomainError(f"zeta must lie in (0, 1/sqrt(3)), got {zeta}")


def saddle_points(zeta: float) -> SaddleSet:
    """Closed-form saddle points of k -> Phi_21(zeta, k) for 0 < zeta < 1/sqrt(3).

    k2 and k4 are re-normalized to modulus one; k1 = conj(k2), k3 = conj(k4).
    """
    check_zeta(zeta)
    if zeta < SADDLE_PROXIMITY_WARN or zeta > ZETA_MAX - SADDLE_PROXIMITY_WARN:
        logger.warning("zeta = %.6g is close to the sector boundary; saddles approach kappa points", zeta)

    root = math.sqrt(8.0 + zeta**2)
    k2 = complex(zeta - root, -math.sqrt(2.0) * math.sqrt(4.0 - zeta**2 + zeta * root)) / 4.0
    k4 = complex(zeta + root, -math.sqrt(2.0) * math.sqrt(4.0 - zeta**2 - zeta * root)) / 4.0
    for name, kj in (("k2", k2), ("k4", k4)):
        if abs(abs(kj) - 1.0) > UNIT_CIRCLE_RTOL:
            raise DomainError(f"saddle {name} left the unit circle: |{name}| = {abs(kj)!r}")
    k2 /= abs(k2)
    k4 /= abs(k4)
    return SaddleSet(zeta=zeta, k1=k2.conjugate(), k2=k2, k3=k4.conjugate(), k4=k4)


def polish_saddle(zeta: float, k0: complex, pair: int = 21, steps: int = 2) -> tuple[complex, float]:
    """Newton-polish a saddle point; returns the polished point and the total correction."""
    k = complex(k0)
    moved = 0.0
    for _ in range(steps):
        step = complex(dphi_dk(pair, zeta, k) / d2phi_dk2(pair, zeta, k))
        k -= step
        moved += abs(step)
    return k, moved


def r_tilde(k: ComplexLike) -> ComplexLike:
    """r~(k) = (omega^2 - k^2) / (1 - omega^2 k^2); poles at +-omega^2."""
    arr = np.asarray(k, dtype=complex)
    den = 1.0 - OMEGA2 * arr**2
    if np.any(np.abs(den) < POLE_TOL):
        raise PoleError("r~ evaluated at a pole (+-omega^2)")
    return (OMEGA2 - arr**2) / den


def on_unit_circle(k: ComplexLike, rtol: float = UNIT_CIRCLE_RTOL) -> np.ndarray:
    return np.abs(np.abs(np.asarray(k, dtype=complex)) - 1.0) <= rtol


# --- geometry helpers ---


def distance_to_arc(k: ComplexLike, theta_a: float, theta_b: float) -> np.ndarray:
    """Distance from k to the counterclockwise arc {e^{i phi}: theta_a <= phi <= theta_b}."""
    arr = np.asarray(k, dtype=complex)
    span = theta_b - theta_a
    rel = np.mod(np.angle(arr) - theta_a, TWO_PI)
    inside = (rel <= span) & (np.abs(arr) > 0)
    radial = np.abs(np.abs(arr) - 1.0)
    ends = np.minimum(np.abs(arr - np.exp(1j * theta_a)), np.abs(arr - np.exp(1j * theta_b)))
    return np.where(inside, radial, ends)


def distance_to_ray(k: ComplexLike, origin: complex, direction: complex) -> np.ndarray:
    """Distance from k to the half-line origin + s * direction, s >= 0."""
    arr = np.asarray(k, dtype=complex)
    u = direction / abs(direction)
    rel = (arr - origin) * np.conj(u)
    return np.where(rel.real <= 0.0, np.abs(arr - origin), np.abs(rel.imag))


def distance_to_segment(k: ComplexLike, a: complex, b: complex) -> np.ndarray:
    arr = np.asarray(k, dtype=complex)
    length = abs(b - a)
    u = (b - a) / length
    rel = (arr - a) * np.conj(u)
    along = np.clip(rel.real, 0.0, length)
    return np.abs(rel - along)


def _arg_with_cut(w: np.ndarray, cut_angle: float) -> np.ndarray:
    """arg w taking values in (cut_angle, cut_angle + 2 pi]."""
    return cut_angle + np.mod(np.angle(w) - cut_angle, TWO_PI)


# --- branch logarithms ---


@dataclass(frozen=True)
class BranchLog:
    """A branch of k -> ln(k - s) described by its cut and normalization.

    ln_s       cut along the arc between s and i plus (i, i inf); arg = 2 pi at k - s = 1
    ln_tilde_s cut along the arc from s to -1 plus (-inf, 0); arg = 0 at k - s = 1
    ln_0       arg in (0, 2 pi), cut along k - s > 0
    principal  arg in (-pi, pi]
    """

    kind: BranchKind
    s: complex = 0.0j

    def __post_init__(self) -> None:
        if self.kind not in ("principal", "ln_0", "ln_s", "ln_tilde_s"):
            raise DomainError(f"unknown branch kind {self.kind!r}")
        if self.kind in ("ln_s", "ln_tilde_s"):
            if abs(abs(self.s) - 1.0) > UNIT_CIRCLE_RTOL:
                raise DomainError(f"{self.kind} needs s on the unit circle, got {self.s}")
            lo = math.pi / 3.0 if self.kind == "ln_s" else math.pi / 2.0
            arg = math.atan2(self.s.imag, self.s.real)
            if not lo - 1e-9 <= arg <= 2.0 * math.pi / 3.0 + 1e-9:
                raise DomainError(f"{self.kind} branch point arg {arg:.6f} outside [{lo:.6f}, 2pi/3]")

    @property
    def normalization_point(self) -> complex:
        return self.s + 1.0

    @property
    def normalization_arg(self) -> float:
        return TWO_PI if self.kind == "ln_s" else 0.0

    def _arc(self) -> tuple[float, float]:
        arg = math.atan2(self.s.imag, self.s.real)
        if self.kind == "ln_s":
            return (min(arg, math.pi / 2.0), max(arg, math.pi / 2.0))
        return (arg, math.pi)

    def cut_distance(self, k: ComplexLike) -> np.ndarray:
        arr = np.asarray(k, dtype=complex)
        if self.kind == "principal":
            return distance_to_ray(arr, self.s, -1.0)
        if self.kind == "ln_0":
            return distance_to_ray(arr, self.s, 1.0)
        theta_a, theta_b = self._arc()
        arc = distance_to_arc(arr, theta_a, theta_b)
        if self.kind == "ln_s":
            return np.minimum(arc, distance_to_ray(arr, 1j, 1j))
        return np.minimum(arc, distance_to_ray(arr, 0.0, -1.0))

    def _raw_arg(self, k: np.ndarray) -> np.ndarray:
        if self.kind == "ln_s":
            anchor, anchor_cut = 1j, math.pi / 2.0
        else:
            anchor, anchor_cut = -1.0 + 0.0j, -math.pi
        arg = _arg_with_cut(k - anchor, anchor_cut)
        if abs(self.s - anchor) < 1e-14:
            return arg
        theta_a, theta_b = self._arc()
        mid = np.exp(0.5j * (theta_a + theta_b))
        cut = float(np.angle((mid - self.s) / (mid - anchor)))
        return arg + _arg_with_cut((k - self.s) / (k - anchor), cut)

    def __call__(self, k: ComplexLike) -> ComplexLike:
        arr = np.asarray(k, dtype=complex)
        if np.any(self.cut_distance(arr) < BRANCH_CUT_TOL * np.maximum(1.0, np.abs(arr))):
            raise BranchCutError(f"{self.kind}(k - {self.s}) evaluated on its cut")
        return self.value(arr)

    def value(self, k: ComplexLike) -> ComplexLike:
        """Branch value without the cut check (for quadrature nodes next to the branch point)."""
        arr = np.asarray(k, dtype=complex)
        w = arr - self.s
        if self.kind == "principal":
            return np.log(w)
        if self.kind == "ln_0":
            return np.log(np.abs(w)) + 1j * _arg_with_cut(w, 0.0)
        k0 = np.asarray(self.normalization_point)
        shift = TWO_PI * np.round((self.normalization_arg - self._raw_arg(k0)) / TWO_PI)
        return np.log(np.abs(w)) + 1j * (self._raw_arg(arr) + shift)


def branch_log(branch: BranchKind | BranchLog, s: complex, k: ComplexLike) -> ComplexLike:
    """Evaluate ln(k - s) on the declared branch."""
    if isinstance(branch, BranchLog):
        return branch(k)
    return BranchLog(branch, complex(s))(k)
