"""Spectral data r1, r2 on their contours: synthetic admissible families and tabulated data."""

from __future__ import annotations

import logging
import math
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from boussinesq_asymptotics.config import (
    PERTURBATION_WIDTH_DEG,
    PHASE_SLOPE,
    PHASE_WIGGLE,
    POLE_TOL,
    QHAT_EXCLUSION,
    RAY_BUMP_AMPLITUDE,
    RAY_BUMP_RATE,
    RAY_K_MAX,
    SINGLE_LOBE_AMPLITUDE,
    SINGLE_LOBE_HALF_WIDTH_DEG,
    TWO_LOBE_AMPLITUDES,
    TWO_LOBE_SUPPORT_DEG,
    UNIT_CIRCLE_RTOL,
)
from boussinesq_asymptotics.errors import AdmissibilityError, DomainError, PoleError, RegionMismatch
from boussinesq_asymptotics.spectral_core import OMEGA2, ComplexLike, r_tilde

logger = logging.getLogger(__name__)

MODES: tuple[str, ...] = ("from_initial_data", "user_supplied")
FAMILIES: tuple[str, ...] = ("zero", "single_lobe", "two_lobe")

# Angles (degrees) where r~ vanishes or blows up on the unit circle.
_R_TILDE_SINGULAR_DEG: tuple[float, ...] = (60.0, 120.0, 240.0, 300.0)


def _on_axis(k: np.ndarray) -> np.ndarray:
    return np.abs(k.real) <= UNIT_CIRCLE_RTOL * np.maximum(1.0, np.abs(k))


class SpectralData:
    """Evaluators for r1 (on the circle, (0, i) and (-i, -i inf)) and r2 (circle, (-i, 0), (i, i inf)).

    Subclasses provide the circle and ray values; the base class dispatches
    points to their contour piece and derives f, 1 + r1 r2 and r-hat.
    """

    def __init__(self, mode: str, label: str) -> None:
        if mode not in MODES:
            raise DomainError(f"unknown spectral mode {mode!r}")
        self.mode = mode
        self.label = label

    # hooks
    def _r1_circle(self, theta: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _r1_ray(self, rho: np.ndarray) -> np.ndarray:
        """r1(-i rho) for rho > 1."""
        raise NotImplementedError

    def _r2_circle(self, theta: np.ndarray) -> np.ndarray:
        a = self._r1_circle(theta)
        out = np.zeros_like(a)
        nz = a != 0
        if np.any(nz):
            out[nz] = r_tilde(np.exp(1j * theta[nz])) * np.conj(a[nz])
        return out

    def _r2_segment(self, sigma: np.ndarray) -> np.ndarray:
        """r2(-i sigma) for 0 < sigma < 1, from the k-bar symmetry."""
        return r_tilde(-1j * sigma) * np.conj(self._r1_ray(1.0 / sigma))

    def r1(self, k: ComplexLike) -> ComplexLike:
        arr = np.asarray(k, dtype=complex)
        flat = arr.ravel()
        out = np.zeros(flat.shape, dtype=complex)
        circle = np.abs(np.abs(flat) - 1.0) <= UNIT_CIRCLE_RTOL
        axis = _on_axis(flat) & ~circle
        ray = axis & (flat.imag < -1.0)
        segment = axis & (flat.imag > 0.0) & (flat.imag < 1.0)
        unresolved = ~(circle | ray | segment)
        if np.any(unresolved):
            raise RegionMismatch(f"r1 is not defined at {flat[unresolved][0]}")
        if np.any(circle):
            out[circle] = self._r1_circle(np.angle(flat[circle]))
        if np.any(ray):
            out[ray] = self._r1_ray(-flat[ray].imag)
        return out.reshape(arr.shape)[()]

    def r2(self, k: ComplexLike) -> ComplexLike:
        arr = np.asarray(k, dtype=complex)
        flat = arr.ravel()
        if np.any(np.minimum(np.abs(flat - OMEGA2), np.abs(flat + OMEGA2)) < POLE_TOL):
            raise PoleError("r2 evaluated at its pole +-omega^2")
        out = np.zeros(flat.shape, dtype=complex)
        circle = np.abs(np.abs(flat) - 1.0) <= UNIT_CIRCLE_RTOL
        axis = _on_axis(flat) & ~circle
        segment = axis & (flat.imag < 0.0) & (flat.imag > -1.0)
        ray = axis & (flat.imag > 1.0)
        unresolved = ~(circle | ray | segment)
        if np.any(unresolved):
            raise RegionMismatch(f"r2 is not defined at {flat[unresolved][0]}")
        if np.any(circle):
            out[circle] = self._r2_circle(np.angle(flat[circle]))
        if np.any(segment):
            out[segment] = self._r2_segment(-flat[segment].imag)
        return out.reshape(arr.shape)[()]

    def r1r2(self, k: ComplexLike) -> ComplexLike:
        """Product r1 r2 on the unit circle."""
        return self.r1(k) * self.r2(k)

    def one_plus_r1r2(self, k: ComplexLike) -> ComplexLike:
        return 1.0 + self.r1r2(k)

    def f(self, k: ComplexLike) -> ComplexLike:
        """f(k) = 1 + r1 r2(k) + r1 r2(1 / (omega^2 k)) on the unit circle."""
        arr = np.asarray(k, dtype=complex)
        return 1.0 + self.r1r2(arr) + self.r1r2(1.0 / (OMEGA2 * arr))

    def r_hat1(self, k: ComplexLike) -> ComplexLike:
        return self.r1(k) / self.one_plus_r1r2(k)

    def r_hat2(self, k: ComplexLike) -> ComplexLike:
        return self.r2(k) / self.one_plus_r1r2(k)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(mode={self.mode!r}, label={self.label!r})"


class ZeroSpectralData(SpectralData):
    """r1 = r2 = 0 everywhere."""

    def __init__(self) -> None:
        super().__init__("user_supplied", "zero")

    def _r1_circle(self, theta: np.ndarray) -> np.ndarray:
        return np.zeros(theta.shape, dtype=complex)

    def _r1_ray(self, rho: np.ndarray) -> np.ndarray:
        return np.zeros(rho.shape, dtype=complex)


def _interval_pieces(lo: float, hi: float) -> list[tuple[float, float]]:
    """Split a degree interval into pieces inside [0, 360)."""
    lo_n = lo % 360.0
    hi_n = lo_n + (hi - lo)
    if hi_n <= 360.0:
        return [(lo_n, hi_n)]
    return [(lo_n, 360.0), (0.0, hi_n - 360.0)]


def full_support(upper_lobes: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    """Conjugation-symmetric closure of the upper-half lobes, merged across theta = 0."""
    support: list[tuple[float, float]] = []
    for lo, hi in upper_lobes:
        if lo == 0.0:
            support.append((-hi, hi))
        else:
            support.extend([(lo, hi), (-hi, -lo)])
    return support


def validate_support(upper_lobes: Sequence[tuple[float, float]], amplitudes: Sequence[float]) -> None:
    """Check that a decoupled family built on these lobes satisfies both circle symmetries.

    Raises:
        AdmissibilityError: on overlapping rotated supports, singular r~ angles,
            the point i inside the support or amplitudes outside [0, 1].
    """
    if len(upper_lobes) != len(amplitudes):
        raise AdmissibilityError("one amplitude per lobe is required")
    for (lo, hi), amp in zip(upper_lobes, amplitudes):
        if not 0.0 <= lo < hi <= 180.0:
            raise AdmissibilityError(f"lobe ({lo}, {hi}) must satisfy 0 <= lo < hi <= 180")
        if not 0.0 <= amp <= 1.0:
            raise AdmissibilityError(f"lobe amplitude {amp} outside [0, 1]")
        if amp == 1.0 and lo != 0.0:
            raise AdmissibilityError("amplitude 1 is only allowed for the lobe centred at k = 1")
        if lo < 90.0 < hi:
            raise AdmissibilityError("support must not contain k = i (r1 vanishes on [0, i])")

    pieces = [p for lo, hi in full_support(upper_lobes) for p in _interval_pieces(lo, hi)]
    for lo, hi in pieces:
        for bad in _R_TILDE_SINGULAR_DEG:
            if lo <= bad <= hi:
                raise AdmissibilityError(f"support piece ({lo}, {hi}) contains singular angle {bad}")
    rotated = [p for lo, hi in pieces for p in _interval_pieces(lo + 120.0, hi + 120.0)]
    for lo1, hi1 in pieces:
        for lo2, hi2 in rotated:
            if max(lo1, lo2) < min(hi1, hi2):
                raise AdmissibilityError(
                    f"support piece ({lo1}, {hi1}) meets its 120-degree rotation ({lo2}, {hi2})"
                )


def _bump(x: np.ndarray) -> np.ndarray:
    """C-infinity bump, 1 at x = 0, vanishing with all derivatives at |x| = 1."""
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
    return out


class DecoupledCircleData(SpectralData):
    """Synthetic admissible data r1(e^{i theta}) = b(theta) / sqrt|r~(e^{i theta})|.

    The support is conjugation-symmetric and disjoint from its 120-degree
    rotation, so the nonlinear term of the circle symmetry vanishes and
    1 + r1 r2 = 1 - |b|^2. On the lower half b(-theta) = -sign(r~) conj b(theta).
    """

    def __init__(
        self,
        upper_lobes: Sequence[tuple[float, float]],
        amplitudes: Sequence[float],
        label: str,
        phase_slope: float = PHASE_SLOPE,
        phase_wiggle: float = PHASE_WIGGLE,
        ray_amplitude: float = RAY_BUMP_AMPLITUDE,
        ray_rate: float = RAY_BUMP_RATE,
    ) -> None:
        super().__init__("user_supplied", label)
        validate_support(upper_lobes, amplitudes)
        self.upper_lobes = tuple((float(lo), float(hi)) for lo, hi in upper_lobes)
        self.amplitudes = tuple(float(a) for a in amplitudes)
        self.phase_slope = phase_slope
        self.phase_wiggle = phase_wiggle
        self.ray_amplitude = ray_amplitude
        self.ray_rate = ray_rate

    def _profile(self, theta: np.ndarray) -> np.ndarray:
        """b(theta) for theta in [0, pi]."""
        deg = np.degrees(theta)
        mod = np.zeros(theta.shape)
        for (lo, hi), amp in zip(self.upper_lobes, self.amplitudes):
            if lo == 0.0:
                mod += amp * _bump(deg / hi)
            else:
                mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
                mod += amp * _bump((deg - mid) / half)
        phase = self.phase_slope * theta + self.phase_wiggle * np.sin(theta)
        return mod * np.exp(1j * phase)

    def b(self, theta: ComplexLike) -> np.ndarray:
        th = np.angle(np.exp(1j * np.asarray(theta, dtype=float)))
        upper = self._profile(np.abs(th))
        sign = np.sign(self._rho(np.abs(th)))
        sign = np.where(np.isfinite(sign), sign, 1.0)
        return np.where(th >= 0.0, upper, -sign * np.conj(upper))

    @staticmethod
    def _rho(theta: np.ndarray) -> np.ndarray:
        k = np.exp(1j * theta)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.real((OMEGA2 - k**2) / (1.0 - OMEGA2 * k**2))

    def _r1_circle(self, theta: np.ndarray) -> np.ndarray:
        bval = self.b(theta)
        out = np.zeros(theta.shape, dtype=complex)
        nz = bval != 0
        out[nz] = bval[nz] / np.sqrt(np.abs(self._rho(theta[nz])))
        return out

    def _r2_circle(self, theta: np.ndarray) -> np.ndarray:
        bval = self.b(theta)
        out = np.zeros(theta.shape, dtype=complex)
        nz = bval != 0
        rho = self._rho(theta[nz])
        out[nz] = np.sign(rho) * np.sqrt(np.abs(rho)) * np.conj(bval[nz])
        return out

    def _r1_ray(self, rho: np.ndarray) -> np.ndarray:
        return (
            self.ray_amplitude
            * (1.0 - 1.0 / rho) ** 2
            * np.exp(-self.ray_rate * (rho - 1.0))
            * np.exp(0.25j * np.pi)
        )


class PerturbedSpectralData(SpectralData):
    """Wraps spectral data and adds a localized Gaussian defect to r1 or r2 on the circle."""

    def __init__(
        self,
        base: SpectralData,
        target: str,
        theta0: float,
        eps: float,
        width: float = math.radians(PERTURBATION_WIDTH_DEG),
    ) -> None:
        if target not in ("r1", "r2"):
            raise DomainError(f"target must be 'r1' or 'r2', got {target!r}")
        super().__init__(base.mode, f"{base.label}+{target}-defect")
        self.base = base
        self.target = target
        self.theta0 = theta0
        self.eps = eps
        self.width = width

    def _defect(self, theta: np.ndarray) -> np.ndarray:
        d = np.angle(np.exp(1j * (theta - self.theta0)))
        return self.eps * np.exp(-((d / self.width) ** 2))

    def _r1_circle(self, theta: np.ndarray) -> np.ndarray:
        out = self.base._r1_circle(theta)
        return out + self._defect(theta) if self.target == "r1" else out

    def _r2_circle(self, theta: np.ndarray) -> np.ndarray:
        out = self.base._r2_circle(theta)
        if self.target == "r1":
            # keep r2 tied to the unperturbed r1 so only the r1 relation breaks
            return out
        return out + self._defect(theta)

    def _r1_ray(self, rho: np.ndarray) -> np.ndarray:
        return self.base._r1_ray(rho)

    def _r2_segment(self, sigma: np.ndarray) -> np.ndarray:
        return self.base._r2_segment(sigma)


class TabulatedSpectralData(SpectralData):
    """Spectral data interpolated from tabulated values (the scattering cache).

    Circle values are splined in theta separately on the six arcs between
    consecutive sixth roots of unity; values inside the exclusion gap around a
    root are extrapolated from the nearer arc when smooth_across_gaps is set.
    """

    def __init__(
        self,
        circle_theta: np.ndarray,
        circle_r1: np.ndarray,
        circle_r2: np.ndarray,
        ray_rho: np.ndarray,
        ray_r1: np.ndarray,
        segment_sigma: np.ndarray,
        segment_r2: np.ndarray,
        label: str = "tabulated",
        smooth_across_gaps: bool = True,
    ) -> None:
        super().__init__("from_initial_data", label)
        self.smooth_across_gaps = smooth_across_gaps
        theta = np.mod(np.asarray(circle_theta, dtype=float), 2.0 * np.pi)
        arc_index = np.floor(theta / (np.pi / 3.0)).astype(int) % 6
        self._arcs: list[Optional[tuple[CubicSpline, CubicSpline]]] = []
        for j in range(6):
            sel = arc_index == j
            if np.count_nonzero(sel) < 4:
                self._arcs.append(None)
                continue
            order = np.argsort(theta[sel])
            th = theta[sel][order]
            self._arcs.append(
                (
                    CubicSpline(th, np.asarray(circle_r1)[sel][order]),
                    CubicSpline(th, np.asarray(circle_r2)[sel][order]),
                )
            )
        self._ray = self._spline_or_none(np.log(np.asarray(ray_rho, dtype=float)), ray_r1)
        self._ray_max = float(np.max(ray_rho)) if len(ray_rho) else RAY_K_MAX
        self._segment = self._spline_or_none(np.asarray(segment_sigma, dtype=float), segment_r2)
        self._segment_min = float(np.min(segment_sigma)) if len(segment_sigma) else 1.0

    @staticmethod
    def _spline_or_none(x: np.ndarray, y: Iterable[complex]) -> Optional[CubicSpline]:
        yarr = np.asarray(list(y), dtype=complex)
        if len(x) < 4:
            return None
        order = np.argsort(x)
        return CubicSpline(x[order], yarr[order])

    def _circle_eval(self, theta: np.ndarray, which: int) -> np.ndarray:
        th = np.mod(theta, 2.0 * np.pi)
        sector = th / (np.pi / 3.0)
        arc_index = np.floor(sector).astype(int) % 6
        frac = sector - np.floor(sector)
        near_root = np.minimum(frac, 1.0 - frac) * (np.pi / 3.0) < QHAT_EXCLUSION
        if np.any(near_root) and not self.smooth_across_gaps:
            raise RegionMismatch("tabulated data has no smoothness certificate across the root gap")
        out = np.zeros(th.shape, dtype=complex)
        for j in range(6):
            sel = arc_index == j
            if not np.any(sel):
                continue
            arc = self._arcs[j]
            if arc is None:
                raise RegionMismatch(f"no tabulated circle data on arc {j}")
            out[sel] = arc[which](th[sel])
        return out

    def _r1_circle(self, theta: np.ndarray) -> np.ndarray:
        return self._circle_eval(theta, 0)

    def _r2_circle(self, theta: np.ndarray) -> np.ndarray:
        return self._circle_eval(theta, 1)

    def _r1_ray(self, rho: np.ndarray) -> np.ndarray:
        if self._ray is None:
            return np.zeros(rho.shape, dtype=complex)
        out = self._ray(np.log(rho))
        # beyond the table r1 is below the recorded decay diagnostic
        return np.where(rho > self._ray_max, 0.0, out)

    def _r2_segment(self, sigma: np.ndarray) -> np.ndarray:
        symmetric = super()._r2_segment(sigma)
        if self._segment is None:
            return symmetric
        # below the table r2 follows from the ray values of r1
        return np.where(sigma < self._segment_min, symmetric, self._segment(sigma))


def single_lobe(
    half_width_deg: float = SINGLE_LOBE_HALF_WIDTH_DEG,
    amplitude: float = SINGLE_LOBE_AMPLITUDE,
    **kwargs: float,
) -> DecoupledCircleData:
    """One lobe centred at k = 1; amplitude 1 gives f(1) = f(omega) = 0 and nu_hat2 = 0."""
    if not 45.0 < half_width_deg < 60.0:
        raise AdmissibilityError("single-lobe half width must lie in (45, 60) degrees to contain k4")
    return DecoupledCircleData([(0.0, half_width_deg)], [amplitude], label="single_lobe", **kwargs)


def two_lobe(
    lobes: Sequence[tuple[float, float]] = TWO_LOBE_SUPPORT_DEG,
    amplitudes: Sequence[float] = TWO_LOBE_AMPLITUDES,
    **kwargs: float,
) -> DecoupledCircleData:
    """Lobes around k4 and around 1/k2: both nu1 and nu_hat2 positive."""
    return DecoupledCircleData(lobes, amplitudes, label="two_lobe", **kwargs)


def synthetic_spectral_data(family: str = "two_lobe", **params: float) -> SpectralData:
    """Build a named synthetic admissible family."""
    if family == "zero":
        return ZeroSpectralData()
    if family == "single_lobe":
        return single_lobe(**params)
    if family == "two_lobe":
        return two_lobe(**params)
    raise DomainError(f"unknown spectral family {family!r}; expected one of {FAMILIES}")
