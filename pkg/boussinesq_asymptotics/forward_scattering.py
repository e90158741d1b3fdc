"""Forward scattering: Volterra march for X, X^A, the matrices s, s^A and reflection coefficients."""

from __future__ import annotations

import logging
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Any, Callable, Literal, Optional, Sequence

import numpy as np
from scipy.integrate import quad_vec
from scipy.linalg import expm

from boussinesq_asymptotics.config import (
    ASSUMPTION_III_TOL,
    CIRCLE_NODES_PER_ARC,
    DET_P_MIN,
    GENERIC_LIMIT_MIN,
    LIMIT_SAMPLE_STEPS,
    QHAT_EXCLUSION,
    QUAD_EPSABS,
    QUAD_EPSREL,
    QUAD_LIMIT,
    RAY_K_MAX,
    RAY_NODES,
    S11_MIN,
    SEGMENT_MIN_MODULUS,
    SEGMENT_NODES,
    VANISHING_ORDER_STEPS,
    VOLTERRA_MAX_HALVINGS,
    VOLTERRA_MIN_STEPS,
    VOLTERRA_STEP,
    VOLTERRA_TOL,
)
from boussinesq_asymptotics.data import CONTOUR_IDS, CacheRecord, InitialData
from boussinesq_asymptotics.errors import ConvergenceError, DivisionNearZero, DomainError, NearSingularError
from boussinesq_asymptotics.spectral_core import OMEGA, OMEGA2, SQRT3, ComplexLike, l_func, r_tilde
from boussinesq_asymptotics.spectral_data import SpectralData

logger = logging.getLogger(__name__)

Direction = Literal["X", "XA"]

# two-point Gauss-Legendre nodes on [0, 1]
_GAUSS_C1: float = 0.5 - SQRT3 / 6.0
_GAUSS_C2: float = 0.5 + SQRT3 / 6.0


def _ls(ks: np.ndarray) -> np.ndarray:
    """l_1, l_2, l_3 stacked on the last axis."""
    return np.stack([l_func(j, ks) for j in (1, 2, 3)], axis=-1)


def vandermonde_P(k: ComplexLike) -> np.ndarray:
    """P(k) with rows 1, l_j, l_j^2."""
    ls = _ls(np.asarray(k, dtype=complex))
    return np.stack([np.ones_like(ls), ls, ls**2], axis=-2)


def _coupling_column(ks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Third column of P^{-1} and the l values, for U = col (x) (a + b l).

    Raises:
        NearSingularError: when |det P| < DET_P_MIN.
    """
    P = vandermonde_P(ks)
    det = np.linalg.det(P)
    if np.any(np.abs(det) < DET_P_MIN):
        bad = ks[np.argmin(np.abs(det))]
        raise NearSingularError(f"|det P(k)| < {DET_P_MIN:g} at k = {bad} (too close to a sixth root of unity)")
    column = np.linalg.solve(P, np.broadcast_to(np.array([0.0, 0.0, 1.0], dtype=complex), ks.shape + (3,))[..., None])
    return column[..., 0], P[..., 1, :]


def _potentials(x: np.ndarray, data: InitialData) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients of E31 and E32 in the undressed potential."""
    a = -np.asarray(data.u0x(x), dtype=float) / 4.0 - 1j * np.asarray(data.v0(x), dtype=float) / (4.0 * SQRT3)
    b = -np.asarray(data.u0(x), dtype=float) / 2.0 + 0j
    return a, b


def build_P_and_U(x: float, k: complex, data: InitialData) -> tuple[np.ndarray, np.ndarray]:
    """P(k) and U(x, k) = P^{-1} (a E31 + b E32) P at a single (x, k).

    Raises:
        NearSingularError: for k close to the sixth roots of unity.
    """
    ks = np.array([k], dtype=complex)
    column, ls = _coupling_column(ks)
    a, b = _potentials(np.array([x], dtype=float), data)
    row = a[0] + b[0] * ls[0]
    return vandermonde_P(k), np.outer(column[0], row)


def _interaction_kernel(
    x: float, a: complex, b: complex, column: np.ndarray, ls: np.ndarray, adjoint: bool
) -> np.ndarray:
    """e^{-xL} U e^{xL} for every k (or minus its transpose for the adjoint system)."""
    left = column * np.exp(-x * ls)
    right = (a + b * ls) * np.exp(x * ls)
    kernel = left[:, :, None] * right[:, None, :]
    if adjoint:
        return -np.swapaxes(kernel, -1, -2)
    return kernel


def _march(
    ks: np.ndarray, data: InitialData, n_steps: int, adjoint: bool, keep_path: bool = False
) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Fourth-order Magnus march of W' = K(x) W from x_max (W = I) down to x_min."""
    column, ls = _coupling_column(ks)
    xs = np.linspace(data.x_max, data.x_min, n_steps + 1)
    delta = (data.x_min - data.x_max) / n_steps
    a1, b1 = _potentials(xs[:-1] + _GAUSS_C1 * delta, data)
    a2, b2 = _potentials(xs[:-1] + _GAUSS_C2 * delta, data)
    W = np.broadcast_to(np.eye(3, dtype=complex), (len(ks), 3, 3)).copy()
    path = [W.copy()] if keep_path else None
    for n in range(n_steps):
        if a1[n] == 0 and b1[n] == 0 and a2[n] == 0 and b2[n] == 0:
            if path is not None:
                path.append(W.copy())
            continue
        A1 = _interaction_kernel(xs[n] + _GAUSS_C1 * delta, a1[n], b1[n], column, ls, adjoint)
        A2 = _interaction_kernel(xs[n] + _GAUSS_C2 * delta, a2[n], b2[n], column, ls, adjoint)
        omega = 0.5 * delta * (A1 + A2) + (SQRT3 / 12.0) * delta**2 * (A2 @ A1 - A1 @ A2)
        W = expm(omega) @ W
        if path is not None:
            path.append(W.copy())
    return W, (np.stack(path, axis=1) if path is not None else None)


def _relative_change(coarse: np.ndarray, fine: np.ndarray) -> np.ndarray:
    scale = np.maximum(1.0, np.max(np.abs(fine), axis=(-2, -1)))
    return np.max(np.abs(fine - coarse), axis=(-2, -1)) / scale


def march_to_x_min(
    ks: Sequence[complex],
    data: InitialData,
    direction: Direction = "X",
    step: float = VOLTERRA_STEP,
    tol: float = VOLTERRA_TOL,
    max_halvings: int = VOLTERRA_MAX_HALVINGS,
) -> tuple[np.ndarray, np.ndarray]:
    """W(x_min, k) for every k, i.e. s(k) for "X" and s^A(k) for "XA".

    Each k is marched with n and 2n steps; points whose change exceeds tol are
    re-marched with the step halved, up to max_halvings times.

    Returns:
        (values of shape (n_k, 3, 3), residual per k)

    Raises:
        ConvergenceError: if some k never meets tol or produces non-finite values.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=complex))
    adjoint = direction == "XA"
    n_steps = max(VOLTERRA_MIN_STEPS, int(math.ceil((data.x_max - data.x_min) / step)))
    out = np.empty((len(ks), 3, 3), dtype=complex)
    residual = np.full(len(ks), np.inf)
    pending = np.arange(len(ks))
    coarse, _ = _march(ks, data, n_steps, adjoint)
    for _ in range(max_halvings + 1):
        n_steps *= 2
        fine, _ = _march(ks[pending], data, n_steps, adjoint)
        change = _relative_change(coarse, fine)
        done = np.isfinite(change) & (change <= tol)
        out[pending] = fine
        residual[pending] = change
        pending, coarse = pending[~done], fine[~done]
        if len(pending) == 0:
            return out, residual
        logger.debug("Refining march for %d k values (n_steps=%d)", len(pending), 2 * n_steps)
    worst = pending[np.argmax(np.nan_to_num(residual[pending], nan=np.inf))]
    raise ConvergenceError(
        f"Volterra march did not converge at k = {ks[worst]} (residual {residual[worst]:.3e} > {tol:.1e})"
    )


@dataclass(frozen=True)
class VolterraSolution:
    """Solution of one Volterra system on the march grid (descending x)."""

    k: complex
    direction: Direction
    x: np.ndarray
    W: np.ndarray
    step: float
    residual: float

    @property
    def values(self) -> np.ndarray:
        """X(x, k) (or X^A) undressed from the interaction picture."""
        ls = _ls(np.array([self.k]))[0]
        sign = 1.0 if self.direction == "X" else -1.0
        phase = np.exp(sign * self.x[:, None] * ls[None, :])
        return phase[:, :, None] * self.W / phase[:, None, :]

    @property
    def at_x_min(self) -> np.ndarray:
        return self.W[-1]


def solve_volterra_X(
    k: complex,
    data: InitialData,
    direction: Direction = "X",
    step: float = VOLTERRA_STEP,
    tol: float = VOLTERRA_TOL,
) -> VolterraSolution:
    """Solve for X(., k) (direction "X") or X^A(., k) (direction "XA") on [x_min, x_max].

    The march runs from x_max, where X = I, down to x_min with fourth-order
    Magnus steps; the endpoint is cross-checked against a run with half the step.
    """
    if direction not in ("X", "XA"):
        raise DomainError(f"direction must be 'X' or 'XA', got {direction!r}")
    ks = np.array([k], dtype=complex)
    n_steps = max(VOLTERRA_MIN_STEPS, int(math.ceil((data.x_max - data.x_min) / step)))
    adjoint = direction == "XA"
    _, path = _march(ks, data, n_steps, adjoint, keep_path=True)
    fine, _ = _march(ks, data, 2 * n_steps, adjoint)
    residual = float(_relative_change(path[:, -1], fine)[0])
    if not np.isfinite(residual) or residual > tol:
        raise ConvergenceError(f"Volterra march residual {residual:.3e} exceeds {tol:.1e} at k = {k}")
    return VolterraSolution(
        k=complex(k),
        direction=direction,
        x=np.linspace(data.x_max, data.x_min, n_steps + 1),
        W=path[0],
        step=(data.x_max - data.x_min) / n_steps,
        residual=residual,
    )


def born_approximation(k: complex, data: InitialData, direction: Direction = "X") -> np.ndarray:
    """First Born term of s (or s^A): I -/+ int e^{-xL} U e^{xL} dx by adaptive quadrature."""
    ks = np.array([k], dtype=complex)
    column, ls = _coupling_column(ks)
    adjoint = direction == "XA"

    def integrand(x: float) -> np.ndarray:
        a, b = _potentials(np.array([x]), data)
        kernel = _interaction_kernel(x, a[0], b[0], column, ls, adjoint)[0]
        return np.concatenate([kernel.real.ravel(), kernel.imag.ravel()])

    total, _ = quad_vec(integrand, data.x_min, data.x_max, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
    # W(x_min) = I - int K dx for the forward kernel; K already carries the adjoint sign
    return np.eye(3) - (total[:9] + 1j * total[9:]).reshape(3, 3)


class ScatteringMatrices:
    """Lazily evaluated s(k), s^A(k) with a cache of computed nodes.

    s^A is obtained from s^A = (s^{-1})^T unless march_adjoint is set, in which
    case the adjoint system is marched independently.
    """

    def __init__(
        self,
        data: InitialData,
        step: float = VOLTERRA_STEP,
        tol: float = VOLTERRA_TOL,
        march_adjoint: bool = False,
        max_cache: Optional[int] = None,
    ) -> None:
        if max_cache is not None and max_cache < 1:
            raise DomainError(f"max_cache must be positive, got {max_cache}")
        self.data = data
        self.step = step
        self.tol = tol
        self.march_adjoint = march_adjoint
        self.max_cache = max_cache
        self._cache: OrderedDict[complex, tuple[np.ndarray, np.ndarray]] = OrderedDict()

    @property
    def grid(self) -> list[complex]:
        return list(self._cache)

    def evaluate(self, ks: ComplexLike) -> tuple[np.ndarray, np.ndarray]:
        """Stacked s and s^A at the requested points; the oldest nodes are dropped beyond max_cache."""
        flat = [complex(k) for k in np.atleast_1d(np.asarray(ks, dtype=complex)).ravel()]
        fresh: dict[complex, tuple[np.ndarray, np.ndarray]] = {}
        missing = np.array([k for k in dict.fromkeys(flat) if k not in self._cache], dtype=complex)
        if len(missing):
            s_vals, _ = march_to_x_min(missing, self.data, "X", self.step, self.tol)
            if self.march_adjoint:
                sa_vals, _ = march_to_x_min(missing, self.data, "XA", self.step, self.tol)
            else:
                sa_vals = np.swapaxes(np.linalg.inv(s_vals), -1, -2)
            fresh = {complex(k): (s_k, sa_k) for k, s_k, sa_k in zip(missing, s_vals, sa_vals)}
        pairs = [fresh[k] if k in fresh else self._cache[k] for k in flat]
        self._cache.update(fresh)
        while self.max_cache is not None and len(self._cache) > self.max_cache:
            self._cache.popitem(last=False)
        return np.stack([p[0] for p in pairs]), np.stack([p[1] for p in pairs])

    def s(self, k: complex) -> np.ndarray:
        return self.evaluate(k)[0][0]

    def sA(self, k: complex) -> np.ndarray:
        return self.evaluate(k)[1][0]

    def reflection(self, ks: ComplexLike) -> tuple[np.ndarray, np.ndarray]:
        """r1 = s_12 / s_11 and r2 = s^A_12 / s^A_11.

        Raises:
            DivisionNearZero: when |s_11| or |s^A_11| < S11_MIN.
        """
        s, sa = self.evaluate(ks)
        for name, denom in (("s_11", s[:, 0, 0]), ("s^A_11", sa[:, 0, 0])):
            if np.any(np.abs(denom) < S11_MIN):
                raise DivisionNearZero(f"|{name}| < {S11_MIN:g}: possible soliton, assumption (i) violated")
        return s[:, 0, 1] / s[:, 0, 0], sa[:, 0, 1] / sa[:, 0, 0]


def scattering(k: complex, data: InitialData, step: float = VOLTERRA_STEP) -> tuple[np.ndarray, np.ndarray]:
    """s(k) and s^A(k) at a single point."""
    matrices = ScatteringMatrices(data, step)
    return matrices.s(k), matrices.sA(k)


def reflection(k: ComplexLike, data: InitialData, step: float = VOLTERRA_STEP) -> tuple[ComplexLike, ComplexLike]:
    r1, r2 = ScatteringMatrices(data, step).reflection(k)
    if np.ndim(k) == 0:
        return complex(r1[0]), complex(r2[0])
    return r1, r2


# --- grids and cache ---


def spectral_grid(
    nodes_per_arc: int = CIRCLE_NODES_PER_ARC,
    ray_nodes: int = RAY_NODES,
    segment_nodes: int = SEGMENT_NODES,
    ray_k_max: float = RAY_K_MAX,
    gap: float = QHAT_EXCLUSION,
    segment_min: float = SEGMENT_MIN_MODULUS,
) -> dict[str, np.ndarray]:
    """Sample points per contour id.

    Circle arcs between consecutive sixth roots get Chebyshev nodes (clustered
    at the roots, which include the poles +-omega^2 of r2); the ray gets
    geometric nodes. The imaginary-axis segments stop at segment_min: closer to
    k = 0 the factors e^{+-x l_j} overflow on any realistic support.
    """
    m = np.arange(nodes_per_arc)
    cheb = 0.5 * (1.0 - np.cos(np.pi * (m + 0.5) / nodes_per_arc))
    arc = np.pi / 3.0
    theta = np.concatenate([j * arc + gap + (arc - 2.0 * gap) * cheb for j in range(6)])
    ms = np.arange(segment_nodes)
    seg = segment_min + (1.0 - gap - segment_min) * 0.5 * (1.0 - np.cos(np.pi * (ms + 0.5) / segment_nodes))
    return {
        "circle": np.exp(1j * theta),
        "ray_minus_i": -1j * np.geomspace(1.0 + gap, ray_k_max, ray_nodes),
        "segment_minus_i": -1j * seg,
        "segment_i": 1j * seg,
    }


def compute_spectral_cache(
    matrices: ScatteringMatrices, grid: Optional[dict[str, np.ndarray]] = None
) -> list[CacheRecord]:
    """Reflection coefficients on every grid contour, as cache records.

    Only the coefficient defined on a contour is stored; the other is recorded as 0.
    """
    grid = grid if grid is not None else spectral_grid()
    records: list[CacheRecord] = []
    for contour_id, ks in grid.items():
        r1, r2 = matrices.reflection(ks)
        keep_r1 = contour_id in ("circle", "ray_minus_i", "segment_i")
        keep_r2 = contour_id in ("circle", "segment_minus_i")
        for k, a, b in zip(ks, r1, r2):
            records.append(
                CacheRecord(contour_id, complex(k), complex(a) if keep_r1 else 0j, complex(b) if keep_r2 else 0j)
            )
        logger.info("Computed %d reflection values on %s", len(ks), contour_id)
    return records


# --- assumptions ---


def extrapolate_limit(values: Sequence[complex]) -> complex:
    """Quadratic Richardson limit from samples at steps 4h, 2h, h (in that order)."""
    f4, f2, f1 = values
    return complex((8.0 * f1 - 6.0 * f2 + f4) / 3.0)


def vanishing_order(
    fun: Callable[[ComplexLike], ComplexLike],
    k_star: complex,
    steps: Sequence[float] = VANISHING_ORDER_STEPS,
) -> float:
    """Local vanishing order of fun at k_star on the unit circle.

    Log-log slope of |fun(k_star e^{+-i eps})| against eps, averaged over both sides.
    """
    eps = np.asarray(steps, dtype=float)
    slopes = []
    for side in (1.0, -1.0):
        vals = np.abs(np.asarray(fun(k_star * np.exp(1j * side * eps))))
        if np.any(vals <= 0.0):
            return math.inf
        slopes.append(np.polyfit(np.log(eps), np.log(vals), 1)[0])
    return float(np.mean(slopes))


_GENERIC_QUANTITIES: tuple[tuple[str, str, int, int, bool], ...] = (
    ("(k-k*)s11", "s", 0, 0, True),
    ("(k-k*)s13", "s", 0, 2, True),
    ("s31", "s", 2, 0, False),
    ("s33", "s", 2, 2, False),
    ("(k-k*)sA11", "sA", 0, 0, True),
    ("(k-k*)sA31", "sA", 2, 0, True),
    ("sA13", "sA", 0, 2, False),
    ("sA33", "sA", 2, 2, False),
)


def _complex_json(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


@dataclass
class AssumptionReport:
    """Report on the no-soliton, generic-behaviour and global-existence assumptions."""

    min_abs_s11: Optional[float] = None
    s11_contours: tuple[str, ...] = ()
    generic_limits: dict[str, dict[str, complex]] = field(default_factory=dict)
    generic: Optional[bool] = None
    reflection_limits: dict[str, complex] = field(default_factory=dict)
    max_r1_segment: float = 0.0
    tolerance_iii: float = ASSUMPTION_III_TOL
    f_at_roots: dict[str, complex] = field(default_factory=dict)
    vanishing_orders: dict[str, float] = field(default_factory=dict)
    kbar_symmetry_residual: Optional[float] = None
    circle_symmetry_residual: Optional[float] = None

    @property
    def passed_iii(self) -> bool:
        return self.max_r1_segment <= self.tolerance_iii

    def to_dict(self) -> dict[str, Any]:
        return {
            "min_abs_s11": self.min_abs_s11,
            "s11_contours": list(self.s11_contours),
            "generic_limits": {
                key: {name: _complex_json(v) for name, v in vals.items()} for key, vals in self.generic_limits.items()
            },
            "generic": self.generic,
            "reflection_limits": {key: _complex_json(v) for key, v in self.reflection_limits.items()},
            "max_r1_segment": self.max_r1_segment,
            "tolerance_iii": self.tolerance_iii,
            "passed_iii": self.passed_iii,
            "f_at_roots": {key: _complex_json(v) for key, v in self.f_at_roots.items()},
            "vanishing_orders": dict(self.vanishing_orders),
            "kbar_symmetry_residual": self.kbar_symmetry_residual,
            "circle_symmetry_residual": self.circle_symmetry_residual,
        }


def _generic_limits(matrices: ScatteringMatrices, k_star: float) -> dict[str, complex]:
    samples = np.array([k_star * (1.0 + h) for h in LIMIT_SAMPLE_STEPS], dtype=complex)
    s, sa = matrices.evaluate(samples)
    out: dict[str, complex] = {}
    for name, which, i, j, scaled in _GENERIC_QUANTITIES:
        mats = s if which == "s" else sa
        vals = mats[:, i, j] * ((samples - k_star) if scaled else 1.0)
        out[name] = extrapolate_limit(vals)
    return out


def circle_symmetry_residual(spectral: SpectralData, ks: np.ndarray) -> float:
    """max |r1(1/(omega k)) + r2(omega k) + r1(omega^2 k) r2(1/k)| away from the sixth roots."""
    resid = (
        spectral.r1(1.0 / (OMEGA * ks))
        + spectral.r2(OMEGA * ks)
        + spectral.r1(OMEGA2 * ks) * spectral.r2(1.0 / ks)
    )
    return float(np.max(np.abs(resid)))


def check_assumptions(
    spectral: SpectralData,
    grid: Optional[dict[str, np.ndarray]] = None,
    matrices: Optional[ScatteringMatrices] = None,
) -> AssumptionReport:
    """Evaluate the three standing assumptions on a sample grid (report only).

    Args:
        spectral: r1, r2 to audit.
        grid: contour samples as returned by spectral_grid.
        matrices: scattering matrices when the data came from initial data;
            checks (i) and (ii) need them and are skipped otherwise.

    Returns:
        AssumptionReport; callers decide whether a failed check (iii) is fatal.
    """
    grid = grid if grid is not None else spectral_grid()
    report = AssumptionReport()
    circle = grid["circle"]
    segment = grid["segment_i"]

    if matrices is not None:
        report.s11_contours = tuple(cid for cid in CONTOUR_IDS if cid in grid)
        s, _ = matrices.evaluate(np.concatenate([grid[cid] for cid in report.s11_contours]))
        report.min_abs_s11 = float(np.min(np.abs(s[:, 0, 0])))
        report.generic_limits = {f"k={k_star:+g}": _generic_limits(matrices, k_star) for k_star in (1.0, -1.0)}
        report.generic = all(
            np.isfinite(v) and abs(v) > GENERIC_LIMIT_MIN
            for vals in report.generic_limits.values()
            for v in vals.values()
        )
        if not report.generic:
            logger.warning("Scattering data is not generic at k = +-1 (a limit vanishes)")
        r1_segment, _ = matrices.reflection(segment)
    else:
        r1_segment = spectral.r1(segment)
    report.max_r1_segment = float(np.max(np.abs(r1_segment)))

    for k_star in (1.0, -1.0):
        samples = k_star * np.exp(1j * np.asarray(LIMIT_SAMPLE_STEPS))
        report.reflection_limits[f"r1({k_star:+g})"] = extrapolate_limit(spectral.r1(samples))
        report.reflection_limits[f"r2({k_star:+g})"] = extrapolate_limit(spectral.r2(samples))

    report.f_at_roots = {"f(1)": complex(spectral.f(1.0 + 0j)), "f(omega)": complex(spectral.f(OMEGA))}
    report.vanishing_orders = {
        "f@1": vanishing_order(spectral.f, 1.0 + 0j),
        "f@omega": vanishing_order(spectral.f, OMEGA),
    }

    safe = circle[np.min(np.abs(circle[:, None] - np.exp(1j * np.pi * np.arange(6) / 3.0)[None, :]), axis=1) > 1e-2]
    report.circle_symmetry_residual = circle_symmetry_residual(spectral, safe)
    if spectral.mode == "from_initial_data":
        # on the circle 1/conj(k) = k
        report.kbar_symmetry_residual = float(
            np.max(np.abs(spectral.r2(safe) - r_tilde(safe) * np.conj(spectral.r1(safe))))
        )
    logger.info(
        "Assumption check: max|r1| on [0, i] = %.3e (%s)",
        report.max_r1_segment,
        "pass" if report.passed_iii else "FAIL",
    )
    return report
