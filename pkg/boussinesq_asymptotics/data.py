"""Initial-data presets, JSON ingestion and spectral-cache persistence."""

from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Mapping, Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from boussinesq_asymptotics.config import (
    DEFAULT_N_SAMPLES,
    DEFAULT_X_SUPPORT,
    GAUSSIAN_DEFAULTS,
    SECH2_DEFAULTS,
    TAIL_TOL,
)
from boussinesq_asymptotics.errors import InitialDataError
from boussinesq_asymptotics.spectral_data import TabulatedSpectralData

logger = logging.getLogger(__name__)

RealFunction = Callable[[np.ndarray], np.ndarray]
PRESETS: tuple[str, ...] = ("zero", "gaussian", "sech2", "table")
CONTOUR_IDS: tuple[str, ...] = ("circle", "ray_minus_i", "segment_minus_i", "segment_i")


@dataclass(frozen=True)
class InitialData:
    """Initial data u0, u0_x and v0 = int_{-inf}^x u1 on a truncation interval."""

    name: str
    u0: RealFunction
    u0x: RealFunction
    v0: RealFunction
    x_min: float = DEFAULT_X_SUPPORT[0]
    x_max: float = DEFAULT_X_SUPPORT[1]
    n_samples: int = DEFAULT_N_SAMPLES
    tail_tol: float = TAIL_TOL
    params: Mapping[str, Any] = field(default_factory=dict)

    def scaled(self, eps: float) -> "InitialData":
        """Same profile with u0 and u1 multiplied by eps."""
        return replace(
            self,
            name=f"{self.name}*{eps:g}",
            u0=lambda x: eps * self.u0(x),
            u0x=lambda x: eps * self.u0x(x),
            v0=lambda x: eps * self.v0(x),
        )

    def check(self) -> None:
        """Validate the truncation interval, the zero-mean condition on u1 and the tails.

        Raises:
            InitialDataError: if the interval is empty or int u1 dx != 0 within tail_tol.
        """
        if not self.x_min < self.x_max:
            raise InitialDataError(f"empty support [{self.x_min}, {self.x_max}]")
        ends = np.array([self.x_min, self.x_max])
        v_ends = np.asarray(self.v0(ends), dtype=float)
        if abs(v_ends[1] - v_ends[0]) > self.tail_tol:
            raise InitialDataError(
                f"int u1 dx = {v_ends[1] - v_ends[0]:.3e} exceeds tail tolerance {self.tail_tol:.1e}"
            )
        tails = np.abs(np.concatenate([self.u0(ends), v_ends]))
        if np.max(tails) > self.tail_tol:
            logger.warning(
                "Initial data '%s' does not decay below %.1e at the support ends (max %.3e)",
                self.name,
                self.tail_tol,
                float(np.max(tails)),
            )


def _zero(x: np.ndarray) -> np.ndarray:
    return np.zeros_like(np.asarray(x, dtype=float))


def zero_data(x_min: float = DEFAULT_X_SUPPORT[0], x_max: float = DEFAULT_X_SUPPORT[1]) -> InitialData:
    return InitialData("zero", _zero, _zero, _zero, x_min=x_min, x_max=x_max)


def gaussian_data(
    amplitude: float = GAUSSIAN_DEFAULTS["amplitude"],
    width: float = GAUSSIAN_DEFAULTS["width"],
    velocity: float = GAUSSIAN_DEFAULTS["velocity"],
    x_min: float = DEFAULT_X_SUPPORT[0],
    x_max: float = DEFAULT_X_SUPPORT[1],
    n_samples: int = DEFAULT_N_SAMPLES,
) -> InitialData:
    """u0 = A exp(-x^2/w^2), u1 = d/dx [B exp(-x^2/w^2)] so that v0 = B exp(-x^2/w^2)."""

    def u0(x: np.ndarray) -> np.ndarray:
        return amplitude * np.exp(-((np.asarray(x) / width) ** 2))

    def u0x(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        return -2.0 * x / width**2 * u0(x)

    def v0(x: np.ndarray) -> np.ndarray:
        return velocity * np.exp(-((np.asarray(x) / width) ** 2))

    params = {"amplitude": amplitude, "width": width, "velocity": velocity}
    return InitialData("gaussian", u0, u0x, v0, x_min, x_max, n_samples, params=params)


def sech2_data(
    amplitude: float = SECH2_DEFAULTS["amplitude"],
    width: float = SECH2_DEFAULTS["width"],
    velocity: float = SECH2_DEFAULTS["velocity"],
    x_min: float = DEFAULT_X_SUPPORT[0],
    x_max: float = DEFAULT_X_SUPPORT[1],
    n_samples: int = DEFAULT_N_SAMPLES,
) -> InitialData:
    """u0 = A sech^2(x/w), v0 = B sech^2(x/w)."""

    def sech2(x: np.ndarray) -> np.ndarray:
        return 1.0 / np.cosh(np.asarray(x) / width) ** 2

    def u0(x: np.ndarray) -> np.ndarray:
        return amplitude * sech2(x)

    def u0x(x: np.ndarray) -> np.ndarray:
        return -2.0 * amplitude / width * sech2(x) * np.tanh(np.asarray(x) / width)

    def v0(x: np.ndarray) -> np.ndarray:
        return velocity * sech2(x)

    params = {"amplitude": amplitude, "width": width, "velocity": velocity}
    return InitialData("sech2", u0, u0x, v0, x_min, x_max, n_samples, params=params)


def table_data(
    x: Sequence[float],
    u0: Sequence[float],
    u1: Sequence[float],
    tail_tol: float = TAIL_TOL,
) -> InitialData:
    """Tabulated u0, u1 with monotone cubic (PCHIP) interpolation; zero outside the table."""
    xs = np.asarray(x, dtype=float)
    if xs.ndim != 1 or len(xs) < 4 or np.any(np.diff(xs) <= 0):
        raise InitialDataError("table x must be strictly increasing with at least 4 nodes")
    u0_interp = PchipInterpolator(xs, np.asarray(u0, dtype=float), extrapolate=False)
    u0x_interp = u0_interp.derivative()
    v0_interp = PchipInterpolator(xs, np.asarray(u1, dtype=float), extrapolate=False).antiderivative()

    def _wrap(fun: Callable[[np.ndarray], np.ndarray], right: float) -> RealFunction:
        def inner(xv: np.ndarray) -> np.ndarray:
            xv = np.asarray(xv, dtype=float)
            out = np.nan_to_num(fun(xv), nan=0.0)
            return np.where(xv > xs[-1], right, out)

        return inner

    v_total = float(v0_interp(xs[-1]))
    return InitialData(
        "table",
        _wrap(u0_interp, 0.0),
        _wrap(u0x_interp, 0.0),
        _wrap(v0_interp, v_total),
        x_min=float(xs[0]),
        x_max=float(xs[-1]),
        n_samples=len(xs),
        tail_tol=tail_tol,
        params={"nodes": len(xs)},
    )


def initial_data_from_mapping(spec: Mapping[str, Any]) -> InitialData:
    """Build initial data from a parsed JSON object {preset, params..., x_min, x_max, n_samples}."""
    preset = spec.get("preset")
    if preset not in PRESETS:
        raise InitialDataError(f"unknown preset {preset!r}; expected one of {PRESETS}")
    support = {key: spec[key] for key in ("x_min", "x_max") if key in spec}
    if preset == "zero":
        data = zero_data(**support)
    elif preset == "table":
        try:
            data = table_data(spec["x"], spec["u0"], spec["u1"], spec.get("tail_tol", TAIL_TOL))
        except KeyError as exc:
            raise InitialDataError(f"table preset is missing {exc.args[0]!r}") from exc
    else:
        params = {key: float(spec[key]) for key in ("amplitude", "width", "velocity") if key in spec}
        if "n_samples" in spec:
            support["n_samples"] = int(spec["n_samples"])
        builder = gaussian_data if preset == "gaussian" else sech2_data
        data = builder(**params, **support)
    data.check()
    return data


def parse_json_text(text: str, source: str) -> Any:
    """json.loads with a diagnostic naming the byte offset of the failure."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise InitialDataError(f"{source}: malformed JSON at byte offset {offset}: {exc.msg}") from exc


def load_initial_data(path: Path) -> InitialData:
    """Read an initial-data JSON file.

    Args:
        path: JSON file with a preset description.

    Returns:
        Validated InitialData.
    """
    text = Path(path).read_text(encoding="utf-8")
    spec = parse_json_text(text, str(path))
    if not isinstance(spec, dict):
        raise InitialDataError(f"{path}: expected a JSON object")
    return initial_data_from_mapping(spec)


def write_json_atomic(path: Path, payload: Any) -> None:
    """Write JSON via a temporary file and os.replace."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"
    fd, tmp = tempfile.mkstemp(prefix=path.name, suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except Exception:
        logger.exception("Failed to write %s", path)
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- spectral cache ---


@dataclass(frozen=True)
class CacheRecord:
    contour_id: str
    k: complex
    r1: complex
    r2: complex

    def to_json(self) -> dict[str, Any]:
        return {
            "contour_id": self.contour_id,
            "k_re": float(self.k.real),
            "k_im": float(self.k.imag),
            "r1_re": float(self.r1.real),
            "r1_im": float(self.r1.imag),
            "r2_re": float(self.r2.real),
            "r2_im": float(self.r2.imag),
        }

    @classmethod
    def from_json(cls, item: Mapping[str, Any]) -> "CacheRecord":
        if item.get("contour_id") not in CONTOUR_IDS:
            raise InitialDataError(f"unknown contour id {item.get('contour_id')!r}")
        return cls(
            contour_id=item["contour_id"],
            k=complex(item["k_re"], item["k_im"]),
            r1=complex(item["r1_re"], item["r1_im"]),
            r2=complex(item["r2_re"], item["r2_im"]),
        )


def write_spectral_cache(path: Path, records: Sequence[CacheRecord], meta: Optional[Mapping[str, Any]] = None) -> None:
    payload = {"meta": dict(meta or {}), "records": [rec.to_json() for rec in records]}
    write_json_atomic(path, payload)
    logger.info("Wrote %d spectral records to %s", len(records), path)


def read_spectral_cache(path: Path) -> list[CacheRecord]:
    payload = parse_json_text(Path(path).read_text(encoding="utf-8"), str(path))
    try:
        return [CacheRecord.from_json(item) for item in payload["records"]]
    except (KeyError, TypeError) as exc:
        raise InitialDataError(f"{path}: malformed spectral cache ({exc})") from exc


def tabulated_from_cache(records: Sequence[CacheRecord], label: str = "cache") -> TabulatedSpectralData:
    """Spectral data interpolated from cache records."""

    def pick(cid: str) -> list[CacheRecord]:
        return [rec for rec in records if rec.contour_id == cid]

    circle = pick("circle")
    ray = pick("ray_minus_i")
    segment = pick("segment_minus_i")
    return TabulatedSpectralData(
        circle_theta=np.angle([rec.k for rec in circle]),
        circle_r1=np.array([rec.r1 for rec in circle], dtype=complex),
        circle_r2=np.array([rec.r2 for rec in circle], dtype=complex),
        ray_rho=np.array([-rec.k.imag for rec in ray]),
        ray_r1=np.array([rec.r1 for rec in ray], dtype=complex),
        segment_sigma=np.array([-rec.k.imag for rec in segment]),
        segment_r2=np.array([rec.r2 for rec in segment], dtype=complex),
        label=label,
    )
