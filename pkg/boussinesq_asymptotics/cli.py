"""Command-line orchestration: scatter, asymptotics, verify and model-rhp subcommands."""

from __future__ import annotations

import argparse
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

import numpy as np
import pandas as pd
from threadpoolctl import threadpool_limits

from boussinesq_asymptotics import __version__
from boussinesq_asymptotics.asymptotics import defect_table, evaluate_grid, q_coefficients
from boussinesq_asymptotics.cauchy_parametrix import CauchyParametrix
from boussinesq_asymptotics.config import (
    ARC_SPLINE_NODES,
    ASSUMPTION_III_TOL,
    ASSUMPTION_REPORT_FILENAME,
    BUNDLE_FILENAME,
    CACHE_FILENAME,
    CIRCLE_NODES_PER_ARC,
    CSV_FLOAT_FORMAT,
    DEFAULT_T_LIST,
    DEFAULT_ZETA_COUNT,
    DEFAULT_ZETA_INTERVAL,
    DEFECT_EPS,
    DEFECT_FILENAME,
    DEFECT_FRACTION_LIMIT,
    DEFECT_THETA_DEG,
    ERROR_ORDER,
    META_FILENAME,
    MODEL_RHP_REPORT_FILENAME,
    PLOT_SCRIPT_FILENAME,
    RAY_NODES,
    RESULT_FILENAME,
    SCHEMA_VERSION,
    SEGMENT_NODES,
    T_MIN,
    VERIFY_REPORT_FILENAME,
    ZETA_MAX,
)
from boussinesq_asymptotics.data import (
    initial_data_from_mapping,
    load_initial_data,
    parse_json_text,
    read_spectral_cache,
    tabulated_from_cache,
    write_json_atomic,
    write_spectral_cache,
)
from boussinesq_asymptotics.errors import BoussinesqError, ConfigError, InitialDataError
from boussinesq_asymptotics.forward_scattering import ScatteringMatrices, check_assumptions, compute_spectral_cache, spectral_grid
from boussinesq_asymptotics.model_rhp import ModelParams2, ModelRHP
from boussinesq_asymptotics.spectral_data import PerturbedSpectralData, SpectralData, synthetic_spectral_data
from boussinesq_asymptotics.verification import SUITES, VerificationReport, model_rhp_suite, run_suites

logger = logging.getLogger(__name__)

MODES: tuple[str, ...] = ("scatter", "asymptotics", "verify", "model-rhp")

EXIT_OK = 0
EXIT_IO = 1
EXIT_ASSUMPTION = 2
EXIT_DEFECTS = 3
EXIT_VERIFY = 4

_KNOWN_KEYS: frozenset[str] = frozenset(
    {
        "zeta_interval",
        "zeta_count",
        "t_list",
        "t_range",
        "spectral",
        "initial_data",
        "tolerances",
        "seed",
        "plot_script",
        "scatter_grid",
        "bundles",
        "spline_nodes",
    }
)
_TOLERANCE_KEYS: frozenset[str] = frozenset({"assumption_iii", "defect_fraction"})
_GRID_KEYS: frozenset[str] = frozenset({"nodes_per_arc", "ray_nodes", "segment_nodes"})

PLOT_SCRIPT = '''"""Plot the leading-order asymptotics u(x, t) against x at each t."""

import sys

import matplotlib.pyplot as plt
import pandas as pd

path = sys.argv[1] if len(sys.argv) > 1 else "{csv}"
table = pd.read_csv(path)
fig, ax = plt.subplots(figsize=(8, 5))
for t, group in table.groupby("t"):
    group = group.sort_values("x")
    ax.plot(group["x"], group["u_leading"], marker="o", label=f"t = {{t:g}}")
ax.set_xlabel("x")
ax.set_ylabel("u (leading term)")
ax.legend()
fig.tight_layout()
plt.show()
'''


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration; every field has a documented default."""

    zeta_interval: tuple[float, float] = DEFAULT_ZETA_INTERVAL
    zeta_count: int = DEFAULT_ZETA_COUNT
    t_list: tuple[float, ...] = DEFAULT_T_LIST
    spectral: Mapping[str, Any] = field(default_factory=lambda: {"family": "two_lobe"})
    initial_data: Optional[Mapping[str, Any]] = None
    assumption_iii_tol: float = ASSUMPTION_III_TOL
    defect_fraction: float = DEFECT_FRACTION_LIMIT
    seed: int = 0
    plot_script: bool = True
    bundles: bool = False
    spline_nodes: int = ARC_SPLINE_NODES
    scatter_grid: Mapping[str, int] = field(
        default_factory=lambda: {
            "nodes_per_arc": CIRCLE_NODES_PER_ARC,
            "ray_nodes": RAY_NODES,
            "segment_nodes": SEGMENT_NODES,
        }
    )

    @property
    def zetas(self) -> np.ndarray:
        a, b = self.zeta_interval
        if self.zeta_count == 1:
            return np.array([0.5 * (a + b)])
        return np.linspace(a, b, self.zeta_count)

    @classmethod
    def from_mapping(cls, raw: Mapping[str, Any], seed: Optional[int] = None) -> "RunConfig":
        """Validate a parsed JSON config.

        Raises:
            ConfigError: on out-of-range intervals, non-positive tolerances or malformed values.
        """
        if not isinstance(raw, Mapping):
            raise ConfigError("config must be a JSON object")
        for key in sorted(set(raw) - _KNOWN_KEYS):
            logger.warning("Ignoring unknown config key %r", key)
        kwargs: dict[str, Any] = {}
        try:
            if "zeta_interval" in raw:
                a, b = (float(v) for v in raw["zeta_interval"])
                kwargs["zeta_interval"] = (a, b)
            if "zeta_count" in raw:
                kwargs["zeta_count"] = int(raw["zeta_count"])
            if "t_list" in raw:
                kwargs["t_list"] = tuple(float(t) for t in raw["t_list"])
            elif "t_range" in raw:
                lo, hi, n = raw["t_range"]
                kwargs["t_list"] = tuple(float(t) for t in np.geomspace(float(lo), float(hi), int(n)))
            if "spectral" in raw:
                kwargs["spectral"] = dict(raw["spectral"])
            if raw.get("initial_data") is not None:
                kwargs["initial_data"] = dict(raw["initial_data"])
            tolerances = dict(raw.get("tolerances", {}))
            for key in sorted(set(tolerances) - _TOLERANCE_KEYS):
                logger.warning("Ignoring unknown tolerance %r", key)
            if "assumption_iii" in tolerances:
                kwargs["assumption_iii_tol"] = float(tolerances["assumption_iii"])
            if "defect_fraction" in tolerances:
                kwargs["defect_fraction"] = float(tolerances["defect_fraction"])
            if "seed" in raw:
                kwargs["seed"] = int(raw["seed"])
            if "plot_script" in raw:
                kwargs["plot_script"] = bool(raw["plot_script"])
            if "bundles" in raw:
                kwargs["bundles"] = bool(raw["bundles"])
            if "spline_nodes" in raw:
                kwargs["spline_nodes"] = int(raw["spline_nodes"])
            if "scatter_grid" in raw:
                grid = dict(raw["scatter_grid"])
                for key in sorted(set(grid) - _GRID_KEYS):
                    logger.warning("Ignoring unknown scatter_grid key %r", key)
                kwargs["scatter_grid"] = {**cls().scatter_grid, **{k: int(v) for k, v in grid.items() if k in _GRID_KEYS}}
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed config value: {exc}") from exc
        if seed is not None:
            kwargs["seed"] = seed
        config = cls(**kwargs)
        config.validate()
        return config

    def validate(self) -> None:
        a, b = self.zeta_interval
        if not 0.0 < a <= b < ZETA_MAX:
            raise ConfigError(f"zeta_interval must satisfy 0 < a <= b < 1/sqrt(3), got {self.zeta_interval}")
        if self.zeta_count < 1:
            raise ConfigError(f"zeta_count must be positive, got {self.zeta_count}")
        if a == b and self.zeta_count != 1:
            raise ConfigError("a degenerate zeta_interval needs zeta_count = 1")
        if not self.t_list or min(self.t_list) < T_MIN:
            raise ConfigError(f"t_list must be non-empty with every t >= {T_MIN}")
        if self.assumption_iii_tol <= 0 or not 0 < self.defect_fraction < 1:
            raise ConfigError("tolerances must be positive (defect_fraction below 1)")
        if self.spline_nodes < 16:
            raise ConfigError(f"spline_nodes must be at least 16, got {self.spline_nodes}")
        if any(v < 2 for v in self.scatter_grid.values()):
            raise ConfigError(f"scatter_grid counts must be at least 2, got {dict(self.scatter_grid)}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "zeta_interval": list(self.zeta_interval),
            "zeta_count": self.zeta_count,
            "t_list": list(self.t_list),
            "spectral": dict(self.spectral),
            "initial_data": None if self.initial_data is None else dict(self.initial_data),
            "tolerances": {"assumption_iii": self.assumption_iii_tol, "defect_fraction": self.defect_fraction},
            "seed": self.seed,
            "plot_script": self.plot_script,
            "bundles": self.bundles,
            "spline_nodes": self.spline_nodes,
            "scatter_grid": dict(self.scatter_grid),
        }


def load_config(path: Optional[Path], seed: Optional[int] = None) -> RunConfig:
    if path is None:
        return RunConfig.from_mapping({}, seed)
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = parse_json_text(text, str(path))
    except InitialDataError as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig.from_mapping(raw, seed)


def resolve_spectral(config: RunConfig, cache: Optional[Path] = None) -> SpectralData:
    """Spectral data from a cache file or from a synthetic family spec.

    A ``perturb`` entry ({target, theta_deg, eps}) wraps the data with a localized defect.
    """
    spec = dict(config.spectral)
    cache_path = cache if cache is not None else spec.pop("cache", None)
    perturb = spec.pop("perturb", None)
    if cache_path is not None:
        spectral: SpectralData = tabulated_from_cache(read_spectral_cache(Path(cache_path)), label=str(cache_path))
    else:
        family = spec.pop("family", "two_lobe")
        spectral = synthetic_spectral_data(family, **spec)
    if perturb is not None:
        perturb = dict(perturb)
        spectral = PerturbedSpectralData(
            spectral,
            perturb.get("target", "r2"),
            math.radians(float(perturb.get("theta_deg", DEFECT_THETA_DEG))),
            float(perturb.get("eps", DEFECT_EPS)),
        )
    logger.info("Using spectral data %r", spectral)
    return spectral


def write_csv(table: pd.DataFrame, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


# --- subcommands ---


def cmd_scatter(config: RunConfig, out: Path, input_path: Optional[Path] = None) -> int:
    """Forward scattering of the initial data onto the spectral grid, plus the assumption report."""
    if input_path is not None:
        data = load_initial_data(input_path)
    elif config.initial_data is not None:
        data = initial_data_from_mapping(config.initial_data)
    else:
        raise ConfigError("scatter needs --input or an 'initial_data' config entry")
    matrices = ScatteringMatrices(data)
    grid = spectral_grid(**config.scatter_grid)
    records = compute_spectral_cache(matrices, grid)
    write_spectral_cache(out / CACHE_FILENAME, records, {"version": SCHEMA_VERSION, "initial_data": data.name})
    spectral = tabulated_from_cache(records, label="scatter")
    report = check_assumptions(spectral, grid, matrices)
    passed_iii = report.max_r1_segment <= config.assumption_iii_tol
    payload = report.to_dict()
    payload.update(version=SCHEMA_VERSION, tolerance_iii=config.assumption_iii_tol, passed_iii=passed_iii)
    write_json_atomic(out / ASSUMPTION_REPORT_FILENAME, payload)
    if not passed_iii:
        logger.error("r1 does not vanish on [0, i]: max |r1| = %.3e", report.max_r1_segment)
        return EXIT_ASSUMPTION
    return EXIT_OK


def _bundle_snapshots(config: RunConfig, spectral: SpectralData, zetas: Sequence[float]) -> list[dict[str, Any]]:
    snapshots = []
    for zeta in zetas:
        try:
            parametrix = CauchyParametrix(spectral, float(zeta), config.spline_nodes)
            snapshots.extend(parametrix.bundle(t).to_dict() for t in config.t_list)
        except BoussinesqError as exc:
            logger.warning("No bundle snapshot at zeta = %.6g: %s", zeta, exc)
    return snapshots


def cmd_asymptotics(config: RunConfig, out: Path, cache: Optional[Path] = None, workers: int = 1) -> int:
    """Leading-order sweep over the (zeta, t) grid written as CSV with a defects sidecar."""
    spectral = resolve_spectral(config, cache)
    zetas = config.zetas
    start = time.perf_counter()
    table, defects = evaluate_grid(zetas, config.t_list, spectral, config.spline_nodes, workers)
    wall = time.perf_counter() - start
    write_csv(table, out / RESULT_FILENAME)
    write_csv(defect_table(defects), out / DEFECT_FILENAME)
    total = len(zetas) * len(config.t_list)
    fraction = len(defects) / total if total else 0.0
    write_json_atomic(
        out / META_FILENAME,
        {
            "version": SCHEMA_VERSION,
            "package_version": __version__,
            "wall_time_s": wall,
            "grid_points": total,
            "defects": len(defects),
            "error_order": ERROR_ORDER,
            "spectral": repr(spectral),
            "config": config.to_dict(),
        },
    )
    if config.plot_script:
        (out / PLOT_SCRIPT_FILENAME).write_text(PLOT_SCRIPT.format(csv=RESULT_FILENAME), encoding="utf-8", newline="\n")
    if config.bundles:
        write_json_atomic(out / BUNDLE_FILENAME, {"version": SCHEMA_VERSION, "bundles": _bundle_snapshots(config, spectral, zetas)})
    logger.info("Sweep took %.2f s for %d grid points", wall, total)
    if fraction > config.defect_fraction:
        logger.error("%d of %d grid points are defective (limit %.0f%%)", len(defects), total, 100 * config.defect_fraction)
        return EXIT_DEFECTS
    return EXIT_OK


def _report_exit(report: VerificationReport, path: Path) -> int:
    write_json_atomic(path, report.to_dict())
    if not report.passed:
        for name in report.failing_checks():
            logger.error("Failing check: %s", name)
        return EXIT_VERIFY
    logger.info("All %d checks passed", len(report.records))
    return EXIT_OK


def cmd_verify(
    config: RunConfig, out: Path, only: Optional[Sequence[str]] = None, cache: Optional[Path] = None
) -> int:
    """Run the verification suites; exit 4 lists the failing checks."""
    spectral = resolve_spectral(config, cache)
    report = run_suites(spectral, only, seed=config.seed)
    return _report_exit(report, out / VERIFY_REPORT_FILENAME)


def cmd_model_rhp(config: RunConfig, out: Path, cache: Optional[Path] = None) -> int:
    """Model-problem checks plus the model-2 parameters induced by the spectral data at each zeta."""
    report = VerificationReport(model_rhp_suite())
    spectral = resolve_spectral(config, cache)
    instances = []
    for zeta in config.zetas:
        try:
            params = ModelParams2.from_coefficients(q_coefficients(float(zeta), spectral))
            model = ModelRHP(2, params)
            instances.append(
                {
                    "zeta": float(zeta),
                    "params": params.to_dict(),
                    "beta": model.beta.to_dict(),
                    "degenerate": model.is_degenerate,
                }
            )
        except BoussinesqError as exc:
            logger.warning("No model-2 instance at zeta = %.6g: %s", zeta, exc)
            instances.append({"zeta": float(zeta), "error": type(exc).__name__, "message": str(exc)})
    payload = report.to_dict()
    payload["instances"] = instances
    write_json_atomic(out / MODEL_RHP_REPORT_FILENAME, payload)
    if not report.passed:
        for name in report.failing_checks():
            logger.error("Failing check: %s", name)
        return EXIT_VERIFY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="boussinesq-asymptotics",
        description="Long-time asymptotics of the good Boussinesq equation in the sector 0 < x/t < 1/sqrt(3).",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="JSON run-config file.")
    common.add_argument("--out", type=Path, default=Path("outputs"), help="Output directory.")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--threads", type=int, default=1, help="BLAS threads and asymptotics worker processes.")
    common.add_argument("--verbose", action="store_true")
    sub = ap.add_subparsers(dest="mode", required=True)
    scatter = sub.add_parser("scatter", parents=[common], help="Forward scattering to a spectral cache.")
    scatter.add_argument("--input", type=Path, default=None, help="Initial-data JSON file.")
    for name, text in (
        ("asymptotics", "Leading-order asymptotics on a (zeta, t) grid."),
        ("verify", "Numerical verification suites."),
        ("model-rhp", "Model Riemann-Hilbert problem checks."),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--cache", type=Path, default=None, help="Spectral cache written by 'scatter'.")
        if name == "verify":
            p.add_argument("--only", choices=SUITES, action="append", default=None)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    threads = max(1, args.threads)
    try:
        config = load_config(args.config, args.seed)
        out: Path = args.out
        out.mkdir(parents=True, exist_ok=True)
        logger.info("Running %s into %s with %d thread(s)", args.mode, out, threads)
        with threadpool_limits(limits=threads):
            if args.mode == "scatter":
                return cmd_scatter(config, out, args.input)
            if args.mode == "asymptotics":
                return cmd_asymptotics(config, out, args.cache, workers=threads)
            if args.mode == "verify":
                return cmd_verify(config, out, args.only, args.cache)
            return cmd_model_rhp(config, out, args.cache)
    except (ConfigError, InitialDataError, OSError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_IO
    except BoussinesqError:
        logger.exception("Run aborted")
        return EXIT_IO
