"""Tests for the run configuration and the subcommand entry points."""

import contextlib
import json
import logging
from pathlib import Path

import pandas as pd
import pytest

from boussinesq_asymptotics import cli
from boussinesq_asymptotics.asymptotics import evaluate_grid
from boussinesq_asymptotics.cli import (
    EXIT_ASSUMPTION,
    EXIT_DEFECTS,
    EXIT_IO,
    EXIT_OK,
    EXIT_VERIFY,
    RunConfig,
    build_parser,
    cmd_asymptotics,
    cmd_model_rhp,
    cmd_scatter,
    load_config,
    main,
    resolve_spectral,
)
from boussinesq_asymptotics.config import (
    ASSUMPTION_REPORT_FILENAME,
    CACHE_FILENAME,
    DEFAULT_T_LIST,
    DEFECT_EPS,
    DEFECT_FILENAME,
    DEFECT_THETA_DEG,
    META_FILENAME,
    MODEL_RHP_REPORT_FILENAME,
    PLOT_SCRIPT_FILENAME,
    RESULT_COLUMNS,
    RESULT_FILENAME,
    VERIFY_REPORT_FILENAME,
)
from boussinesq_asymptotics.data import read_spectral_cache
from boussinesq_asymptotics.errors import ConfigError
from boussinesq_asymptotics.spectral_data import PerturbedSpectralData


def _make_raw(**overrides: object) -> dict:
    raw = {
        "zeta_interval": [0.3, 0.3],
        "zeta_count": 1,
        "t_list": [10.0],
        "spectral": {"family": "two_lobe"},
        "spline_nodes": 201,
    }
    raw.update(overrides)
    return raw


def _write_config(tmp_path: Path, raw: dict) -> Path:
    path = tmp_path / "run.json"
    path.write_text(json.dumps(raw), encoding="utf-8")
    return path


class TestRunConfig:
    def test_defaults(self) -> None:
        config = RunConfig.from_mapping({})
        assert config.t_list == DEFAULT_T_LIST
        assert len(config.zetas) == config.zeta_count

    def test_single_zeta(self) -> None:
        config = RunConfig.from_mapping(_make_raw())
        assert list(config.zetas) == [0.3]

    def test_seed_override(self) -> None:
        assert RunConfig.from_mapping(_make_raw(seed=3), seed=11).seed == 11

    def test_t_range(self) -> None:
        raw = _make_raw()
        del raw["t_list"]
        raw["t_range"] = [10.0, 1000.0, 3]
        assert RunConfig.from_mapping(raw).t_list == pytest.approx((10.0, 100.0, 1000.0))

    @pytest.mark.parametrize(
        "overrides",
        [
            {"zeta_interval": [0.3, 0.7]},
            {"zeta_interval": [0.0, 0.3]},
            {"zeta_interval": [0.4, 0.2]},
            {"zeta_interval": [0.3, 0.3], "zeta_count": 4},
            {"t_list": [1.0]},
            {"t_list": []},
            {"tolerances": {"defect_fraction": 1.5}},
            {"spline_nodes": 8},
            {"scatter_grid": {"ray_nodes": 1}},
            {"zeta_count": "many"},
        ],
    )
    def test_invalid(self, overrides: dict) -> None:
        with pytest.raises(ConfigError):
            RunConfig.from_mapping(_make_raw(**overrides))

    def test_not_an_object(self) -> None:
        with pytest.raises(ConfigError):
            RunConfig.from_mapping([1, 2, 3])  # type: ignore[arg-type]

    def test_unknown_keys_warned(self, caplog: pytest.LogCaptureFixture) -> None:
        with caplog.at_level(logging.WARNING):
            RunConfig.from_mapping(_make_raw(colour="blue", tolerances={"speed": 1.0}))
        assert "colour" in caplog.text
        assert "speed" in caplog.text

    def test_scatter_grid_merges_defaults(self) -> None:
        config = RunConfig.from_mapping(_make_raw(scatter_grid={"ray_nodes": 5}))
        assert config.scatter_grid["ray_nodes"] == 5
        assert set(config.scatter_grid) == {"nodes_per_arc", "ray_nodes", "segment_nodes"}

    def test_to_dict_round_trips(self) -> None:
        config = RunConfig.from_mapping(_make_raw())
        assert RunConfig.from_mapping(config.to_dict()) == config


class TestLoadConfig:
    def test_missing_path_uses_defaults(self) -> None:
        assert load_config(None) == RunConfig.from_mapping({})

    def test_malformed_json(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.json"
        path.write_text('{"zeta_count": 2,, }', encoding="utf-8")
        with pytest.raises(ConfigError, match="byte offset"):
            load_config(path)


class TestResolveSpectral:
    def test_perturbation_wraps_family(self) -> None:
        config = RunConfig.from_mapping(
            _make_raw(spectral={"family": "two_lobe", "perturb": {"target": "r1", "theta_deg": 40.0, "eps": 1e-3}})
        )
        assert isinstance(resolve_spectral(config), PerturbedSpectralData)


class TestSubcommands:
    def test_asymptotics_writes_outputs(self, tmp_path: Path) -> None:
        config = RunConfig.from_mapping(_make_raw())
        assert cmd_asymptotics(config, tmp_path) == EXIT_OK
        table = pd.read_csv(tmp_path / RESULT_FILENAME)
        assert list(table.columns) == list(RESULT_COLUMNS)
        assert len(table) == 1
        assert pd.read_csv(tmp_path / DEFECT_FILENAME).empty
        meta = json.loads((tmp_path / META_FILENAME).read_text(encoding="utf-8"))
        assert meta["grid_points"] == 1 and meta["defects"] == 0
        assert (tmp_path / PLOT_SCRIPT_FILENAME).exists()

    def test_scatter_zero_data(self, tmp_path: Path) -> None:
        config = RunConfig.from_mapping(
            _make_raw(
                initial_data={"preset": "zero", "x_min": -6.0, "x_max": 6.0},
                scatter_grid={"nodes_per_arc": 4, "ray_nodes": 4, "segment_nodes": 4},
            )
        )
        assert cmd_scatter(config, tmp_path) == EXIT_OK
        assert (tmp_path / CACHE_FILENAME).exists()
        report = json.loads((tmp_path / ASSUMPTION_REPORT_FILENAME).read_text(encoding="utf-8"))
        assert report["passed_iii"] is True

    def test_scatter_needs_input(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError):
            cmd_scatter(RunConfig.from_mapping(_make_raw()), tmp_path)

    def test_model_rhp_lists_instances(self, tmp_path: Path) -> None:
        assert cmd_model_rhp(RunConfig.from_mapping(_make_raw()), tmp_path) == EXIT_OK
        payload = json.loads((tmp_path / MODEL_RHP_REPORT_FILENAME).read_text(encoding="utf-8"))
        assert len(payload["instances"]) == 1
        assert payload["instances"][0]["zeta"] == pytest.approx(0.3)


class TestMain:
    def test_parser_requires_mode(self) -> None:
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_verify_model_rhp_only(self, tmp_path: Path) -> None:
        config = _write_config(tmp_path, _make_raw())
        out = tmp_path / "out"
        code = main(["verify", "--config", str(config), "--out", str(out), "--only", "model-rhp"])
        assert code == EXIT_OK
        report = json.loads((out / VERIFY_REPORT_FILENAME).read_text(encoding="utf-8"))
        assert report["failed"] == 0

    def test_malformed_config_exits_with_io_code(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        assert main(["asymptotics", "--config", str(path), "--out", str(tmp_path / "out")]) == EXIT_IO

    def test_missing_input_exits_with_io_code(self, tmp_path: Path) -> None:
        config = _write_config(tmp_path, _make_raw())
        code = main(["scatter", "--config", str(config), "--out", str(tmp_path / "out"), "--input", str(tmp_path / "nope.json")])
        assert code == EXIT_IO


def _make_scatter_raw(amplitude: float) -> dict:
    return _make_raw(
        initial_data={"preset": "gaussian", "amplitude": amplitude, "x_min": -6.0, "x_max": 6.0},
        scatter_grid={"nodes_per_arc": 4, "ray_nodes": 4, "segment_nodes": 4},
    )


def _max_circle_r1(out: Path) -> float:
    return max(abs(rec.r1) for rec in read_spectral_cache(out / CACHE_FILENAME) if rec.contour_id == "circle")


class TestExitCodes:
    def test_rerun_is_byte_identical(self, tmp_path: Path) -> None:
        config = RunConfig.from_mapping(_make_raw(zeta_interval=[0.25, 0.35], zeta_count=2, t_list=[10.0, 100.0]))
        first, second = tmp_path / "a", tmp_path / "b"
        for out in (first, second):
            out.mkdir()
            assert cmd_asymptotics(config, out) == EXIT_OK
        assert (first / RESULT_FILENAME).read_bytes() == (second / RESULT_FILENAME).read_bytes()

    def test_scatter_reflection_is_linear_in_amplitude(self, tmp_path: Path) -> None:
        peaks = []
        for amplitude in (1e-3, 2e-3):
            out = tmp_path / f"amp{amplitude:g}"
            out.mkdir()
            cmd_scatter(RunConfig.from_mapping(_make_scatter_raw(amplitude)), out)
            peaks.append(_max_circle_r1(out))
        assert peaks[1] / peaks[0] == pytest.approx(2.0, rel=1e-2)

    def test_scatter_assumption_failure(self, tmp_path: Path) -> None:
        assert cmd_scatter(RunConfig.from_mapping(_make_scatter_raw(1e-3)), tmp_path) == EXIT_ASSUMPTION
        report = json.loads((tmp_path / ASSUMPTION_REPORT_FILENAME).read_text(encoding="utf-8"))
        assert report["passed_iii"] is False
        assert report["max_r1_segment"] > report["tolerance_iii"]

    def test_defective_grid(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        def outside_sector(zetas, ts, spectral, spline_nodes, workers=1):  # type: ignore[no-untyped-def]
            return evaluate_grid([0.7 for _ in zetas], ts, spectral, spline_nodes)

        monkeypatch.setattr(cli, "evaluate_grid", outside_sector)
        assert cmd_asymptotics(RunConfig.from_mapping(_make_raw()), tmp_path) == EXIT_DEFECTS
        assert len(pd.read_csv(tmp_path / DEFECT_FILENAME)) == 1

    def test_verify_fails_on_injected_defect(self, tmp_path: Path) -> None:
        perturb = {"target": "r2", "theta_deg": DEFECT_THETA_DEG, "eps": DEFECT_EPS}
        config = _write_config(tmp_path, _make_raw(spectral={"family": "two_lobe", "perturb": perturb}))
        out = tmp_path / "out"
        code = main(["verify", "--config", str(config), "--out", str(out), "--only", "assumptions"])
        assert code == EXIT_VERIFY
        report = json.loads((out / VERIFY_REPORT_FILENAME).read_text(encoding="utf-8"))
        assert report["failed"] > 0

    def test_threads_limit_native_pools(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        calls: list[int] = []

        def record(limits: int) -> contextlib.AbstractContextManager:
            calls.append(limits)
            return contextlib.nullcontext()

        monkeypatch.setattr(cli, "threadpool_limits", record)
        config = _write_config(tmp_path, _make_raw())
        code = main(["verify", "--config", str(config), "--out", str(tmp_path / "out"), "--only", "model-rhp", "--threads", "3"])
        assert code == EXIT_OK
        assert calls == [3]
