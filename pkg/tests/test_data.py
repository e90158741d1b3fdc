"""Tests for initial-data presets, JSON ingestion and the spectral cache."""

import json
import math

import numpy as np
import pytest

from boussinesq_asymptotics.data import (
    CacheRecord,
    gaussian_data,
    initial_data_from_mapping,
    load_initial_data,
    parse_json_text,
    read_spectral_cache,
    sech2_data,
    table_data,
    tabulated_from_cache,
    write_json_atomic,
    write_spectral_cache,
    zero_data,
)
from boussinesq_asymptotics.errors import InitialDataError


def _make_records(n: int = 8, seed: int = 42) -> list[CacheRecord]:
    rng = np.random.default_rng(seed)
    records = []
    theta = np.sort(rng.uniform(0.05, 1.0, n))
    for th in theta:
        r1 = complex(rng.normal(), rng.normal()) * 0.1
        r2 = complex(rng.normal(), rng.normal()) * 0.1
        records.append(CacheRecord("circle", complex(math.cos(th), math.sin(th)), r1, r2))
    records.append(CacheRecord("ray_minus_i", -1.5j, 0.01 + 0.02j, 0j))
    records.append(CacheRecord("segment_minus_i", -0.5j, 0j, -0.03 + 0.001j))
    return records


class TestPresets:
    def test_zero_data(self) -> None:
        data = zero_data()
        xs = np.linspace(-3.0, 3.0, 7)
        np.testing.assert_allclose(data.u0(xs), 0.0)
        np.testing.assert_allclose(data.v0(xs), 0.0)
        data.check()

    def test_gaussian_derivative(self) -> None:
        data = gaussian_data(amplitude=0.4, width=1.5)
        h = 1e-5
        for x in (-1.0, 0.2, 2.0):
            fd = (data.u0(x + h) - data.u0(x - h)) / (2 * h)
            assert data.u0x(x) == pytest.approx(fd, abs=1e-8)

    def test_sech2_derivative(self) -> None:
        data = sech2_data(amplitude=0.3, width=0.8)
        h = 1e-5
        for x in (-0.7, 0.0, 1.3):
            fd = (data.u0(x + h) - data.u0(x - h)) / (2 * h)
            assert data.u0x(x) == pytest.approx(fd, abs=1e-8)

    def test_scaled_profile(self) -> None:
        data = gaussian_data()
        small = data.scaled(1e-3)
        assert small.u0(0.0) == pytest.approx(1e-3 * data.u0(0.0))
        assert small.v0(0.5) == pytest.approx(1e-3 * data.v0(0.5))
        assert small.x_min == data.x_min

    def test_empty_support_rejected(self) -> None:
        with pytest.raises(InitialDataError):
            zero_data(x_min=1.0, x_max=1.0).check()

    def test_nonzero_mass_rejected(self) -> None:
        # int u1 dx = v0(x_max) - v0(x_min) != 0
        x = np.linspace(-5.0, 5.0, 11)
        data = table_data(x, np.zeros_like(x), np.ones_like(x))
        with pytest.raises(InitialDataError):
            data.check()


class TestTableData:
    def test_interpolates_and_vanishes_outside(self) -> None:
        x = np.linspace(-4.0, 4.0, 41)
        u0 = np.exp(-(x**2))
        data = table_data(x, u0, np.zeros_like(x))
        assert data.u0(0.0) == pytest.approx(1.0, abs=1e-12)
        assert data.u0(0.1) == pytest.approx(math.exp(-0.01), abs=1e-3)
        assert data.u0(10.0) == 0.0
        assert data.x_min == -4.0 and data.x_max == 4.0

    def test_requires_increasing_nodes(self) -> None:
        with pytest.raises(InitialDataError):
            table_data([0.0, 1.0, 1.0, 2.0], [0, 0, 0, 0], [0, 0, 0, 0])


class TestJsonIngestion:
    def test_from_mapping(self) -> None:
        data = initial_data_from_mapping({"preset": "gaussian", "amplitude": 0.2, "x_min": -8, "x_max": 8})
        assert data.name == "gaussian"
        assert data.params["amplitude"] == 0.2
        assert data.x_max == 8.0

    def test_unknown_preset(self) -> None:
        with pytest.raises(InitialDataError):
            initial_data_from_mapping({"preset": "kdv"})

    def test_table_missing_column(self) -> None:
        with pytest.raises(InitialDataError, match="u1"):
            initial_data_from_mapping({"preset": "table", "x": [0, 1, 2, 3], "u0": [0, 0, 0, 0]})

    def test_malformed_json_reports_byte_offset(self) -> None:
        text = '{"preset": zero}'
        with pytest.raises(InitialDataError, match="byte offset 11"):
            parse_json_text(text, "input.json")

    def test_byte_offset_counts_utf8(self) -> None:
        text = '{"name": "é", oops}'
        with pytest.raises(InitialDataError, match="byte offset 15"):
            parse_json_text(text, "input.json")

    def test_load_from_file(self, tmp_path) -> None:
        path = tmp_path / "data.json"
        path.write_text(json.dumps({"preset": "sech2", "width": 2.0}), encoding="utf-8")
        data = load_initial_data(path)
        assert data.name == "sech2"
        assert data.params["width"] == 2.0

    def test_non_object_rejected(self, tmp_path) -> None:
        path = tmp_path / "data.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(InitialDataError):
            load_initial_data(path)


class TestSpectralCache:
    def test_atomic_write_leaves_no_temporaries(self, tmp_path) -> None:
        path = tmp_path / "nested" / "out.json"
        write_json_atomic(path, {"b": 1, "a": [1.5, 2.5]})
        assert json.loads(path.read_text(encoding="utf-8")) == {"a": [1.5, 2.5], "b": 1}
        assert [p.name for p in path.parent.iterdir()] == ["out.json"]

    def test_nan_is_rejected(self, tmp_path) -> None:
        with pytest.raises(ValueError):
            write_json_atomic(tmp_path / "bad.json", {"x": float("nan")})
        assert list(tmp_path.iterdir()) == []

    def test_round_trip_is_bit_exact(self, tmp_path) -> None:
        records = _make_records()
        path = tmp_path / "cache.json"
        write_spectral_cache(path, records, meta={"version": "1"})
        assert read_spectral_cache(path) == records

    def test_unknown_contour_rejected(self) -> None:
        item = CacheRecord("circle", 1j, 0j, 0j).to_json()
        item["contour_id"] = "ray_plus_i"
        with pytest.raises(InitialDataError):
            CacheRecord.from_json(item)

    def test_malformed_cache(self, tmp_path) -> None:
        path = tmp_path / "cache.json"
        path.write_text('{"meta": {}}', encoding="utf-8")
        with pytest.raises(InitialDataError):
            read_spectral_cache(path)

    def test_tabulated_from_cache(self) -> None:
        records = _make_records()
        data = tabulated_from_cache(records)
        assert data.mode == "from_initial_data"
