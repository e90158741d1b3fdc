"""Tests for configuration module."""

import math

from boussinesq_asymptotics.config import (
    DEFAULT_T_LIST,
    DEFAULT_X_SUPPORT,
    DEFAULT_ZETA_INTERVAL,
    EPSILON_SCHEDULE,
    LIMIT_SAMPLE_STEPS,
    PCF_CROSSOVER,
    PCF_OVERLAP,
    RESULT_COLUMNS,
    SEGMENT_MIN_MODULUS,
    T_MIN,
    TWO_LOBE_AMPLITUDES,
    TWO_LOBE_SUPPORT_DEG,
    VERIFY_CIRCLE_DEG,
    VERIFY_T_LIST,
    VERIFY_ZETAS,
    ZETA_MAX,
)


class TestSectorConfig:
    def test_zeta_max(self) -> None:
        assert math.isclose(ZETA_MAX, 1.0 / math.sqrt(3.0))

    def test_default_interval_inside_sector(self) -> None:
        lo, hi = DEFAULT_ZETA_INTERVAL
        assert 0.0 < lo < hi < ZETA_MAX

    def test_verification_zetas_inside_sector(self) -> None:
        assert all(0.0 < z < ZETA_MAX for z in VERIFY_ZETAS)

    def test_times_above_minimum(self) -> None:
        assert all(t >= T_MIN for t in DEFAULT_T_LIST)
        assert all(t >= T_MIN for t in VERIFY_T_LIST)


class TestNumericalConfig:
    def test_limit_steps_halve(self) -> None:
        """Richardson extrapolation assumes steps 4h, 2h, h."""
        a, b, c = LIMIT_SAMPLE_STEPS
        assert math.isclose(a, 2 * b) and math.isclose(b, 2 * c)

    def test_epsilon_schedule_decreasing(self) -> None:
        assert list(EPSILON_SCHEDULE) == sorted(EPSILON_SCHEDULE, reverse=True)

    def test_pcf_crossover_inside_overlap(self) -> None:
        lo, hi = PCF_OVERLAP
        assert lo < PCF_CROSSOVER < hi

    def test_segment_bound(self) -> None:
        assert 0.0 < SEGMENT_MIN_MODULUS < 1.0

    def test_support_ordered(self) -> None:
        assert DEFAULT_X_SUPPORT[0] < DEFAULT_X_SUPPORT[1]

    def test_verification_angles_avoid_sixth_roots(self) -> None:
        for deg in VERIFY_CIRCLE_DEG:
            assert abs((deg + 30.0) % 60.0 - 30.0) > 1.0


class TestFamilyConfig:
    def test_two_lobe_shapes(self) -> None:
        assert len(TWO_LOBE_SUPPORT_DEG) == len(TWO_LOBE_AMPLITUDES)
        for lo, hi in TWO_LOBE_SUPPORT_DEG:
            assert lo < hi
        assert all(0.0 < a < 1.0 for a in TWO_LOBE_AMPLITUDES)

    def test_result_columns_unique(self) -> None:
        assert len(RESULT_COLUMNS) == len(set(RESULT_COLUMNS))
        assert RESULT_COLUMNS[:3] == ("zeta", "t", "x")
