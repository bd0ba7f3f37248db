"""Simulation harness: trace loading, synthesis, scheduling, injection,
single runs and sweeps."""

import numpy as np
import pytest

from perfsig.errors import InsufficientData, InvalidParams, ParseError
from perfsig.simharness import (
    AXIS_ANOMALY,
    AXIS_SIMILARITY,
    CHANGE_DAY_RANDOM,
    KIND_LEVEL_SHIFT,
    KIND_NONE,
    KIND_SHAPE_REGENERATE,
    ChangeSpec,
    RunThresholds,
    SimConfig,
    inject_change,
    load_trace,
    run_once,
    schedule_trials,
    sweep_axis,
    sweep_report_to_csv,
    synth_provider,
)


def small_config(**overrides):
    defaults = dict(
        num_runs=4,
        horizon_days=180,
        trial_days=30,
        num_providers=2,
        num_consumers=8,
        rng_seed=99,
        similarity_thresholds=(0.3, 0.6, 0.9),
        anomaly_fractions=(0.25, 0.5, 1.0),
    )
    defaults.update(overrides)
    return SimConfig(**defaults)


class TestLoadTrace:
    def _write(self, tmp_path, lines, name="trace.csv"):
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n")
        return str(path)

    def test_chunk_averaging(self, tmp_path):
        path = self._write(tmp_path, [str(v) for v in range(720)])
        series = load_trace(path, horizon_days=360)
        assert len(series) == 360
        # Each day is the mean of two consecutive rows.
        np.testing.assert_allclose(series.values[:3], [0.5, 2.5, 4.5])

    def test_identity_partition(self, tmp_path):
        path = self._write(tmp_path, [str(v) for v in range(360)])
        series = load_trace(path, horizon_days=360)
        np.testing.assert_array_equal(series.values, np.arange(360.0))

    def test_insufficient_rows(self, tmp_path):
        path = self._write(tmp_path, [str(v) for v in range(359)])
        with pytest.raises(InsufficientData):
            load_trace(path, horizon_days=360)

    def test_header_skipped_when_flagged(self, tmp_path):
        path = self._write(tmp_path, ["value"] + [str(v) for v in range(360)])
        series = load_trace(path, horizon_days=360, has_header=True)
        assert len(series) == 360

    def test_non_numeric_row(self, tmp_path):
        path = self._write(tmp_path, ["1.0", "oops", "3.0"])
        with pytest.raises(ParseError, match="oops"):
            load_trace(path, horizon_days=3)

    def test_multi_column_rejected(self, tmp_path):
        path = self._write(tmp_path, ["1.0,2.0"])
        with pytest.raises(ParseError):
            load_trace(path, horizon_days=1)


class TestSynthProvider:
    def test_same_seed_identical(self):
        a = synth_provider(42, 360)
        b = synth_provider(42, 360)
        np.testing.assert_array_equal(a.values, b.values)

    def test_different_seeds_differ(self):
        a = synth_provider(42, 360)
        b = synth_provider(43, 360)
        assert np.any(a.values != b.values)

    def test_seasonal_amplitude_recoverable(self):
        # Least-squares fit of a 30-day sinusoid on the relative series
        # should recover the configured amplitude within 10%.
        base, amp = 100.0, 0.08
        series = synth_provider(7, 360, base=base, seasonal_amp=amp)
        rel = series.values / base - 1.0
        t = np.arange(360)
        design = np.column_stack(
            [np.sin(2 * np.pi * t / 30), np.cos(2 * np.pi * t / 30), np.ones(360)]
        )
        coef, *_ = np.linalg.lstsq(design, rel, rcond=None)
        fitted = float(np.hypot(coef[0], coef[1]))
        assert fitted == pytest.approx(amp, rel=0.10)

    def test_positive_values(self):
        series = synth_provider(5, 360)
        assert np.all(series.values > 0)


class TestScheduleTrials:
    def test_counts(self):
        cfg = small_config()
        truth = synth_provider(1, cfg.horizon_days)
        cohorts = schedule_trials(cfg, truth, np.random.default_rng(0))
        assert len(cohorts) == 6
        assert all(len(c) == 8 for c in cohorts)
        assert sum(len(c) for c in cohorts) == 48

    def test_zero_noise_reproduces_truth(self):
        cfg = small_config(consumer_noise_sigma=0.0)
        truth = synth_provider(1, cfg.horizon_days)
        cohorts = schedule_trials(cfg, truth, np.random.default_rng(0))
        for w, cohort in enumerate(cohorts):
            segment = truth.values[w * 30 : (w + 1) * 30]
            for trial in cohort:
                np.testing.assert_array_equal(trial.series.values, segment)
                assert trial.series.start_day == w * 30

    def test_noise_spreads_consumers(self):
        cfg = small_config()
        truth = synth_provider(1, cfg.horizon_days)
        cohorts = schedule_trials(cfg, truth, np.random.default_rng(0))
        first = cohorts[0]
        assert np.any(first[0].series.values != first[1].series.values)


class TestInjectChange:
    def test_zero_magnitude_is_identity(self):
        truth = synth_provider(3, 360)
        spec = ChangeSpec(change_day=100, kind=KIND_LEVEL_SHIFT, magnitude_sigmas=0.0)
        out, day = inject_change(truth, spec, np.random.default_rng(0))
        assert day == 100
        np.testing.assert_array_equal(out.values, truth.values)

    def test_level_shift_magnitude(self):
        truth = synth_provider(3, 360)
        spec = ChangeSpec(change_day=180, kind=KIND_LEVEL_SHIFT, magnitude_sigmas=2.0)
        out, day = inject_change(truth, spec, np.random.default_rng(0))
        pre = truth.values[:180]
        sigma = float(np.std(pre))
        jump = float(np.mean(out.values[180:]) - np.mean(truth.values[180:]))
        assert jump == pytest.approx(2.0 * sigma, rel=0.05)
        np.testing.assert_array_equal(out.values[:180], truth.values[:180])

    def test_boundary_last_day(self):
        truth = synth_provider(3, 360)
        spec = ChangeSpec(change_day=359, kind=KIND_LEVEL_SHIFT, magnitude_sigmas=1.0)
        out, _ = inject_change(truth, spec, np.random.default_rng(0))
        assert np.array_equal(out.values[:359], truth.values[:359])
        assert out.values[359] != truth.values[359]

    def test_shape_regenerate_changes_tail_only(self):
        truth = synth_provider(3, 360)
        spec = ChangeSpec(change_day=200, kind=KIND_SHAPE_REGENERATE)
        out, _ = inject_change(truth, spec, np.random.default_rng(0))
        np.testing.assert_array_equal(out.values[:200], truth.values[:200])
        assert np.any(out.values[200:] != truth.values[200:])

    def test_none_kind(self):
        truth = synth_provider(3, 360)
        out, day = inject_change(truth, ChangeSpec(kind=KIND_NONE), np.random.default_rng(0))
        assert day is None
        assert out is truth

    def test_random_day_in_open_interval(self):
        truth = synth_provider(3, 360)
        spec = ChangeSpec(change_day=CHANGE_DAY_RANDOM)
        days = {
            inject_change(truth, spec, np.random.default_rng(s), trial_days=30)[1]
            for s in range(50)
        }
        assert all(30 < d < 360 for d in days)
        assert len(days) > 10

    def test_invalid_fixed_day(self):
        truth = synth_provider(3, 360)
        with pytest.raises(InvalidParams):
            inject_change(
                truth, ChangeSpec(change_day=10), np.random.default_rng(0), trial_days=30
            )


class TestRunOnce:
    def test_no_change_zero_noise_is_silent(self):
        cfg = small_config(
            consumer_noise_sigma=0.0, change=ChangeSpec(kind=KIND_NONE)
        )
        result = run_once(cfg, RunThresholds(0.9, 1.0), 0)
        assert result.metrics.tests_performed == 0
        assert result.metrics.false_positives_before_detection == 0
        assert result.metrics.ground_truth_false_alarms == 0
        assert result.metrics.detection_day is None
        assert result.metrics.detected_within_window is False

    def test_determinism(self):
        cfg = small_config()
        a = run_once(cfg, RunThresholds(0.5, 0.25), 1)
        b = run_once(cfg, RunThresholds(0.5, 0.25), 1)
        assert a == b

    def test_deterministic_world_is_silent_for_any_threshold(self):
        # No noise anywhere and no weekly drift: every window repeats the
        # warm-up shape exactly, so nothing ever deviates.
        cfg = small_config(
            consumer_noise_sigma=0.0,
            synth_noise_sigma=0.0,
            synth_weekly_amp=0.0,
            change=ChangeSpec(kind=KIND_NONE),
        )
        for fraction in (0.1, 0.5, 1.0):
            result = run_once(cfg, RunThresholds(0.95, fraction), 0)
            assert result.metrics.tests_performed == 0
            assert result.metrics.false_positives_before_detection == 0
            assert result.metrics.ground_truth_false_alarms == 0

    def test_big_shift_detected_promptly(self):
        cfg = small_config(
            change=ChangeSpec(change_day=95, kind=KIND_LEVEL_SHIFT, magnitude_sigmas=5.0)
        )
        result = run_once(cfg, RunThresholds(0.9, 0.2), 0)
        # Change lands in window 3 (days 90..120); detection by the close
        # of that window or the next.
        assert result.metrics.detection_day in (120, 150)
        assert result.metrics.detection_delay_days == result.metrics.detection_day - 95
        assert result.metrics.detected_within_window is True

    def test_metrics_cross_check_from_verdicts(self):
        cfg = small_config(
            change=ChangeSpec(change_day=95, kind=KIND_LEVEL_SHIFT, magnitude_sigmas=5.0)
        )
        result = run_once(cfg, RunThresholds(0.9, 0.2), 2)
        change_window = 95 // 30
        first_detection = None
        fp = 0
        alarms = 0
        for v in result.verdicts:
            if v["changed"] and v["window_id"] >= change_window and first_detection is None:
                first_detection = (v["window_id"] + 1) * 30
            elif v["changed"] and v["window_id"] < change_window:
                alarms += 1
            elif not v["changed"] and first_detection is None:
                fp += 1
        assert result.metrics.detection_day == first_detection
        assert result.metrics.false_positives_before_detection == fp
        assert result.metrics.ground_truth_false_alarms == alarms
        assert result.metrics.tests_performed == len(result.verdicts)

    def test_auto_similarity_threshold(self):
        cfg = small_config()
        result = run_once(cfg, RunThresholds(None, 0.25), 0)
        assert result.metrics.tests_performed >= 0  # pipeline ran end to end


class TestSweep:
    def test_single_run_aggregation_identity(self):
        cfg = small_config(num_runs=1, change=ChangeSpec(change_day=95, magnitude_sigmas=5.0))
        report = sweep_axis(cfg, AXIS_SIMILARITY)
        run = run_once(cfg, RunThresholds(0.9, cfg.anomaly_fraction), 0)
        row = report.rows[-1]
        assert row.threshold == 0.9
        assert row.mean_fp == run.metrics.false_positives_before_detection
        assert row.accuracy == float(run.metrics.detected_within_window)
        if run.metrics.detection_delay_days is not None:
            assert row.mean_delay == run.metrics.detection_delay_days
            assert row.min_delay == run.metrics.detection_delay_days

    def test_rows_ordered_by_threshold(self):
        cfg = small_config(num_runs=2)
        report = sweep_axis(cfg, AXIS_ANOMALY)
        values = [r.threshold for r in report.rows]
        assert values == sorted(values) == [0.25, 0.5, 1.0]

    def test_unknown_axis(self):
        with pytest.raises(InvalidParams):
            sweep_axis(small_config(), "sideways")

    def test_sweep_covers_both_axes(self):
        from perfsig.simharness import sweep

        cfg = small_config(
            num_runs=1,
            similarity_thresholds=(0.5,),
            anomaly_fractions=(0.5,),
        )
        reports = sweep(cfg)
        assert [r.axis for r in reports] == [AXIS_SIMILARITY, AXIS_ANOMALY]

    def test_parallel_equals_serial(self):
        serial = small_config(workers=1)
        parallel = small_config(workers=2)
        a = sweep_report_to_csv(sweep_axis(serial, AXIS_SIMILARITY))
        b = sweep_report_to_csv(sweep_axis(parallel, AXIS_SIMILARITY))
        assert a == b

    def test_csv_shape(self):
        cfg = small_config(num_runs=1)
        text = sweep_report_to_csv(sweep_axis(cfg, AXIS_SIMILARITY))
        lines = text.strip().split("\n")
        assert lines[0] == "threshold,mean_fp,mean_delay,min_delay,accuracy,detected_fraction"
        assert len(lines) == 1 + 3

    def test_no_detection_rows_use_nan(self):
        cfg = small_config(num_runs=1, change=ChangeSpec(kind=KIND_NONE))
        report = sweep_axis(cfg, AXIS_SIMILARITY)
        text = sweep_report_to_csv(report)
        assert ",nan,nan," in text.split("\n")[1]


class TestConfigValidation:
    def test_trial_days_must_divide_horizon(self):
        with pytest.raises(InvalidParams):
            SimConfig(horizon_days=100, trial_days=30)

    def test_change_day_must_be_inside_horizon(self):
        with pytest.raises(InvalidParams):
            SimConfig(change=ChangeSpec(change_day=10))

    def test_bad_fraction(self):
        with pytest.raises(InvalidParams):
            SimConfig(anomaly_fraction=0.0)

    def test_unknown_change_kind(self):
        with pytest.raises(InvalidParams):
            ChangeSpec(kind="teleport")
