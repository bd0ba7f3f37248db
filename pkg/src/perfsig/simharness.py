"""Simulation harness: synthetic providers, trial cohorts, injected
changes, and end-to-end runs of the event/condition/action pipeline.

One run simulates a single provider over the provisioning horizon: the
first tumbling window's cohort generates the initial signature (tiled
across the horizon, matching the generator's window-length seasonality)
and initializes the thresholds; every later window is evaluated for an
event, events are condition-checked with the control chart, positive
verdicts splice the recomputed segment in and feed the threshold
adaptation loop. Metrics score the verdict stream against the injected
ground truth.

Everything is driven by one root seed: each random stream is keyed by
(root seed, purpose label, index), so runs are independent of execution
order and sweeps can share trial data across threshold points.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .adaptation import (
    DEFAULT_HORIZON_DAYS,
    DEFAULT_OUTCOME_THRESHOLD,
    POLARITY_DEFAULT,
    FeedbackState,
    adjust,
    record_outcome,
)
from .cusum import DEFAULT_CONTROL_C, DEFAULT_SHIFT_N, apply_action, evaluate_event
from .detection import (
    ThresholdState,
    anomaly_threshold_from_fraction,
    evaluate_window,
)
from .errors import InsufficientData, InvalidParams, ParseError
from .signature import (
    QoSSeries,
    TrialExperience,
    Window,
    generate_signature,
    tile_signature,
)
from .similarity import SimilarityMeasure, init_similarity_threshold

AXIS_SIMILARITY = "similarity"
AXIS_ANOMALY = "anomaly"

KIND_LEVEL_SHIFT = "level-shift"
KIND_SHAPE_REGENERATE = "shape-regenerate"
KIND_NONE = "none"

CHANGE_DAY_RANDOM = "uniform-random"

# Purpose labels for seed derivation; values are arbitrary but frozen.
_STREAM_PROVIDER = 11
_STREAM_CHANGE = 23
_STREAM_TRIALS = 37

SWEEP_CSV_HEADER = "threshold,mean_fp,mean_delay,min_delay,accuracy,detected_fraction"


@dataclass(frozen=True)
class ChangeSpec:
    """What to inject into the provider's ground truth, and when."""

    change_day: int | str = CHANGE_DAY_RANDOM
    kind: str = KIND_LEVEL_SHIFT
    magnitude_sigmas: float = 2.0

    def __post_init__(self):
        if self.kind not in (KIND_LEVEL_SHIFT, KIND_SHAPE_REGENERATE, KIND_NONE):
            raise InvalidParams(f"unknown change kind {self.kind!r}")
        if isinstance(self.change_day, str) and self.change_day != CHANGE_DAY_RANDOM:
            raise InvalidParams(
                f"change_day must be an integer or {CHANGE_DAY_RANDOM!r}"
            )


@dataclass(frozen=True)
class SimConfig:
    """Experiment variables; defaults reproduce the desk-scale protocol."""

    num_runs: int = 100
    horizon_days: int = 360
    trial_days: int = 30
    num_providers: int = 5
    num_consumers: int = 18
    similarity_thresholds: tuple[float, ...] = tuple(round(0.1 * k, 1) for k in range(1, 10))
    anomaly_fractions: tuple[float, ...] = tuple(round(0.1 * k, 1) for k in range(1, 11))
    measure: SimilarityMeasure = SimilarityMeasure.PEARSON
    change: ChangeSpec = field(default_factory=ChangeSpec)
    detection_window_days: int = 60
    rng_seed: int = 12345
    # Held-axis defaults during sweeps; similarity_threshold=None derives
    # the threshold from the warm-up cohort instead of fixing it.
    similarity_threshold: Optional[float] = 0.5
    anomaly_fraction: float = 0.333
    consumer_noise_sigma: float = 0.05
    shift_n: float = DEFAULT_SHIFT_N
    control_c: float = DEFAULT_CONTROL_C
    adaptation_horizon_days: int = DEFAULT_HORIZON_DAYS
    adaptation_outcome_threshold: int = DEFAULT_OUTCOME_THRESHOLD
    adaptation_polarity: str = POLARITY_DEFAULT
    workers: int = 1
    trace_path: Optional[str] = None
    trace_has_header: bool = False
    attribute_id: str = "throughput"
    synth_base: float = 100.0
    synth_seasonal_amp: float = 0.08
    synth_weekly_amp: float = 0.04
    synth_noise_sigma: float = 0.05

    def __post_init__(self):
        if self.horizon_days % self.trial_days != 0:
            raise InvalidParams(
                f"trial length {self.trial_days} must divide horizon {self.horizon_days}"
            )
        for name in ("num_runs", "horizon_days", "trial_days", "num_providers",
                     "num_consumers", "workers"):
            if getattr(self, name) < 1:
                raise InvalidParams(f"{name} must be >= 1")
        for frac in (*self.anomaly_fractions, self.anomaly_fraction):
            if not (0.0 < frac <= 1.0):
                raise InvalidParams(f"anomaly fraction {frac} outside (0, 1]")
        if isinstance(self.change.change_day, int):
            if not (self.trial_days < self.change.change_day < self.horizon_days):
                raise InvalidParams(
                    f"change day {self.change.change_day} outside "
                    f"({self.trial_days}, {self.horizon_days})"
                )

    @property
    def num_windows(self) -> int:
        return self.horizon_days // self.trial_days


class RunThresholds(NamedTuple):
    """Threshold settings for one run; None derives T_S from warm-up."""

    similarity: Optional[float]
    anomaly_fraction: float


@dataclass(frozen=True)
class RunMetrics:
    false_positives_before_detection: int
    detection_day: Optional[int]
    detection_delay_days: Optional[int]
    detected_within_window: bool
    tests_performed: int
    ground_truth_false_alarms: int


@dataclass(frozen=True)
class RunResult:
    """One run's metrics plus the event/verdict log for persistence."""

    run_id: int
    seed: int
    change_day: Optional[int]
    metrics: RunMetrics
    events: tuple[dict, ...]
    verdicts: tuple[dict, ...]

    def to_log_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "seed": self.seed,
            "change_day": self.change_day,
            "detection_day": self.metrics.detection_day,
            "false_positives": self.metrics.false_positives_before_detection,
            "tests": self.metrics.tests_performed,
            "false_alarms": self.metrics.ground_truth_false_alarms,
            "events": list(self.events),
            "verdicts": list(self.verdicts),
        }


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    mean_fp: float
    mean_delay: float
    min_delay: float
    accuracy: float
    detected_fraction: float


@dataclass(frozen=True)
class SweepReport:
    axis: str
    rows: tuple[SweepRow, ...]


def _stream_rng(root_seed: int, label: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((root_seed, label, index)))


def _stream_seed(root_seed: int, label: int, index: int) -> int:
    return int(np.random.SeedSequence((root_seed, label, index)).generate_state(1)[0])


def load_trace(path: str, horizon_days: int, has_header: bool = False) -> QoSSeries:
    """Load a single-column CSV of raw samples as a day-averaged series.

    The rows are partitioned into horizon_days equal chunks (trailing
    remainder rows are dropped) and each chunk is averaged into one day.
    """
    rows: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if has_header and lineno == 1:
                continue
            if len(row) != 1:
                raise ParseError(f"{path}:{lineno}: expected one column, got {len(row)}")
            try:
                rows.append(float(row[0]))
            except ValueError:
                raise ParseError(f"{path}:{lineno}: not a number: {row[0]!r}")
    if len(rows) < horizon_days:
        raise InsufficientData(
            f"{path}: {len(rows)} rows < horizon of {horizon_days} days"
        )
    chunk = len(rows) // horizon_days
    data = np.asarray(rows[: chunk * horizon_days], dtype=np.float64)
    days = data.reshape(horizon_days, chunk).mean(axis=1)
    return QoSSeries("trace", 0, days)


def synth_provider(
    seed,
    horizon_days: int,
    base: float = 100.0,
    seasonal_amp: float = 0.08,
    weekly_amp: float = 0.04,
    noise_sigma: float = 0.05,
    attribute_id: str = "throughput",
) -> QoSSeries:
    """Deterministic synthetic provider series.

    Day t is base * (1 + seasonal + weekly + noise): a sinusoid with a
    30-day period, a sinusoid with a 7-day period (both with seed-drawn
    phases) and white Gaussian noise. Amplitudes are relative to base.
    """
    rng = np.random.default_rng(seed)
    seasonal_phase = rng.uniform(0.0, 2.0 * np.pi)
    weekly_phase = rng.uniform(0.0, 2.0 * np.pi)
    noise = rng.normal(0.0, noise_sigma, horizon_days)
    t = np.arange(horizon_days, dtype=np.float64)
    rel = (
        seasonal_amp * np.sin(2.0 * np.pi * t / 30.0 + seasonal_phase)
        + weekly_amp * np.sin(2.0 * np.pi * t / 7.0 + weekly_phase)
        + noise
    )
    return QoSSeries(attribute_id, 0, base * (1.0 + rel))


def inject_change(
    truth: QoSSeries,
    spec: ChangeSpec,
    rng: np.random.Generator,
    trial_days: int = 30,
    synth_kwargs: Optional[dict] = None,
) -> tuple[QoSSeries, Optional[int]]:
    """Apply the configured ground-truth change; returns (series, day).

    Level shifts add magnitude_sigmas times the pre-change population std
    to every day from the change day on; shape regeneration replaces the
    tail with a freshly drawn provider series. Kind "none" returns the
    input untouched.
    """
    if spec.kind == KIND_NONE:
        return truth, None
    horizon = len(truth)
    if spec.change_day == CHANGE_DAY_RANDOM:
        day = int(rng.integers(trial_days + 1, horizon))
    else:
        day = int(spec.change_day)
        if not (trial_days < day < horizon):
            raise InvalidParams(f"change day {day} outside ({trial_days}, {horizon})")
    values = np.array(truth.values)
    if spec.kind == KIND_LEVEL_SHIFT:
        pre = values[:day]
        sigma = float(np.sqrt(np.mean((pre - pre.mean()) ** 2)))
        values[day:] += spec.magnitude_sigmas * sigma
    else:
        fresh = synth_provider(
            int(rng.integers(0, 2**63)), horizon, **(synth_kwargs or {})
        )
        values[day:] = fresh.values[day:]
    return QoSSeries(truth.attribute_id, truth.start_day, values), day


def schedule_trials(
    cfg: SimConfig, provider_truth: QoSSeries, rng: np.random.Generator
) -> list[list[TrialExperience]]:
    """Full-cohort trial schedule: every window gets every consumer.

    Each trial observes the ground-truth day values of its window with
    per-consumer, per-day multiplicative Gaussian noise.
    """
    cohorts: list[list[TrialExperience]] = []
    for w in range(cfg.num_windows):
        start = w * cfg.trial_days
        segment = provider_truth.values[start : start + cfg.trial_days]
        noise = rng.normal(
            0.0, cfg.consumer_noise_sigma, size=(cfg.num_consumers, cfg.trial_days)
        )
        cohort = [
            TrialExperience(
                f"c{i:02d}",
                QoSSeries(cfg.attribute_id, start, segment * (1.0 + noise[i])),
            )
            for i in range(cfg.num_consumers)
        ]
        cohorts.append(cohort)
    return cohorts


def _provider_truth(cfg: SimConfig, profile: int) -> QoSSeries:
    if cfg.trace_path is not None:
        return load_trace(cfg.trace_path, cfg.horizon_days, cfg.trace_has_header)
    return synth_provider(
        _stream_seed(cfg.rng_seed, _STREAM_PROVIDER, profile),
        cfg.horizon_days,
        base=cfg.synth_base,
        seasonal_amp=cfg.synth_seasonal_amp,
        weekly_amp=cfg.synth_weekly_amp,
        noise_sigma=cfg.synth_noise_sigma,
        attribute_id=cfg.attribute_id,
    )


def run_once(cfg: SimConfig, thresholds: RunThresholds, run_id: int) -> RunResult:
    """Execute one full provisioning-horizon simulation.

    The random streams (provider profile, change placement, trial noise)
    are keyed by purpose and run id only, never by thresholds, so sweeps
    evaluate identical data at every threshold point.
    """
    truth = _provider_truth(cfg, run_id % cfg.num_providers)
    truth, change_day = inject_change(
        truth,
        cfg.change,
        _stream_rng(cfg.rng_seed, _STREAM_CHANGE, run_id),
        cfg.trial_days,
        synth_kwargs={
            "base": cfg.synth_base,
            "seasonal_amp": cfg.synth_seasonal_amp,
            "weekly_amp": cfg.synth_weekly_amp,
            "noise_sigma": cfg.synth_noise_sigma,
            "attribute_id": cfg.attribute_id,
        },
    )
    cohorts = schedule_trials(
        cfg, truth, _stream_rng(cfg.rng_seed, _STREAM_TRIALS, run_id)
    )

    warmup = cohorts[0]
    base_segment = generate_signature(warmup, Window(0, cfg.trial_days))
    sig = tile_signature(base_segment, cfg.horizon_days)

    if thresholds.similarity is None:
        t_s = init_similarity_threshold(warmup, sig, cfg.measure)
    else:
        t_s = thresholds.similarity
    ts = ThresholdState(
        t_s,
        anomaly_threshold_from_fraction(thresholds.anomaly_fraction, cfg.num_consumers),
        cfg.measure,
    )
    fb = FeedbackState(cfg.adaptation_horizon_days, cfg.adaptation_outcome_threshold)

    change_window = None if change_day is None else change_day // cfg.trial_days
    detection_day: Optional[int] = None
    fp_before = 0
    tests = 0
    false_alarms = 0
    events_log: list[dict] = []
    verdicts_log: list[dict] = []

    for w in range(1, cfg.num_windows):
        window = Window(w * cfg.trial_days, (w + 1) * cfg.trial_days)
        event = evaluate_window(cohorts[w], sig, ts)
        if event is None:
            continue
        events_log.append(
            {
                "window_id": w,
                "anomaly_count": event.anomaly_count,
                "consumer_ids": [r.consumer_id for r in event.anomalies],
            }
        )
        verdict = evaluate_event(event, sig, event.trials, cfg.shift_n, cfg.control_c)
        tests += 1
        verdicts_log.append(verdict.to_log_dict())
        if verdict.changed:
            sig = apply_action(sig, verdict, window)
            if change_window is not None and w >= change_window:
                if detection_day is None:
                    detection_day = window.stop
            else:
                false_alarms += 1
        elif detection_day is None:
            fp_before += 1
        fb = record_outcome(fb, window.stop, verdict.changed)
        ts = adjust(fb, ts, cfg.adaptation_polarity)

    delay = None if detection_day is None or change_day is None else detection_day - change_day
    metrics = RunMetrics(
        false_positives_before_detection=fp_before,
        detection_day=detection_day,
        detection_delay_days=delay,
        detected_within_window=delay is not None and delay <= cfg.detection_window_days,
        tests_performed=tests,
        ground_truth_false_alarms=false_alarms,
    )
    return RunResult(
        run_id=run_id,
        seed=_stream_seed(cfg.rng_seed, _STREAM_TRIALS, run_id),
        change_day=change_day,
        metrics=metrics,
        events=tuple(events_log),
        verdicts=tuple(verdicts_log),
    )


def _run_task(args: tuple[SimConfig, RunThresholds, int]) -> RunResult:
    return run_once(*args)


def run_batch(
    cfg: SimConfig, thresholds: RunThresholds, run_ids: Sequence[int]
) -> list[RunResult]:
    """Run many simulations; parallel when cfg.workers > 1.

    Results are ordered by run id regardless of worker scheduling, so the
    output is identical for any worker count.
    """
    tasks = [(cfg, thresholds, rid) for rid in run_ids]
    if cfg.workers == 1 or len(tasks) <= 1:
        return [run_once(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * cfg.workers))))


def aggregate_results(threshold: float, results: Sequence[RunResult]) -> SweepRow:
    """Collapse per-run metrics into one sweep row.

    Delay statistics cover detected runs only; the non-detection rate is
    visible separately through detected_fraction.
    """
    fp = [r.metrics.false_positives_before_detection for r in results]
    delays = [
        r.metrics.detection_delay_days
        for r in results
        if r.metrics.detection_day is not None
    ]
    return SweepRow(
        threshold=threshold,
        mean_fp=float(np.mean(fp)),
        mean_delay=float(np.mean(delays)) if delays else math.nan,
        min_delay=float(min(delays)) if delays else math.nan,
        accuracy=float(np.mean([r.metrics.detected_within_window for r in results])),
        detected_fraction=float(
            np.mean([r.metrics.detection_day is not None for r in results])
        ),
    )


def sweep_axis(cfg: SimConfig, axis: str) -> SweepReport:
    """Aggregate num_runs runs per threshold value along one axis.

    The other axis is held at the config default.
    """
    if axis == AXIS_SIMILARITY:
        values = cfg.similarity_thresholds
    elif axis == AXIS_ANOMALY:
        values = cfg.anomaly_fractions
    else:
        raise InvalidParams(f"unknown sweep axis {axis!r}")
    rows = []
    for value in values:
        if axis == AXIS_SIMILARITY:
            thresholds = RunThresholds(value, cfg.anomaly_fraction)
        else:
            thresholds = RunThresholds(cfg.similarity_threshold, value)
        results = run_batch(cfg, thresholds, range(cfg.num_runs))
        rows.append(aggregate_results(value, results))
    return SweepReport(axis=axis, rows=tuple(rows))


def sweep(cfg: SimConfig) -> list[SweepReport]:
    """Both threshold sweeps, similarity axis first."""
    return [sweep_axis(cfg, AXIS_SIMILARITY), sweep_axis(cfg, AXIS_ANOMALY)]


def _fmt(value: float) -> str:
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return "%.10g" % value


def sweep_report_to_csv(report: SweepReport) -> str:
    """Render a sweep report as the plot-ready CSV."""
    out = io.StringIO()
    out.write(SWEEP_CSV_HEADER + "\n")
    for row in report.rows:
        out.write(
            ",".join(
                _fmt(v)
                for v in (
                    row.threshold,
                    row.mean_fp,
                    row.mean_delay,
                    row.min_delay,
                    row.accuracy,
                    row.detected_fraction,
                )
            )
            + "\n"
        )
    return out.getvalue()
