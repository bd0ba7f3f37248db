"""Anomaly classification and event detection over tumbling trial windows.

A trial is anomalous when its similarity to the covering signature segment
falls strictly below the similarity threshold; a score equal to the
threshold is normal, since the threshold is initialized from past users
who are not anomalies themselves. An event fires for a window when the
anomaly count strictly exceeds the anomaly-count threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import EmptyInput, InvalidParams, MisalignedWindows
from .signature import SegmentedSignature, TrialExperience
from .similarity import SimilarityMeasure, SimilarityScore, similarity

#: Tolerance for "equals the minimum past score" when counting the usual
#: number of anomalies per window.
_SCORE_TOL = 1e-9


@dataclass(frozen=True)
class ThresholdState:
    """Similarity threshold, anomaly-count threshold, and the measure."""

    similarity_threshold: float
    anomaly_threshold: int
    measure: SimilarityMeasure

    def __post_init__(self):
        if self.anomaly_threshold < 1:
            raise InvalidParams("anomaly threshold must be >= 1")
        lo, hi = self.measure.score_range
        if not (lo <= self.similarity_threshold <= hi):
            raise InvalidParams(
                f"similarity threshold {self.similarity_threshold} outside "
                f"[{lo}, {hi}] for measure {self.measure.value}"
            )


@dataclass(frozen=True)
class AnomalyRecord:
    consumer_id: str
    window_id: int
    score: SimilarityScore


@dataclass(frozen=True)
class Event:
    """More anomalies than the threshold within one tumbling window.

    Carries the full window cohort (anomalous and normal trials) because
    the condition check recomputes the window's signature from everyone.
    """

    window_id: int
    anomaly_count: int
    trials: tuple[TrialExperience, ...]
    anomalies: tuple[AnomalyRecord, ...]


def window_id_of(trial: TrialExperience) -> int:
    """Index of the tumbling window containing the trial's start day."""
    return trial.series.start_day // len(trial.series)


def detect_anomaly(
    e: TrialExperience, sig: SegmentedSignature, ts: ThresholdState
) -> Optional[AnomalyRecord]:
    """Record the trial as anomalous iff its score is strictly below T_S."""
    score = similarity(e, sig, ts.measure)
    if score.value < ts.similarity_threshold:
        return AnomalyRecord(e.consumer_id, window_id_of(e), score)
    return None


def evaluate_window(
    trials: Sequence[TrialExperience], sig: SegmentedSignature, ts: ThresholdState
) -> Optional[Event]:
    """Batch-evaluate one window's cohort; fire an event on strict crossing."""
    if not trials:
        raise EmptyInput("cannot evaluate an empty window")
    ids = {window_id_of(t) for t in trials}
    if len(ids) != 1:
        raise MisalignedWindows(f"trials span multiple windows: {sorted(ids)}")
    records = []
    for t in trials:
        rec = detect_anomaly(t, sig, ts)
        if rec is not None:
            records.append(rec)
    if len(records) > ts.anomaly_threshold:
        return Event(ids.pop(), len(records), tuple(trials), tuple(records))
    return None


def init_anomaly_threshold(
    past_windows: Sequence[Sequence[TrialExperience]],
    sig: SegmentedSignature,
    similarity_threshold: float,
    measure: SimilarityMeasure,
) -> int:
    """Usual per-window count of minimum-similarity users, floor 1.

    For each past window, counts the users whose score equals the minimum
    past score (the similarity threshold) within tolerance; the largest
    such count across windows is taken as the expected number of anomalous
    looking users in a normal window.
    """
    if not past_windows or all(not w for w in past_windows):
        raise EmptyInput("need at least one window of past trials")
    worst = 0
    for window_trials in past_windows:
        count = 0
        for trial in window_trials:
            score = similarity(trial, sig, measure).value
            if abs(score - similarity_threshold) <= _SCORE_TOL:
                count += 1
        worst = max(worst, count)
    return max(1, worst)


def anomaly_threshold_from_fraction(fraction: float, cohort_size: int) -> int:
    """Convert a percentage-style anomaly threshold to a count.

    ceil(fraction * cohort), floor 1. Note that at fraction 1.0 the strict
    crossing rule means an event can never fire for a full cohort.
    """
    if not (0.0 < fraction <= 1.0):
        raise InvalidParams(f"anomaly fraction must be in (0, 1], got {fraction}")
    if cohort_size < 1:
        raise InvalidParams("cohort size must be >= 1")
    return max(1, math.ceil(fraction * cohort_size))
