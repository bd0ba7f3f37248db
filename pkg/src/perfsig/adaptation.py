"""Self-adjustment of the anomaly-count threshold from verdict outcomes.

Condition-check outcomes are fed back to event detection: when true
positives within the trailing horizon exceed the outcome threshold the
anomaly-count threshold steps down by one (changes were real, so events
should fire sooner); when false positives exceed it the threshold steps
up by one (events are firing on noise). The opposite polarity is kept
available behind a switch for experimentation.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .detection import ThresholdState
from .errors import InvalidParams, NonMonotoneTime

POLARITY_DEFAULT = "tp-decrements"
POLARITY_REVERSED = "tp-increments"
DEFAULT_HORIZON_DAYS = 60
DEFAULT_OUTCOME_THRESHOLD = 3


@dataclass(frozen=True)
class FeedbackState:
    """Trailing verdict outcomes within the adjustment horizon."""

    horizon_days: int = DEFAULT_HORIZON_DAYS
    outcome_threshold: int = DEFAULT_OUTCOME_THRESHOLD
    outcomes: tuple[tuple[int, bool], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.horizon_days < 1 or self.outcome_threshold < 1:
            raise InvalidParams("horizon and outcome threshold must be >= 1")

    @property
    def true_positives(self) -> int:
        return sum(1 for _, changed in self.outcomes if changed)

    @property
    def false_positives(self) -> int:
        return sum(1 for _, changed in self.outcomes if not changed)


def record_outcome(state: FeedbackState, day: int, changed: bool) -> FeedbackState:
    """Append one verdict outcome and evict entries past the horizon."""
    if state.outcomes and day < state.outcomes[-1][0]:
        raise NonMonotoneTime(
            f"day {day} precedes last recorded day {state.outcomes[-1][0]}"
        )
    cutoff = day - state.horizon_days
    kept = tuple((d, c) for d, c in state.outcomes if d >= cutoff)
    return dataclasses.replace(state, outcomes=kept + ((day, changed),))


def adjust(
    state: FeedbackState, ts: ThresholdState, polarity: str = POLARITY_DEFAULT
) -> ThresholdState:
    """Step the anomaly-count threshold by at most one unit.

    True positives win when both counts exceed the outcome threshold:
    missing a real change costs more than running an extra test.
    """
    if polarity not in (POLARITY_DEFAULT, POLARITY_REVERSED):
        raise InvalidParams(f"unknown adaptation polarity {polarity!r}")
    tp_exceeds = state.true_positives > state.outcome_threshold
    fp_exceeds = state.false_positives > state.outcome_threshold
    step = 0
    if tp_exceeds:
        step = -1
    elif fp_exceeds:
        step = 1
    if polarity == POLARITY_REVERSED:
        step = -step
    if step == 0:
        return ts
    return dataclasses.replace(
        ts, anomaly_threshold=max(1, ts.anomaly_threshold + step)
    )
