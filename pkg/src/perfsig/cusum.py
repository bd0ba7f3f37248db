"""Condition and action of the ECA loop: CUSUM test plus signature splice.

When an event fires, the window's cohort is aggregated into a candidate
replacement signature and the raw aggregate is run through a two-sided
cumulative-sum control chart. The chart's target mean and std come from
the existing signature over the same window, reconstructed to raw scale
through the per-segment stats retained at generation time: normalized
values are level-free by construction, so the retained stats are what
makes a level change testable at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels as kernels
from .detection import Event
from .errors import (
    ActionOnNegativeVerdict,
    DegenerateWindow,
    EmptyInput,
    InvalidParams,
)
from .signature import (
    SegmentedSignature,
    Signature,
    TrialExperience,
    Window,
    aggregate_trials,
    generate_signature,
    splice_segment,
)

DEFAULT_SHIFT_N = 1.0
DEFAULT_CONTROL_C = 5.0


@dataclass(frozen=True)
class CusumParams:
    """Target statistics and chart tuning.

    shift_n is the minimum detectable shift and control_c the control
    limit, both in multiples of target_std; the chart uses a slack of
    half a shift per sample and flags samples whose cumulative sum drifts
    beyond control_c target-stds.
    """

    target_mean: float
    target_std: float
    shift_n: float = DEFAULT_SHIFT_N
    control_c: float = DEFAULT_CONTROL_C

    def __post_init__(self):
        if self.target_std <= 0 or self.shift_n <= 0 or self.control_c <= 0:
            raise InvalidParams(
                "target_std, shift_n and control_c must all be positive"
            )


@dataclass(frozen=True, eq=False)
class CusumTrace:
    """Upper/lower cumulative sums and the 1-based violation indices."""

    upper: np.ndarray
    lower: np.ndarray
    violations: tuple[int, ...]

    @property
    def upper_max(self) -> float:
        return float(np.max(self.upper))

    @property
    def lower_min(self) -> float:
        return float(np.min(self.lower))


@dataclass(frozen=True)
class ChangeVerdict:
    """Outcome of testing one event's window for a signature change."""

    event_window_id: int
    changed: bool
    trace: CusumTrace
    new_segment: Optional[Signature]

    def __post_init__(self):
        has_violation = len(self.trace.violations) > 0
        if self.changed != has_violation or self.changed != (self.new_segment is not None):
            raise InvalidParams(
                "changed, violations and new_segment must agree on the outcome"
            )

    def to_log_dict(self) -> dict:
        return {
            "window_id": self.event_window_id,
            "changed": self.changed,
            "violations": list(self.trace.violations),
            "ul_max": self.trace.upper_max,
            "ll_min": self.trace.lower_min,
        }


def cusum_chart(x: Sequence[float], p: CusumParams) -> CusumTrace:
    """Two-sided CUSUM over x.

    Both sums start at 0 on the first sample; from the second sample the
    upper sum accumulates max(0, previous + x_i - mean - slack) and the
    lower sum min(0, previous + x_i - mean + slack), with slack equal to
    half a minimum detectable shift. A sample violates when the upper sum
    strictly exceeds control_c stds or the lower sum falls strictly below
    their negative.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise EmptyInput("cannot chart an empty series")
    if not np.all(np.isfinite(x)):
        raise InvalidParams("chart input must be finite")
    slack = 0.5 * p.shift_n * p.target_std
    limit = p.control_c * p.target_std
    upper, lower, violations = kernels.cusum_scan(x, p.target_mean, slack, limit)
    upper.setflags(write=False)
    lower.setflags(write=False)
    return CusumTrace(upper, lower, tuple(violations))


def evaluate_event(
    ev: Event,
    sig: SegmentedSignature,
    trials_in_window: Sequence[TrialExperience],
    shift_n: float = DEFAULT_SHIFT_N,
    control_c: float = DEFAULT_CONTROL_C,
) -> ChangeVerdict:
    """Test an event's window for a real signature change.

    The full window cohort is aggregated; the chart runs over the raw
    aggregate against the level the existing signature recorded for this
    window. On violation the recomputed, fully normalized window segment
    is attached for splicing.
    """
    agg = aggregate_trials(trials_in_window)
    window = agg.window
    existing_raw = sig.raw_values_in(window)
    target_mean = float(np.mean(existing_raw))
    target_std = float(np.sqrt(np.mean((existing_raw - target_mean) ** 2)))
    if target_std == 0.0:
        raise DegenerateWindow(
            f"existing signature is constant over {window}; no change target"
        )
    params = CusumParams(target_mean, target_std, shift_n, control_c)
    trace = cusum_chart(agg.values, params)
    changed = len(trace.violations) > 0
    new_segment = generate_signature(trials_in_window, window) if changed else None
    return ChangeVerdict(ev.window_id, changed, trace, new_segment)


def apply_action(
    sig: SegmentedSignature, verdict: ChangeVerdict, window: Window
) -> SegmentedSignature:
    """Splice the verdict's recomputed segment into the signature.

    Only positive verdicts may be applied; splicing on a false positive is
    a caller bug and raises.
    """
    if not verdict.changed:
        raise ActionOnNegativeVerdict(
            f"window {verdict.event_window_id} verdict found no change"
        )
    return splice_segment(sig, window, verdict.new_segment)
