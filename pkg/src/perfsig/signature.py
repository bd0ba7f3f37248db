"""Performance-signature data model and generation.

A signature is a day-indexed, normalized series describing how one QoS
attribute of a service moves relative to itself over a provisioning
horizon. Signatures are built by averaging the trial observations of many
consumers day by day and z-normalizing the aggregate, so they carry shape,
not absolute level; the pre-normalization mean/std are kept alongside each
segment so the absolute level can be reconstructed when a control chart
needs a target.

All values are immutable once constructed (arrays are marked read-only),
so instances can be shared freely across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _kernels as kernels
from .errors import (
    CoverageGap,
    DegenerateSeries,
    EmptyInput,
    LengthMismatch,
    MisalignedWindows,
    OutOfRange,
    TooShort,
)


class Window(NamedTuple):
    """Half-open day range [start, stop)."""

    start: int
    stop: int

    @property
    def length(self) -> int:
        return self.stop - self.start


def _as_readonly_array(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise EmptyInput("values must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError("values must all be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class QoSSeries:
    """Day-indexed raw observations of one QoS attribute."""

    attribute_id: str
    start_day: int
    values: np.ndarray

    def __post_init__(self):
        if self.start_day < 0:
            raise ValueError("start_day must be >= 0")
        object.__setattr__(self, "values", _as_readonly_array(self.values))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def window(self) -> Window:
        return Window(self.start_day, self.start_day + len(self.values))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QoSSeries)
            and self.attribute_id == other.attribute_id
            and self.start_day == other.start_day
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True)
class TrialExperience:
    """One consumer's observed QoS series over a free-trial window."""

    consumer_id: str
    series: QoSSeries


@dataclass(frozen=True)
class SegmentStats:
    """Mean and population std of the raw aggregate behind a segment."""

    mean: float
    std: float


@dataclass(frozen=True, eq=False)
class Signature:
    """Normalized relative-performance series for one QoS attribute.

    ``stats`` records the raw aggregate's (mean, std) at generation time;
    it is retained per segment so change tests can target the level the
    segment was observed at.
    """

    attribute_id: str
    start_day: int
    values: np.ndarray
    stats: SegmentStats

    def __post_init__(self):
        object.__setattr__(self, "values", _as_readonly_array(self.values))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def window(self) -> Window:
        return Window(self.start_day, self.start_day + len(self.values))

    def slice(self, window: Window) -> "Signature":
        """Sub-segment covering ``window``; keeps these stats."""
        lo, hi = window.start - self.start_day, window.stop - self.start_day
        if lo < 0 or hi > len(self.values) or lo >= hi:
            raise OutOfRange(f"window {window} not inside segment {self.window}")
        return Signature(self.attribute_id, window.start, self.values[lo:hi], self.stats)

    def raw_values(self) -> np.ndarray:
        """Denormalized values: stats.mean + stats.std * values."""
        return self.stats.mean + self.stats.std * self.values

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Signature)
            and self.attribute_id == other.attribute_id
            and self.start_day == other.start_day
            and np.array_equal(self.values, other.values)
            and self.stats == other.stats
        )


@dataclass(frozen=True, eq=False)
class SegmentedSignature:
    """Ordered, gap-free signature segments partitioning [0, T)."""

    segments: tuple[Signature, ...] = field(default_factory=tuple)

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise EmptyInput("a segmented signature needs at least one segment")
        if segs[0].start_day != 0:
            raise OutOfRange("coverage must start at day 0")
        for prev, cur in zip(segs, segs[1:]):
            if cur.start_day != prev.window.stop:
                raise OutOfRange(
                    f"segments must tile without gaps or overlaps; "
                    f"{prev.window} is followed by {cur.window}"
                )
        object.__setattr__(self, "segments", segs)

    @classmethod
    def from_signature(cls, sig: Signature) -> "SegmentedSignature":
        if sig.start_day != 0:
            raise OutOfRange("a single-segment signature must start at day 0")
        return cls((sig,))

    @property
    def total_days(self) -> int:
        return self.segments[-1].window.stop

    @property
    def attribute_id(self) -> str:
        return self.segments[0].attribute_id

    def covers(self, window: Window) -> bool:
        return 0 <= window.start < window.stop <= self.total_days

    def pieces_in(self, window: Window) -> list[Signature]:
        """Segment slices that exactly tile ``window``, in day order."""
        if not self.covers(window):
            raise CoverageGap(
                f"signature covers [0, {self.total_days}) but window is {window}"
            )
        pieces = []
        for seg in self.segments:
            lo = max(seg.start_day, window.start)
            hi = min(seg.window.stop, window.stop)
            if lo < hi:
                pieces.append(seg.slice(Window(lo, hi)))
        return pieces

    def values_in(self, window: Window) -> np.ndarray:
        """Normalized signature values over ``window``."""
        return np.concatenate([p.values for p in self.pieces_in(window)])

    def raw_values_in(self, window: Window) -> np.ndarray:
        """Denormalized signature values over ``window``."""
        return np.concatenate([p.raw_values() for p in self.pieces_in(window)])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SegmentedSignature)
            and len(self.segments) == len(other.segments)
            and all(a == b for a, b in zip(self.segments, other.segments))
        )


def aggregate_trials(trials: Sequence[TrialExperience]) -> QoSSeries:
    """Element-wise mean series of aligned trial experiences.

    All trials must share the same start day and length.
    """
    if not trials:
        raise EmptyInput("no trials to aggregate")
    first = trials[0].series
    for t in trials[1:]:
        if t.series.start_day != first.start_day or len(t.series) != len(first):
            raise MisalignedWindows(
                f"trial {t.consumer_id!r} covers {t.series.window}, "
                f"expected {first.window}"
            )
        if t.series.attribute_id != first.attribute_id:
            raise MisalignedWindows(
                f"trial {t.consumer_id!r} observes {t.series.attribute_id!r}, "
                f"expected {first.attribute_id!r}"
            )
    stacked = np.vstack([t.series.values for t in trials])
    return QoSSeries(first.attribute_id, first.start_day, stacked.mean(axis=0))


def normalize_series(series: QoSSeries) -> Signature:
    """Z-normalize a series into a signature, recording its raw stats.

    Uses the population standard deviation so a full segment always has
    mean 0 and std 1 exactly. Constant series are rejected: a flat series
    carries no shape and would make correlation undefined downstream.
    """
    if len(series) < 2:
        raise TooShort("need at least 2 samples to normalize")
    normalized, mean, std = kernels.znorm(series.values)
    if std == 0.0:
        raise DegenerateSeries("series is constant; cannot normalize")
    return Signature(series.attribute_id, series.start_day, normalized, SegmentStats(mean, std))


def generate_signature(
    trials: Sequence[TrialExperience], window: Window | None = None
) -> Signature:
    """Normalized-averaging generation: mean the trials, then z-normalize.

    When ``window`` is given the aggregate is restricted to it before
    normalization, so the result is a fully normalized segment of exactly
    that range.
    """
    agg = aggregate_trials(trials)
    if window is not None:
        lo, hi = window.start - agg.start_day, window.stop - agg.start_day
        if lo < 0 or hi > len(agg):
            raise OutOfRange(f"window {window} not covered by trials ({agg.window})")
        agg = QoSSeries(agg.attribute_id, window.start, agg.values[lo:hi])
    return normalize_series(agg)


def splice_segment(
    sig: SegmentedSignature, window: Window, segment: Signature
) -> SegmentedSignature:
    """Replace ``window`` of a segmented signature with ``segment``.

    Segments overlapping the window edges are trimmed (keeping their
    stats); segments fully inside it are dropped. Coverage of [0, T) is
    preserved exactly.
    """
    if not (0 <= window.start < window.stop <= sig.total_days):
        raise OutOfRange(
            f"window {window} exceeds covered range [0, {sig.total_days})"
        )
    if len(segment) != window.length:
        raise LengthMismatch(
            f"segment has {len(segment)} values for a {window.length}-day window"
        )
    if segment.start_day != window.start:
        raise MisalignedWindows(
            f"segment starts at day {segment.start_day}, window at {window.start}"
        )
    out: list[Signature] = []
    inserted = False
    for seg in sig.segments:
        if seg.window.stop <= window.start or seg.start_day >= window.stop:
            out.append(seg)
            continue
        if seg.start_day < window.start:
            out.append(seg.slice(Window(seg.start_day, window.start)))
        if not inserted:
            out.append(segment)
            inserted = True
        if seg.window.stop > window.stop:
            out.append(seg.slice(Window(window.stop, seg.window.stop)))
    return SegmentedSignature(tuple(out))


def signature_to_dict(sig: Signature) -> dict:
    return {
        "attribute_id": sig.attribute_id,
        "start_day": sig.start_day,
        "values": [float(v) for v in sig.values],
        "stats": {"mean": sig.stats.mean, "std": sig.stats.std},
    }


def signature_from_dict(obj: dict) -> Signature:
    return Signature(
        attribute_id=obj["attribute_id"],
        start_day=int(obj["start_day"]),
        values=obj["values"],
        stats=SegmentStats(float(obj["stats"]["mean"]), float(obj["stats"]["std"])),
    )


def segmented_to_json(sig: SegmentedSignature) -> str:
    segs = sorted(sig.segments, key=lambda s: s.start_day)
    return json.dumps([signature_to_dict(s) for s in segs], indent=2)


def segmented_from_json(text: str) -> SegmentedSignature:
    data = json.loads(text)
    if isinstance(data, dict):
        data = [data]
    segs = sorted((signature_from_dict(o) for o in data), key=lambda s: s.start_day)
    return SegmentedSignature(tuple(segs))


def tile_signature(segment: Signature, horizon_days: int) -> SegmentedSignature:
    """Tile one fully normalized segment across [0, horizon_days).

    Used when one observed window stands in for the expected shape of
    every window of the horizon (the generator's seasonal period equals
    the window length). The horizon must be a whole number of segments.
    """
    length = len(segment)
    if horizon_days % length != 0:
        raise OutOfRange(
            f"horizon {horizon_days} is not a multiple of segment length {length}"
        )
    tiles = [
        Signature(segment.attribute_id, start, segment.values, segment.stats)
        for start in range(0, horizon_days, length)
    ]
    return SegmentedSignature(tuple(tiles))


def windows_of(horizon_days: int, window_days: int) -> Iterable[Window]:
    """Tumbling, calendar-aligned windows covering [0, horizon_days)."""
    return (Window(s, s + window_days) for s in range(0, horizon_days, window_days))
