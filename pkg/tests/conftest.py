import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from perfsig.signature import (
    QoSSeries,
    SegmentStats,
    Signature,
    TrialExperience,
    tile_signature,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20211)


def make_trial(consumer_id, values, start_day=0, attribute="qos"):
    return TrialExperience(consumer_id, QoSSeries(attribute, start_day, values))


def quiet_shape(length=30, seed=7):
    """A z-normalized shape whose cumulative drift stays well inside the
    default control limits, for no-false-alarm scenarios. Most of the
    variance sits in a short-period oscillation, which contributes little
    to cumulative sums."""
    gen = np.random.default_rng(seed)
    t = np.arange(length)
    raw = 1.2 * np.sin(2.0 * np.pi * t / 10.0) + gen.normal(0.0, 0.35, length)
    mean = raw.mean()
    std = np.sqrt(np.mean((raw - mean) ** 2))
    return (raw - mean) / std


def quiet_segment(length=30, start_day=0, mean=50.0, std=4.0, seed=7, attribute="qos"):
    return Signature(attribute, start_day, quiet_shape(length, seed), SegmentStats(mean, std))


def quiet_tiled(horizon=360, length=30, **kwargs):
    return tile_signature(quiet_segment(length, **kwargs), horizon)


def cohort_regenerating(segment, n_consumers=6):
    """Trials whose aggregate reproduces the segment's raw series exactly.

    Consumers get offsets that cancel in the mean, so individual trials
    differ but the aggregate equals mean + std * values.
    """
    raw = segment.raw_values()
    trials = []
    for i in range(n_consumers):
        offset = (i - (n_consumers - 1) / 2.0) * 0.5
        trials.append(
            make_trial(
                f"u{i}", raw + offset, start_day=segment.start_day,
                attribute=segment.attribute_id,
            )
        )
    return trials
