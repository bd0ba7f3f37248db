"""Shape similarity between trial experiences and signature segments.

Three measures are supported: Euclidean-distance similarity, Pearson
correlation, and cosine similarity. Euclidean distance is mapped into
(0, 1] via 1/(1+d) so that one convention holds for every measure: higher
means more similar, and a score strictly below the threshold is anomalous.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels as kernels
from .errors import (
    CoverageGap,
    DegenerateSeries,
    EmptyInput,
    LengthMismatch,
    TooShort,
    ZeroVector,
)
from .signature import SegmentedSignature, TrialExperience, normalize_series


class SimilarityMeasure(enum.Enum):
    EUCLIDEAN = "ed"
    PEARSON = "pcc"
    COSINE = "cs"

    @classmethod
    def from_string(cls, name: str) -> "SimilarityMeasure":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown similarity measure {name!r}; expected one of {valid}")

    @property
    def score_range(self) -> tuple[float, float]:
        if self is SimilarityMeasure.EUCLIDEAN:
            return (0.0, 1.0)
        return (-1.0, 1.0)


@dataclass(frozen=True)
class SimilarityScore:
    value: float
    measure: SimilarityMeasure


def _check_pair(e, s, min_len: int = 1) -> tuple[np.ndarray, np.ndarray]:
    e = np.asarray(e, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    if len(e) != len(s):
        raise LengthMismatch(f"series lengths differ: {len(e)} vs {len(s)}")
    if len(e) < min_len:
        raise TooShort(f"need at least {min_len} samples, got {len(e)}")
    return e, s


def euclidean_similarity(e: Sequence[float], s: Sequence[float]) -> SimilarityScore:
    """1/(1 + d) where d is the Euclidean distance between e and s."""
    e, s = _check_pair(e, s, min_len=2)
    d = kernels.euclidean_distance(e, s)
    return SimilarityScore(1.0 / (1.0 + d), SimilarityMeasure.EUCLIDEAN)


def pearson_similarity(e: Sequence[float], s: Sequence[float]) -> SimilarityScore:
    """Pearson correlation coefficient of e and s, in [-1, 1]."""
    e, s = _check_pair(e, s)
    r = kernels.pearson(e, s)
    if np.isnan(r):
        raise DegenerateSeries("correlation undefined for a constant series")
    return SimilarityScore(min(1.0, max(-1.0, r)), SimilarityMeasure.PEARSON)


def cosine_similarity(e: Sequence[float], s: Sequence[float]) -> SimilarityScore:
    """Cosine of the angle between e and s, in [-1, 1]."""
    e, s = _check_pair(e, s)
    c = kernels.cosine(e, s)
    if np.isnan(c):
        raise ZeroVector("cosine undefined for a zero-magnitude vector")
    return SimilarityScore(min(1.0, max(-1.0, c)), SimilarityMeasure.COSINE)


_DISPATCH = {
    SimilarityMeasure.EUCLIDEAN: euclidean_similarity,
    SimilarityMeasure.PEARSON: pearson_similarity,
    SimilarityMeasure.COSINE: cosine_similarity,
}


def similarity(
    e: TrialExperience, sig: SegmentedSignature, measure: SimilarityMeasure
) -> SimilarityScore:
    """Score a trial against the signature segment covering its window.

    The trial series is normalized first (same z-normalization used for
    signature generation), then compared against the matching signature
    sub-range under the chosen measure.
    """
    window = e.series.window
    if not sig.covers(window):
        raise CoverageGap(
            f"signature covers [0, {sig.total_days}) but trial "
            f"{e.consumer_id!r} spans {window}"
        )
    normalized = normalize_series(e.series)
    segment_values = sig.values_in(window)
    return _DISPATCH[measure](normalized.values, segment_values)


def init_similarity_threshold(
    past: Sequence[TrialExperience],
    sig: SegmentedSignature,
    measure: SimilarityMeasure,
) -> float:
    """Minimum similarity score over past trial experiences.

    Past users are by construction not anomalies, so the lowest score any
    of them achieved is the tightest threshold that keeps them all normal.
    """
    if not past:
        raise EmptyInput("need at least one past trial experience")
    return min(similarity(e, sig, measure).value for e in past)
