"""Pure-Python/NumPy kernels, used when the compiled core is unavailable.

Semantics here are the reference: the compiled twin in ``_native.pyx``
mirrors these functions operation-for-operation (same expressions, same
evaluation order for the sequential scan) so both backends agree to within
float rounding, and exactly for the cumulative-sum scan.

Degenerate inputs are signalled with NaN return values rather than
exceptions; the calling layer owns the error policy.
"""

import math

import numpy as np

BACKEND = "fallback"


def mean_std(x):
    """Mean and population standard deviation of a 1-D array."""
    x = np.asarray(x, dtype=np.float64)
    m = float(np.mean(x))
    s = float(np.sqrt(np.mean((x - m) ** 2)))
    return m, s


def znorm(x):
    """Z-normalize: returns (normalized array, mean, population std).

    If the population std is zero the first element is NaN-filled instead
    of dividing by zero; callers must check the returned std.
    """
    x = np.asarray(x, dtype=np.float64)
    m, s = mean_std(x)
    if s == 0.0:
        return np.full_like(x, np.nan), m, s
    return (x - m) / s, m, s


def euclidean_distance(a, b):
    """Root of summed squared differences between equal-length vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return float(np.sqrt(np.sum((a - b) ** 2)))


def pearson(a, b):
    """Pearson correlation coefficient; NaN if either input is constant."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    da = a - np.mean(a)
    db = b - np.mean(b)
    denom = math.sqrt(float(np.sum(da * da))) * math.sqrt(float(np.sum(db * db)))
    if denom == 0.0:
        return float("nan")
    return float(np.sum(da * db)) / denom


def cosine(a, b):
    """Cosine of the angle between two vectors; NaN if either is zero."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    denom = math.sqrt(float(np.sum(a * a))) * math.sqrt(float(np.sum(b * b)))
    if denom == 0.0:
        return float("nan")
    return float(np.sum(a * b)) / denom


def cusum_scan(x, target_mean, slack, limit):
    """Two-sided cumulative-sum scan.

    Base case: both sums are 0 at the first sample. From the second sample
    on, the upper sum accumulates excess above target_mean + slack (floored
    at 0) and the lower sum accumulates deficit below target_mean - slack
    (capped at 0). Returns (upper, lower, violations) where violations are
    the 1-based indices at which upper > limit or lower < -limit, strictly.
    """
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    upper = np.zeros(n, dtype=np.float64)
    lower = np.zeros(n, dtype=np.float64)
    violations = []
    for i in range(1, n):
        upper[i] = max(0.0, upper[i - 1] + x[i] - target_mean - slack)
        lower[i] = min(0.0, lower[i - 1] + x[i] - target_mean + slack)
    for i in range(n):
        if upper[i] > limit or lower[i] < -limit:
            violations.append(i + 1)
    return upper, lower, violations
