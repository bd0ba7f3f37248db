"""perfsig: change detection for IaaS performance signatures.

Signatures summarize a service's relative performance over a long
horizon; free-trial experiences are scored against them to detect
anomalies, anomaly bursts raise events, events are condition-checked with
a CUSUM control chart, and confirmed changes splice a recomputed segment
into the signature. A simulation harness reproduces the threshold-sweep
experiments end to end.
"""

from ._kernels import BACKEND
from .adaptation import FeedbackState, adjust, record_outcome
from .cusum import (
    ChangeVerdict,
    CusumParams,
    CusumTrace,
    apply_action,
    cusum_chart,
    evaluate_event,
)
from .detection import (
    AnomalyRecord,
    Event,
    ThresholdState,
    anomaly_threshold_from_fraction,
    detect_anomaly,
    evaluate_window,
    init_anomaly_threshold,
)
from .errors import PerfsigError
from .signature import (
    QoSSeries,
    SegmentedSignature,
    SegmentStats,
    Signature,
    TrialExperience,
    Window,
    aggregate_trials,
    generate_signature,
    normalize_series,
    splice_segment,
    tile_signature,
)
from .simharness import (
    ChangeSpec,
    RunMetrics,
    RunThresholds,
    SimConfig,
    SweepReport,
    inject_change,
    load_trace,
    run_once,
    schedule_trials,
    sweep,
    sweep_axis,
    synth_provider,
)
from .similarity import (
    SimilarityMeasure,
    SimilarityScore,
    cosine_similarity,
    euclidean_similarity,
    init_similarity_threshold,
    pearson_similarity,
    similarity,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AnomalyRecord",
    "ChangeSpec",
    "ChangeVerdict",
    "CusumParams",
    "CusumTrace",
    "Event",
    "FeedbackState",
    "PerfsigError",
    "QoSSeries",
    "RunMetrics",
    "RunThresholds",
    "SegmentStats",
    "SegmentedSignature",
    "Signature",
    "SimConfig",
    "SimilarityMeasure",
    "SimilarityScore",
    "SweepReport",
    "ThresholdState",
    "TrialExperience",
    "Window",
    "adjust",
    "aggregate_trials",
    "anomaly_threshold_from_fraction",
    "apply_action",
    "cosine_similarity",
    "cusum_chart",
    "detect_anomaly",
    "euclidean_similarity",
    "evaluate_event",
    "evaluate_window",
    "generate_signature",
    "init_anomaly_threshold",
    "init_similarity_threshold",
    "inject_change",
    "load_trace",
    "normalize_series",
    "pearson_similarity",
    "record_outcome",
    "run_once",
    "schedule_trials",
    "similarity",
    "splice_segment",
    "sweep",
    "sweep_axis",
    "synth_provider",
    "tile_signature",
]
