"""Command-line front end.

Four subcommands: ``generate`` builds a signature from a trial CSV,
``detect`` scores one trial against a stored signature, ``simulate`` runs
the end-to-end pipeline for one configuration, and ``sweep`` reproduces
the threshold-sweep experiments. Exit codes: 0 success, 2 input/config
error, 3 domain error, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path

import numpy as np

from . import _kernels as kernels
from .config import build_config, parse_kv_pairs, parse_kv_text
from .errors import ConfigError, InsufficientData, ParseError, PerfsigError
from .signature import (
    QoSSeries,
    TrialExperience,
    Window,
    generate_signature,
    normalize_series,
    segmented_from_json,
    signature_from_dict,
    signature_to_dict,
)
from .simharness import (
    AXIS_ANOMALY,
    AXIS_SIMILARITY,
    RunThresholds,
    aggregate_results,
    run_batch,
    sweep_axis,
    sweep_report_to_csv,
)
from .similarity import SimilarityMeasure, similarity

TRIAL_CSV_COLUMNS = ("consumer_id", "day", "value")


def read_trials_csv(path: str, attribute_id: str = "qos") -> list[TrialExperience]:
    """Read a trial CSV (header consumer_id,day,value) into experiences.

    Each consumer's rows must form a contiguous day range; row numbers are
    reported on any malformed field.
    """
    import csv as _csv

    per_consumer: dict[str, list[tuple[int, float]]] = {}
    with open(path, newline="") as fh:
        reader = _csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ParseError(f"{path}: empty file (header required)")
        missing = [c for c in TRIAL_CSV_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise ParseError(f"{path}: header missing column(s) {', '.join(missing)}")
        rows = 0
        for lineno, row in enumerate(reader, start=2):
            rows += 1
            cid = (row["consumer_id"] or "").strip()
            if not cid:
                raise ParseError(f"{path}:{lineno}: empty consumer_id")
            try:
                day = int(row["day"])
            except (TypeError, ValueError):
                raise ParseError(f"{path}:{lineno}: bad day {row['day']!r}")
            try:
                value = float(row["value"])
            except (TypeError, ValueError):
                raise ParseError(f"{path}:{lineno}: bad value {row['value']!r}")
            per_consumer.setdefault(cid, []).append((day, value))
        if rows == 0:
            raise ParseError(f"{path}: no data rows")
    trials = []
    for cid, pairs in per_consumer.items():
        pairs.sort(key=lambda p: p[0])
        days = [d for d, _ in pairs]
        if len(set(days)) != len(days):
            raise ParseError(f"{path}: duplicate day for consumer {cid!r}")
        if days != list(range(days[0], days[0] + len(days))):
            raise ParseError(f"{path}: consumer {cid!r} has gaps in its day range")
        series = QoSSeries(attribute_id, days[0], [v for _, v in pairs])
        trials.append(TrialExperience(cid, series))
    return trials


def _parse_window(text: str) -> Window:
    try:
        start, stop = text.split(":")
        window = Window(int(start), int(stop))
    except ValueError:
        raise ConfigError(f"window must look like START:STOP, got {text!r}")
    if window.start < 0 or window.stop <= window.start:
        raise ConfigError(f"window {text!r} is not a valid day range")
    return window


def _load_sim_config(args) -> "SimConfig":
    mapping: dict[str, str] = {}
    if args.config:
        mapping.update(parse_kv_text(Path(args.config).read_text(), source=args.config))
    mapping.update(parse_kv_pairs(args.overrides))
    if args.seed is not None:
        mapping["seed"] = str(args.seed)
    if args.measure is not None:
        mapping["measure"] = args.measure
    if args.workers is not None:
        mapping["workers"] = str(args.workers)
    return build_config(mapping)


def cmd_generate(args) -> int:
    window = _parse_window(args.window)
    trials = read_trials_csv(args.trials, args.attribute)
    sig = generate_signature(trials, window)
    out = Path(args.out)
    out.write_text(json.dumps(signature_to_dict(sig), indent=2) + "\n")
    print(
        json.dumps(
            {
                "out": str(out),
                "length": len(sig),
                "mean": sig.stats.mean,
                "std": sig.stats.std,
            }
        )
    )
    return 0


def cmd_detect(args) -> int:
    trials = read_trials_csv(args.trial, args.attribute)
    if len(trials) != 1:
        raise ParseError(f"{args.trial}: expected exactly one consumer, got {len(trials)}")
    trial = trials[0]
    measure = SimilarityMeasure.from_string(args.measure)
    payload = json.loads(Path(args.signature).read_text())
    if isinstance(payload, dict):
        # Bare segment: compare by shape, ignoring day alignment.
        segment = signature_from_dict(payload)
        from .similarity import _DISPATCH

        normalized = normalize_series(trial.series)
        score = _DISPATCH[measure](normalized.values, segment.values)
    else:
        score = similarity(trial, segmented_from_json(json.dumps(payload)), measure)
    verdict = {"score": score.value, "anomalous": bool(score.value < args.threshold)}
    print(json.dumps(verdict))
    return 0


def cmd_simulate(args) -> int:
    cfg = _load_sim_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    thresholds = RunThresholds(cfg.similarity_threshold, cfg.anomaly_fraction)
    results = run_batch(cfg, thresholds, range(cfg.num_runs))
    log_path = out_dir / "runs.jsonl"
    with open(log_path, "w") as fh:
        for result in results:
            fh.write(json.dumps(result.to_log_dict()) + "\n")
    row = aggregate_results(
        cfg.similarity_threshold if cfg.similarity_threshold is not None else float("nan"),
        results,
    )
    summary = {
        "runs": cfg.num_runs,
        "backend": kernels.BACKEND,
        "mean_fp": row.mean_fp,
        "mean_delay": None if np.isnan(row.mean_delay) else row.mean_delay,
        "min_delay": None if np.isnan(row.min_delay) else row.min_delay,
        "accuracy": row.accuracy,
        "detected_fraction": row.detected_fraction,
        "log": log_path.name,
    }
    summary_path = out_dir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2) + "\n")
    print(json.dumps(summary))
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_sim_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = sweep_axis(cfg, args.axis)
    csv_path = out_dir / f"sweep_{args.axis}.csv"
    csv_path.write_text(sweep_report_to_csv(report))
    print(json.dumps({"axis": args.axis, "rows": len(report.rows), "out": str(csv_path)}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perfsig",
        description="Detect long-term changes in service performance signatures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="build a signature from a trial CSV")
    gen.add_argument("--trials", required=True, help="CSV with consumer_id,day,value")
    gen.add_argument("--window", required=True, help="day range START:STOP")
    gen.add_argument("--out", default="signature.json", help="output JSON path")
    gen.add_argument("--attribute", default="qos", help="QoS attribute id")
    gen.set_defaults(func=cmd_generate)

    det = sub.add_parser("detect", help="score one trial against a signature")
    det.add_argument("--trial", required=True, help="CSV with consumer_id,day,value")
    det.add_argument("--signature", required=True, help="signature JSON path")
    det.add_argument("--measure", default="pcc", choices=["ed", "pcc", "cs"])
    det.add_argument("--threshold", type=float, required=True, help="similarity threshold")
    det.add_argument("--attribute", default="qos", help="QoS attribute id")
    det.set_defaults(func=cmd_detect)

    for name, func in (("simulate", cmd_simulate), ("sweep", cmd_sweep)):
        cmd = sub.add_parser(name, help=f"{name} the detection pipeline")
        cmd.add_argument("--config", default=None, help="key=value config file")
        cmd.add_argument("--out", default="out", help="output directory")
        cmd.add_argument("--seed", type=int, default=None, help="root RNG seed")
        cmd.add_argument("--measure", default=None, choices=["ed", "pcc", "cs"])
        cmd.add_argument("--workers", type=int, default=None, help="parallel runs")
        if name == "sweep":
            cmd.add_argument(
                "--axis", required=True, choices=[AXIS_SIMILARITY, AXIS_ANOMALY]
            )
        cmd.add_argument(
            "overrides", nargs="*", metavar="key=value", help="config overrides"
        )
        cmd.set_defaults(func=func)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ConfigError, ParseError, InsufficientData, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PerfsigError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except Exception:
        traceback.print_exc()
        return 4


if __name__ == "__main__":
    sys.exit(main())
