"""Flat key=value configuration with dotted namespaces.

Precedence is command line > config file > defaults. Every key maps to a
simulation-config field through the registry below; unknown keys are
rejected so typos fail loudly instead of silently running defaults.
"""

from __future__ import annotations

import dataclasses
from typing import Callable, Optional

from .adaptation import POLARITY_DEFAULT, POLARITY_REVERSED
from .errors import ConfigError
from .simharness import CHANGE_DAY_RANDOM, SimConfig
from .similarity import SimilarityMeasure


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_similarity_threshold(text: str) -> Optional[float]:
    if text.strip().lower() == "auto":
        return None
    return float(text)


def _parse_change_day(text: str):
    if text.strip().lower() == CHANGE_DAY_RANDOM:
        return CHANGE_DAY_RANDOM
    return int(text)


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


def _parse_polarity(text: str) -> str:
    value = text.strip().lower()
    if value not in (POLARITY_DEFAULT, POLARITY_REVERSED):
        raise ValueError(
            f"expected {POLARITY_DEFAULT!r} or {POLARITY_REVERSED!r}, got {text!r}"
        )
    return value


#: config key -> (SimConfig field, parser). change.* keys target ChangeSpec.
_KEYS: dict[str, tuple[str, Callable]] = {
    "runs": ("num_runs", int),
    "horizon_days": ("horizon_days", int),
    "trial_days": ("trial_days", int),
    "num_providers": ("num_providers", int),
    "num_consumers": ("num_consumers", int),
    "seed": ("rng_seed", int),
    "measure": ("measure", SimilarityMeasure.from_string),
    "similarity_threshold": ("similarity_threshold", _parse_similarity_threshold),
    "anomaly_fraction": ("anomaly_fraction", float),
    "consumer_noise": ("consumer_noise_sigma", float),
    "detection_window_days": ("detection_window_days", int),
    "workers": ("workers", int),
    "attribute": ("attribute_id", str),
    "sweep.similarity_thresholds": ("similarity_thresholds", _parse_float_list),
    "sweep.anomaly_fractions": ("anomaly_fractions", _parse_float_list),
    "cusum.shift_n": ("shift_n", float),
    "cusum.control_c": ("control_c", float),
    "adaptation.horizon_days": ("adaptation_horizon_days", int),
    "adaptation.z": ("adaptation_outcome_threshold", int),
    "adaptation.polarity": ("adaptation_polarity", _parse_polarity),
    "trace.path": ("trace_path", str),
    "trace.has_header": ("trace_has_header", _parse_bool),
    "synth.base": ("synth_base", float),
    "synth.seasonal_amp": ("synth_seasonal_amp", float),
    "synth.weekly_amp": ("synth_weekly_amp", float),
    "synth.noise_sigma": ("synth_noise_sigma", float),
}

_CHANGE_KEYS: dict[str, tuple[str, Callable]] = {
    "change.day": ("change_day", _parse_change_day),
    "change.kind": ("kind", str),
    "change.magnitude_sigmas": ("magnitude_sigmas", float),
}


def parse_kv_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse key=value lines; # starts a comment, blank lines are skipped."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def parse_kv_pairs(pairs: list[str]) -> dict[str, str]:
    """Parse key=value override arguments from the command line."""
    out: dict[str, str] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override must look like key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def build_config(mapping: dict[str, str], base: Optional[SimConfig] = None) -> SimConfig:
    """Apply a merged key=value mapping on top of a base configuration."""
    cfg = base if base is not None else SimConfig()
    fields: dict = {}
    change_fields: dict = {}
    for key, raw in mapping.items():
        if key in _KEYS:
            field, parser = _KEYS[key]
            target = fields
        elif key in _CHANGE_KEYS:
            field, parser = _CHANGE_KEYS[key]
            target = change_fields
        else:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            target[field] = parser(raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}")
    if change_fields:
        fields["change"] = dataclasses.replace(cfg.change, **change_fields)
    try:
        return dataclasses.replace(cfg, **fields) if fields else cfg
    except Exception as exc:
        raise ConfigError(str(exc))
