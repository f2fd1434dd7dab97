"""Frequency-stabilization experiments on simulated probabilistic systems."""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from typing import Any, Mapping, Sequence

from . import _core
from ._core import (
    REPORT_SCHEMA,
    ConfigError,
    InvalidArgument,
    IoError,
    RhoError,
    binomial_half_width,
    predictor_accuracy,
    test_stabilization,
)

__all__ = [
    "REPORT_SCHEMA",
    "ConfigError",
    "InvalidArgument",
    "IoError",
    "RhoError",
    "binomial_half_width",
    "check_frequentist_agreement",
    "classify",
    "composed_event_probability",
    "laplace_probability",
    "list_scenarios",
    "predictor_accuracy",
    "render_report",
    "report_schema",
    "run_experiment",
    "run_trials",
    "test_stabilization",
]


def _config_json(config: Mapping[str, Any] | str) -> str:
    return config if isinstance(config, str) else json.dumps(dict(config))


def run_experiment(config: Mapping[str, Any] | str, *, with_trace: bool = False):
    """Run a scenario and return its report as a dict.

    With ``with_trace=True`` returns ``(report, trace_csv)``; the trace is
    produced when the config names a ``trace`` path (the path itself is not
    written to).
    """
    cfg = json.loads(_config_json(config))
    if with_trace and not cfg.get("trace"):
        cfg["trace"] = "-"
    report_json, trace = _core.run_experiment_json(json.dumps(cfg))
    report = json.loads(report_json)
    return (report, trace) if with_trace else report


def render_report(report: Mapping[str, Any], format: str = "text") -> str:
    return _core.render_report(json.dumps(report), format)


def list_scenarios() -> list[dict[str, Any]]:
    return json.loads(_core.catalog_json())["scenarios"]


def run_trials(scenario: str, n: int, seed: int = 42, params: Mapping[str, Any] | None = None,
               workers: int = 1) -> list:
    """Outcomes of trials 0..n-1: label indices, or values for continuous scenarios."""
    p = {k: str(v) for k, v in (params or {}).items()}
    return _core.run_trials(scenario, n, seed, p, workers)


def classify(labels: Sequence[int], J: int, order: int = 2, train_fraction: float = 0.5, z: float = 4.0) -> str:
    return _core.classify(list(labels), J, order, train_fraction, z)


def laplace_probability(J: int, favorable: int) -> Fraction:
    return Fraction(*_core.laplace_probability(J, favorable))


def composed_event_probability(event: Mapping[str, Any]) -> Fraction:
    return Fraction(*_core.composed_event_probability(json.dumps(dict(event))))


def check_frequentist_agreement(event: Mapping[str, Any], n: int, seed: int = 42, workers: int = 1,
                                z: float = 4.0) -> dict[str, Any]:
    out = _core.check_frequentist_agreement(json.dumps(dict(event)), n, seed, workers, z)
    out["exact"] = Fraction(*out["exact"])
    return out


def report_schema() -> dict[str, Any]:
    return json.loads(resources.files(__package__).joinpath("report.schema.json").read_text())
