"""Inertial gradient methods with Hessian-driven damping.

Configs are plain dicts with the same schema as the JSON files the ``igahd``
command-line tool reads.
"""

import json

from ._igahd import (
    ConfigError,
    ModeParams,
    Problem,
    condition_number,
    envelope,
    fit_rate,
    integrate_mode,
    make_quadratic,
    max_mode_dt,
)
from . import _igahd


def _dump(config):
    return config if isinstance(config, str) else json.dumps(config)


def validate_config(config, overrides=()):
    _igahd.validate_config(_dump(config), list(overrides))


def run_experiment(config, overrides=(), jobs=1):
    """Returns (summary dict, {seed: {column: ndarray}})."""
    summary, runs = _igahd.run_experiment(_dump(config), list(overrides), jobs)
    return json.loads(summary), runs


def check_lemma(config, overrides=()):
    return _igahd.check_lemma(_dump(config), list(overrides))


def mode_report(config, overrides=()):
    """Mode comparison rows as a list of dicts (CSV text parsed)."""
    import csv
    import io

    text = _igahd.mode_report_csv(_dump(config), list(overrides))
    return list(csv.DictReader(io.StringIO(text)))


__all__ = [
    "ConfigError",
    "ModeParams",
    "Problem",
    "check_lemma",
    "condition_number",
    "envelope",
    "fit_rate",
    "integrate_mode",
    "make_quadratic",
    "max_mode_dt",
    "mode_report",
    "run_experiment",
    "validate_config",
]
