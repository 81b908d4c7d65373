"""Ranked semimartingale paths, local time estimators, and the identity
checkers that tie them together.

Thin convenience layer over the compiled module: functions that return JSON
strings at the C++ boundary are re-exposed here returning parsed dicts.
"""

import json

from ._core import (
    CadlagPath,
    Ensemble,
    crossing_local_time,
    fixture,
    identity_ids,
    indicator_local_time,
    load_ensemble,
    occupation_local_time,
    path_continuous,
    path_from_values_jumps,
    rank,
    save_ensemble,
    simulate as _simulate,
    tanaka_local_time,
)
from ._core import check as _check
from ._core import run_config as _run_config


def simulate(model, T, n_steps, n_paths, seed, replication=0):
    """Simulate an ensemble. `model` is a dict or a JSON string."""
    if not isinstance(model, str):
        model = json.dumps(model)
    return _simulate(model, T, n_steps, n_paths, seed, replication)


def check(identity, ensemble, k=1, policy="exact"):
    """Run one identity checker; returns the report as a dict."""
    return json.loads(_check(identity, ensemble, k, policy))


def run_config(config):
    """Run a full experiment config (dict or JSON string) in memory."""
    if not isinstance(config, str):
        config = json.dumps(config)
    return json.loads(_run_config(config))


__all__ = [
    "CadlagPath",
    "Ensemble",
    "check",
    "crossing_local_time",
    "fixture",
    "identity_ids",
    "indicator_local_time",
    "load_ensemble",
    "occupation_local_time",
    "path_continuous",
    "path_from_values_jumps",
    "rank",
    "run_config",
    "save_ensemble",
    "simulate",
    "tanaka_local_time",
]
