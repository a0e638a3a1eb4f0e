"""Nearest-neighbour (Kozachenko-Leonenko) differential entropy estimation."""

import json

from . import _entropykit as _core
from ._entropykit import (
    EULER_MASCHERONI,
    EntropyKitError,
    __version__,
    ell_statistic,
    kl_entropy,
    kl_entropy_logdomain,
    nn_distances,
    one_nn_density,
    unit_ball_volume,
)

__all__ = [
    "EULER_MASCHERONI",
    "EntropyKitError",
    "__version__",
    "diagnose",
    "ell_statistic",
    "exact_entropy",
    "kl_entropy",
    "kl_entropy_logdomain",
    "nn_distances",
    "one_nn_density",
    "run_experiment",
    "sample",
    "unit_ball_volume",
]


def _dump(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def exact_entropy(spec):
    """Closed-form entropy in nats of a distribution spec (dict or JSON text)."""
    return _core.exact_entropy(_dump(spec))


def sample(spec, n, seed):
    """Seeded draw: an (n, d) array, or (interval, fraction) pairs for the counterexample."""
    return _core.sample(_dump(spec), n, seed)


def diagnose(points, spec, allow_monte_carlo=False):
    """Decomposition diagnostics; counterexample specs take (interval, fraction) pairs."""
    spec = _dump(spec)
    if json.loads(spec).get("family") == "counterexample":
        return _core.diagnose_logdomain(points, spec)
    return _core.diagnose(points, spec, allow_monte_carlo)


def run_experiment(config, threads=1):
    """Runs an experiment config; returns (rows, csv_text) without touching the filesystem."""
    return _core.run_experiment(_dump(config), threads)
