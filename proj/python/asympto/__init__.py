"""Weight sequences, flat kernels, extension operators and ramified transforms.

Report-returning functions yield plain dictionaries with the same keys as
the ``asympto`` command-line payloads.
"""

import json as _json

from ._asympto import (
    AsymptoError,
    WeightSequence,
    __version__,
    alpha_borel,
    alpha_laplace,
    formal_alpha_laplace,
    h_eval,
    log_moments,
    mittag_leffler,
    recover_Mp,
)
from . import _asympto

__all__ = [
    "AsymptoError",
    "WeightSequence",
    "__version__",
    "alpha_borel",
    "alpha_laplace",
    "check_condition",
    "examples_matrix",
    "formal_alpha_laplace",
    "gamma_estimate",
    "h_eval",
    "log_moments",
    "mittag_leffler",
    "recover_Mp",
    "run",
    "sequence",
]


def sequence(spec):
    """Build a WeightSequence from a spec dict such as {"family": "gevrey", "alpha": 1}."""
    return WeightSequence.from_spec(_json.dumps(spec))


def check_condition(M, cond, window=(0, 500)):
    lo, hi = window
    return _json.loads(_asympto._check_condition(M, cond, lo, hi))


def gamma_estimate(M, window=(0, 500), resolution=0.05):
    lo, hi = window
    return _json.loads(_asympto._gamma_estimate(M, lo, hi, resolution))


def examples_matrix():
    return _json.loads(_asympto._examples_matrix())


def run(*args):
    """Run a CLI command in process and return the envelope as a dict."""
    return _json.loads(_asympto._run_command([str(a) for a in args]))
