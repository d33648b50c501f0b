"""Noisy variational quantum compiling."""

import json

from ._core import (
    ConfigError,
    DimensionError,
    PauliString,
    ValidationError,
    average_fidelity,
    clifford_conjugate,
    hst_cost as _hst,
    let_cost as _let,
    lhst_cost as _lhst,
    llet_cost as _llet,
    qft,
    toffoli,
    w_state_prep,
)
from . import _core

__all__ = [
    "ConfigError", "DimensionError", "PauliString", "ValidationError", "average_fidelity",
    "clifford_conjugate", "compile", "cost", "qft", "toffoli", "verify", "w_state_prep",
]

_COSTS = {"hst": _hst, "lhst": _lhst, "let": _let, "llet": _llet}


def cost(kind, u, v, noise=None):
    """Exact cost of V against U; noise is a noise-model dict as in the config files."""
    return _COSTS[kind](u, v, json.dumps(noise) if noise else "")


def compile(config, write=False):
    """Train the ansatz described by a config dict and return the summary dict."""
    return json.loads(_core.compile_json(json.dumps(config), write))


def verify(suite, options=None):
    """Run a verification suite and return its report."""
    return json.loads(_core.verify_json(suite, json.dumps(options) if options else ""))
