"""Jump expansion of Markovian master equations with adaptive resummation.

Thin Python layer over the C++ core: model builders, the reference
propagator, the Monte Carlo jump expansion and the run driver.
"""

import json
import os

from ._qjump import (
    Expansion,
    OpenSystem,
    QJumpError,
    Strategy,
    __version__,
    fidelity,
    propagate,
    truncated_fidelity,
)
from . import _qjump

__all__ = [
    "Expansion",
    "OpenSystem",
    "QJumpError",
    "Strategy",
    "__version__",
    "build_model",
    "catalog",
    "estimate_expansion",
    "fidelity",
    "initial_state",
    "propagate",
    "run",
    "strategy",
    "truncated_fidelity",
]


def catalog(include_auxiliary=False):
    """Model catalog as a dict: {"models": [{"name", "params", ...}, ...]}."""
    return json.loads(_qjump.catalog_json(include_auxiliary))


def build_model(name, **params):
    """Build a catalog model; returns (OpenSystem, resolved parameters)."""
    system, resolved = _qjump.build_model(name, json.dumps(params))
    return system, json.loads(resolved)


def initial_state(model, spec, **params):
    """Initial density matrix for `model` from a config-style state spec."""
    return _qjump.initial_state(model, json.dumps(params), json.dumps(spec))


def strategy(name, system, **params):
    """Strategy from its config name, e.g. strategy("fixed", sys, alphas=[0.1])."""
    return _qjump.strategy(name, system, json.dumps(params) if params else "")


def estimate_expansion(system, strategy, rho0, t, n_samples=1000, max_order=5, seed=1, dt=0.01,
                       workers=1, **sampler):
    """Monte Carlo estimate of the expansion orders 0..max_order at time t.

    Extra keyword arguments are sampler settings as in a config file, e.g.
    time_distribution="uniform" or index_enum_cap=1.
    """
    return _qjump.estimate_expansion(system, strategy, rho0, t, n_samples, max_order, seed, dt, workers,
                                     json.dumps(sampler) if sampler else "")


def run(config, command="run", strategies=(), output_dir=None, workers=None):
    """Run a config (path or dict) like the CLI and return a summary dict.

    The summary holds the output directory, the artifact list and one report
    per strategy with k, fidelity, cum_weight and their standard errors.
    """
    if isinstance(config, (str, os.PathLike)):
        text = _qjump.run_config_file(os.fspath(config), command, list(strategies), output_dir, workers)
    else:
        text = _qjump.run_config_json(json.dumps(config), command, list(strategies), output_dir, workers)
    return json.loads(text)
