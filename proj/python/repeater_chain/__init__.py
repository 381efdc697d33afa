"""Waiting-time and fidelity engine for entanglement distribution protocol
trees with cut-offs: exact evaluation, Monte Carlo validation, secret-key
rates and cut-off optimization."""

import json as _json

from ._core import (  # noqa: F401
    __version__,
    binary_entropy,
    compare,
    convolve_circular,
    convolve_linear,
    evaluate,
    nested_chain_config,
    optimize,
    sample,
    secret_key_fraction,
    validate_config,
)


def _as_json(config):
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def evaluate_config(config):
    """Like :func:`evaluate` but also accepts a config dict."""
    return evaluate(_as_json(config))


def sample_config(config, n, seed):
    return sample(_as_json(config), n, seed)


def optimize_config(config, mode="uniform", strategy="dif_time", seed=1):
    return optimize(_as_json(config), mode, strategy, seed)
