"""
Module to assemble sweep configurations from defaults, TOML files and
command line overrides, and to read the worker pool width from the
environment.
"""
import os

import toml

from .exceptions import ConfigError
from .harness import SweepConfig
from .logger import LOGGER

WORKERS_ENV = "DEGROOT_WORKERS"

# [sweep] key -> SweepConfig field
SWEEP_KEYS = {
    "factor": "swept_factor",
    "values": "sweep_values",
    "timing": "timing_options",
    "replications": "replications",
    "horizon": "horizon",
    "target_selection": "target_selection",
    "seed": "base_seed",
    "epsilon": "epsilon",
    "uniform_range": "uniform_range",
}
HELD_KEYS = ("lam", "coverage", "duration")
NETWORK_KEYS = ("n", "edge_density", "self_loop_min")


def load_config_file(path):
    """
    Read a TOML config with optional [network] and [sweep] tables. Returns
    a flat mapping of override names, the same names the CLI uses.
    """
    try:
        document = toml.load(path)
    except (OSError, toml.TomlDecodeError) as exc:
        raise ConfigError("Failed loading config {0}: {1}".format(path, exc))

    overrides = {}
    for key, value in document.get("network", {}).items():
        if key not in NETWORK_KEYS:
            raise ConfigError("Unknown [network] key {0!r} in {1}".format(key, path))
        overrides[key] = value
    for key, value in document.get("sweep", {}).items():
        if key not in SWEEP_KEYS and key not in HELD_KEYS:
            raise ConfigError("Unknown [sweep] key {0!r} in {1}".format(key, path))
        overrides[key] = value

    log = "Loaded {0} settings from {1}".format(len(overrides), path)
    LOGGER.debug(log)
    return overrides


def build_sweep_config(file_values=None, cli_values=None):
    """
    Merge defaults < file values < CLI values into a SweepConfig. None
    values in either mapping mean "not given".
    """
    merged = {}
    for source in (file_values or {}, cli_values or {}):
        for key, value in source.items():
            if value is not None:
                merged[key] = value

    network = dict((key, merged[key]) for key in NETWORK_KEYS if key in merged)
    held = dict((key, merged[key]) for key in HELD_KEYS if key in merged)
    fields = dict(
        (field, merged[key]) for key, field in SWEEP_KEYS.items() if key in merged)
    fields["network_spec"] = network
    fields["held_constants"] = held
    return SweepConfig(**fields)


def worker_count(environ=None):
    environ = os.environ if environ is None else environ
    raw = environ.get(WORKERS_ENV)
    if not raw:
        return 1
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigError("{0} must be an integer, got {1!r}".format(WORKERS_ENV, raw))
    if workers < 1:
        raise ConfigError("{0} must be >= 1, got {1}".format(WORKERS_ENV, workers))
    return workers
