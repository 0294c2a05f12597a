"""
File containing the loading and merging of checker configurations.
"""
import json
import os

import yaml

_DEFAULTS = {
    "unroll_depth": 8,
    "step_budget": 100000,
    "fuel": 1000000,
    "jobs": 1,
    "verbose": False,
    "proof_latex": None,
}

_LIMITS = ("unroll_depth", "step_budget", "fuel", "jobs")


def load_configs(file_name: str) -> dict:
    """
    Loads a configuration file in YAML or JSON format.

    Parameters
    ----------
    file_name : str
        Path to a .yaml, .yml or .json file.

    Returns
    -------
    dict
        The configurations. An empty file gives an empty dictionary.
    """
    extension = os.path.splitext(file_name)[1].lower()
    if extension in (".yaml", ".yml"):
        with open(file_name) as f:
            configs = yaml.safe_load(f)
    elif extension == ".json":
        with open(file_name) as f:
            configs = json.load(f)
    else:
        raise NotImplementedError(
            f"Configuration files with extension '{extension}' are not supported")
    return {} if configs is None else configs


def get_default_configs() -> dict:
    return dict(_DEFAULTS)


def merge_configs(base: dict, overrides: dict) -> dict:
    """
    Returns a copy of base updated with the values of overrides that are not None.
    """
    configs = dict(base)
    for key, value in overrides.items():
        assert key in _DEFAULTS, f"Unknown configuration key '{key}'"
        if value is not None:
            configs[key] = value
    for key in _LIMITS:
        value = configs.get(key)
        assert isinstance(value, int) and not isinstance(value, bool) and value > 0, (
            f"Configuration key '{key}' should be a positive integer, got {value!r}")
    return configs
