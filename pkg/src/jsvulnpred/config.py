"""Run configuration: built-in defaults overlaid with a YAML or JSON file."""

from __future__ import annotations

import copy
import json
import os
from typing import Any

import yaml

from .errors import ConfigError

ENV_CONFIG_DIR = "JSVULN_CONFIG_DIR"
CONFIG_FILE = "config.yaml"

DEFAULTS: dict[str, Any] = {
    "seed": 0,
    "static": {
        "clone_window": 50,
        "constructs": {},
        "severities": {},
        "skip_recovered": False,
    },
    "history": {
        "similarity": 0.8,
        "min_tokens": 10,
        "excludes": ["node_modules/*", "*/node_modules/*", "*.min.js"],
    },
    "split": {"train": 0.8, "dev": 0.1, "test": 0.1, "k": 10},
    "resample": {"mode": "none", "ratio": 1.0, "semantics": "pos/neg"},
    "search": {"objective": "f_measure", "mode": "dev", "workers": 1},
    "mcnemar": {"alpha": 0.05, "exact": False},
}


def read_structured(path: str) -> Any:
    """Parse a YAML or JSON file (JSON is valid YAML)."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return yaml.safe_load(text) if text.strip() else {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def merge(base: dict, override: dict, where: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"unknown config key {where}{key}")
        if isinstance(base[key], dict) and base[key] and not isinstance(value, dict):
            raise ConfigError(f"config key {where}{key} must be a mapping")
        if isinstance(base[key], dict) and base[key]:
            out[key] = merge(base[key], value, f"{where}{key}.")
        else:
            out[key] = copy.deepcopy(value)
    return out


def default_config_path() -> str | None:
    directory = os.environ.get(ENV_CONFIG_DIR)
    if directory:
        path = os.path.join(directory, CONFIG_FILE)
        if os.path.isfile(path):
            return path
    return None


def load_config(path: str | None = None) -> dict:
    """Defaults, overlaid by ``path`` or by ``$JSVULN_CONFIG_DIR/config.yaml``."""
    path = path or default_config_path()
    if path is None:
        return copy.deepcopy(DEFAULTS)
    data = read_structured(path)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return merge(DEFAULTS, data)


def dump_config(config: dict) -> str:
    return json.dumps(config, indent=2, sort_keys=True) + "\n"
