import copy
from pathlib import Path

import yaml

from .errors import DomainError

DEFAULT_CONFIG = {
    "bases": {
        "p": [0.08, 0.03],
        "q": [0.45, 0.15],
        "truncation_tol": None,
        "max_terms": 400,
    },
    # k and a_1..a_5; null means a seeded draw
    "pade": {
        "k": None,
        "a": None,
        "m": 1,
        "n": 1,
    },
    "gauge": {
        "c": [[1.1, 0.2], [0.9, -0.3], [1.05, 0.35], [0.85, -0.15]],
    },
    "precision_bits": 53,
    "tolerances": {
        "solve": 1e-8,
        "residual": 1e-8,
        "special": 1e-12,
        "lax": 1e-7,
        "evolution": 1e-6,
        "det": 1e-6,
        "weyl": 1e-6,
        "weyl_params": 1e-8,
        "anchor": 1e-8,
    },
    "seed": 0,
    # sizes start from the profile; entries here override single counts
    "profile": "default",
    "sizes": {},
    "output": {
        "out": None,
        "log": None,
    },
}


# draws per suite, x samples per draw, special-function samples
SIZE_PROFILES = {
    "default": {"draws": 2, "samples": 4, "special": 20},
    "acceptance": {"draws": 20, "samples": 10, "special": 200},
}


def _merge(base: dict, override: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(path: Path) -> dict:
    # If config file missing → return defaults
    if not path.exists():
        return copy.deepcopy(DEFAULT_CONFIG)

    # JSON is read through the YAML loader; YAML files work too
    with path.open("r", encoding="utf-8") as f:
        try:
            user_config = yaml.safe_load(f) or {}
        except yaml.YAMLError as exc:
            raise DomainError(f"cannot parse config {path}: {exc}")

    if not isinstance(user_config, dict):
        raise DomainError(f"config {path} must be a mapping, got {type(user_config).__name__}")

    return _merge(DEFAULT_CONFIG, user_config)
