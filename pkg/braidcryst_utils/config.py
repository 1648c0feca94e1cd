import copy
import logging
import os
from functools import lru_cache
from pathlib import Path

import yaml

logger = logging.getLogger(__name__)

CONFIG_PATH = os.getenv(
    "BRAIDCRYST_CONFIG",
    str(Path(__file__).resolve().parent.parent / "config.yaml"),
)

DEFAULTS = {
    "guards": {
        "max_group_order": 1_000_000,
        "max_cosets": 1_000_000,
    },
    "verify": {
        "seed": 20240917,
        "property_checks": 1000,
        "random_free_subgroups": 100,
        "representation_max_strands": 8,
        "image_moduli": [2, 3, 4, 5],
        "abelianization_moduli": [2, 3, 4, 5],
        "workers": 4,
    },
    "catalog": {
        "cyclic_orders": list(range(1, 13)),
    },
}


def _merge(base: dict, override: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


@lru_cache(maxsize=None)
def load_config(path: str = CONFIG_PATH) -> dict:
    """Load config.yaml merged over the built-in defaults."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except FileNotFoundError:
        logger.warning("⚠️ Config file %s not found, using built-in defaults", path)
        data = {}
    return _merge(DEFAULTS, data)


def setting(section: str, key: str):
    return load_config()[section][key]
