import json
import os
import re
from pathlib import Path
from typing import Any, List

import numpy as np


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays, tuples and sets into plain JSON values.

    Integers stay integers; use ``matrix_to_json`` in ``braidcryst.burau`` when
    a matrix must be serialised as decimal strings.
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(to_jsonable(v) for v in value)
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, bytes):
        return value.hex()
    return value


def dumps_json(payload: Any) -> str:
    """Deterministic JSON: sorted keys, fixed separators, UTF-8 kept as is."""
    return json.dumps(to_jsonable(payload), sort_keys=True, ensure_ascii=False, indent=2)


def write_json(payload: Any, output_path: str | Path) -> None:
    with open(output_path, "w", encoding="utf-8") as f:
        f.write(dumps_json(payload))
        f.write("\n")


def read_word_lines(path: str | Path) -> List[str]:
    """Read one braid/free word per line; blank lines and ``#`` comments are skipped."""
    lines = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = re.sub(r"#.*$", "", line).strip()
            if line:
                lines.append(line)
    return lines


def env_bool(name: str, default: bool = False) -> bool:
    v = os.getenv(name)
    if v is None:
        return default
    return v.strip().lower() in ("1", "true", "yes", "y", "on")
