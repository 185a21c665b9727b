"""Canonical JSON reports: sorted keys, shortest round-trip floats.

Parsing an emitted report and re-serializing it with ``dumps`` reproduces the
bytes exactly, which is what the CLI determinism contract and the tests rely
on.  Non-finite floats are mapped to null (JSON has no representation for
them).
"""

from __future__ import annotations

import dataclasses
import json
from enum import Enum

import numpy as np


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays, dataclasses and enums into
    plain JSON-serializable Python values."""
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, float):
        return obj if np.isfinite(obj) else None
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return to_jsonable(float(obj))
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: to_jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    return obj


def dumps(obj) -> str:
    """Canonical serialization: sorted keys, indent 2, no NaN tokens."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False)
