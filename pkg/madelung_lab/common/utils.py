"""Utility functions for thread configuration, digests and JSON statistics."""

import hashlib
import json
import os
from typing import Any, Dict, Optional

import numpy as np


THREADS_ENV = "MADELUNG_LAB_THREADS"


def get_thread_config() -> int:
    """Get the parallelism cap from the environment (-1 means all cores)."""
    raw = os.getenv(THREADS_ENV, "").strip()
    if not raw:
        return -1
    try:
        value = int(raw)
    except ValueError:
        return -1
    return value if value > 0 else -1


def fft_workers() -> int:
    """Worker count passed to scipy.fft."""
    return get_thread_config()


def pool_size() -> int:
    """Thread pool size for per-ball and per-sample work."""
    threads = get_thread_config()
    if threads > 0:
        return threads
    return os.cpu_count() or 1


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars/arrays and nested containers into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        if np.isnan(value):
            return None
        if np.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def canonical_json(obj: Any) -> str:
    """Deterministic JSON text (sorted keys, fixed separators)."""
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(obj: Any) -> str:
    """sha256 of the canonical JSON form."""
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def save_stat_json(stat_file: str, stat_data: Dict[str, Any]) -> None:
    """Save statistics to a JSON file."""
    os.makedirs(os.path.dirname(stat_file) or ".", exist_ok=True)
    with open(stat_file, "w", encoding="utf-8") as f:
        json.dump(to_jsonable(stat_data), f, indent=2, ensure_ascii=False)


def load_stat_json(stat_file: str) -> Optional[Dict[str, Any]]:
    """Load statistics from a JSON file."""
    if not os.path.exists(stat_file):
        return None
    try:
        with open(stat_file, "r", encoding="utf-8") as f:
            return json.load(f)
    except Exception:
        return None
