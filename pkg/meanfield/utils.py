# meanfield/utils.py
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, List, Optional, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")


def ensure_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def config_hash(payload: dict) -> str:
    """md5 of the canonical JSON form of a run configuration."""
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.md5(blob.encode("utf-8")).hexdigest()


def file_md5(path, chunk_size: int = 1 << 20) -> str:
    h = hashlib.md5()
    with open(path, "rb") as f:
        while True:
            chunk = f.read(chunk_size)
            if not chunk:
                break
            h.update(chunk)
    return h.hexdigest()


def resolve_workers(workers: Optional[int]) -> int:
    return max(1, workers if workers else (os.cpu_count() or 1))


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """Order-preserving map; `fn` must be picklable when more than one worker is used."""
    items = list(items)
    n = min(resolve_workers(workers), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def collocation_radii(seed: int, count: int, lo: float = 1e-3, hi: float = 1.0 - 1e-3) -> np.ndarray:
    """Sorted radii from a seeded generator; the seed is written to output headers."""
    rng = np.random.default_rng(seed)
    return np.sort(rng.uniform(lo, hi, size=count))
