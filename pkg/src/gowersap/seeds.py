"""Stable per-task seed derivation."""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(seed: int, *task) -> int:
    """64-bit seed from (seed, task id); independent of scheduling order."""
    key = repr((int(seed),) + tuple(task)).encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "little")


def task_rng(seed: int, *task) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, *task))
