"""Small input-validation helpers shared across the package."""

from __future__ import annotations

import numpy as np


def as_rng(rng) -> np.random.Generator:
    """Coerce None / seed / Generator into a numpy Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def as_complex_vector(x, name: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=complex)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def as_snapshot_matrix(x, dim: int | None = None, name: str = "snapshots") -> np.ndarray:
    """Coerce a single vector or a stack of vectors to shape (n, dim)."""
    arr = np.asarray(x, dtype=complex)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError(f"{name} is empty")
    if dim is not None and arr.shape[1] != dim:
        raise ValueError(
            f"{name} has dimension {arr.shape[1]}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr
