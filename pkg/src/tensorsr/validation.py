"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np

from .volume import Volume


def ensure_volume(x, spacing=(1.0, 1.0, 1.0)) -> Volume:
    """Pass a Volume through, or wrap a 3D array into one."""
    if isinstance(x, Volume):
        return x
    return Volume(np.asarray(x), spacing)


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite values")
    return a


def as_triple(value, name: str = "value") -> tuple[float, float, float]:
    """Broadcast a scalar or accept a length-3 sequence of floats."""
    if np.ndim(value) == 0:
        v = float(value)
        return (v, v, v)
    triple = tuple(float(t) for t in value)
    if len(triple) != 3:
        raise ValueError(f"{name} must be a scalar or have three components, got {value!r}")
    return triple


def check_same_dims(a: Volume, b: Volume) -> None:
    if a.dims != b.dims:
        raise ValueError(f"volume dimensions disagree: {a.dims} vs {b.dims}")


def check_same_spacing(a: Volume, b: Volume) -> None:
    if a.spacing != b.spacing:
        raise ValueError(f"volume spacings disagree: {a.spacing} vs {b.spacing}")


def check_divisible(dims, rate: int) -> None:
    if any(d % rate for d in dims):
        raise ValueError(f"dimensions {tuple(dims)} are not divisible by rate {rate}")
