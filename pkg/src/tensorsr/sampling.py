"""Seeded random sampling shared by the degradation, solver and phantom code.

Every stochastic feature draws from a PCG64 stream and turns uniforms into
normals with the Box-Muller transform, so a run is fully determined by the
seed and the order of the draws.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def standard_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard-normal samples via Box-Muller over the PCG64 uniform stream."""
    n = int(np.prod(shape))
    half = (n + 1) // 2
    u1 = rng.random(half)
    u2 = rng.random(half)
    # 1 - u1 lies in (0, 1], keeping the log finite
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    angle = 2.0 * np.pi * u2
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
    return z[:n].reshape(shape)


def uniform_symmetric(rng: np.random.Generator, shape, amplitude: float) -> np.ndarray:
    """Uniform samples on [-amplitude, amplitude]."""
    return amplitude * (2.0 * rng.random(shape) - 1.0)
