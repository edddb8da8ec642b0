"""Grid upsampling used as a super-resolution baseline and by PSF estimation.

Both functions place low-resolution samples at the centers of the
``rate``-voxel blocks they average, matching the block-averaging
decimation convention of :mod:`tensorsr.degradation`.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import map_coordinates

from .validation import ensure_volume
from .volume import Volume


def _check_rate(rate: int) -> int:
    if int(rate) != rate or rate < 1:
        raise ValueError(f"rate must be a positive integer, got {rate}")
    return int(rate)


def upsample_nearest(volume: Volume, rate: int) -> Volume:
    """Zero-order upsampling: replicate each voxel over its block."""
    volume = ensure_volume(volume)
    rate = _check_rate(rate)
    data = volume.data
    for axis in range(3):
        data = np.repeat(data, rate, axis=axis)
    return Volume(data, tuple(s / rate for s in volume.spacing))


def upsample_trilinear(volume: Volume, rate: int) -> Volume:
    """Trilinear interpolation onto the `rate`-times finer grid.

    High-resolution voxel h samples the low-resolution field at
    coordinate ``(h - (rate - 1) / 2) / rate`` with edge clamping.
    """
    volume = ensure_volume(volume)
    rate = _check_rate(rate)
    grids = np.meshgrid(
        *[(np.arange(rate * d) - (rate - 1) / 2.0) / rate for d in volume.dims],
        indexing="ij",
    )
    data = map_coordinates(volume.data, grids, order=1, mode="nearest")
    return Volume(data, tuple(s / rate for s in volume.spacing))
