"""Synthetic tooth-like test volumes with an exactly known canal mask.

The phantom is an ellipsoidal body of bright dentin containing a dark,
tapered, gently curved canal running along the third axis, embedded in a
slightly darker background (default intensities 0.3 / 1.0 / 0.9, so the
canal is the only structure below any sensible threshold). Regions are
piecewise constant up to a bounded uniform texture, which keeps the
volume well approximated at modest tensor rank.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import sampling
from .metrics import BinaryMask
from .validation import as_triple
from .volume import Volume

# ellipsoid semi-axes as fractions of the volume extent
BODY_FRACTIONS = (0.40, 0.40, 0.45)
# canal span along the third axis as fractions of the extent
CANAL_SPAN = (0.10, 0.90)


@dataclass(frozen=True, kw_only=True)
class PhantomSpec:
    """Geometry, intensities and texture of a generated phantom.

    Canal radii are in millimeters; the canal tapers linearly from
    `canal_radius_base_mm` to `canal_radius_tip_mm` along its span and its
    centerline is displaced sideways by at most `curvature_mm`. Texture is
    uniform noise bounded by `noise_amplitude`.
    """

    dims: tuple[int, int, int] = (64, 64, 64)
    spacing: tuple[float, float, float] = (0.04, 0.04, 0.04)
    background: float = 0.9
    canal: float = 0.3
    dentin: float = 1.0
    canal_radius_base_mm: float = 0.4
    canal_radius_tip_mm: float = 0.08
    curvature_mm: float = 0.2
    noise_amplitude: float = 0.02
    seed: int = 0

    def __post_init__(self):
        dims = self.dims
        if np.ndim(dims) == 0:
            dims = (int(dims),) * 3
        dims = tuple(int(d) for d in dims)
        if len(dims) != 3 or any(d < 1 for d in dims):
            raise ValueError(f"dims must be three positive integers, got {self.dims}")
        object.__setattr__(self, "dims", dims)
        spacing = as_triple(self.spacing, "spacing")
        if any(s <= 0 for s in spacing):
            raise ValueError(f"spacing must be positive, got {spacing}")
        object.__setattr__(self, "spacing", spacing)
        if self.canal_radius_base_mm < 0 or self.canal_radius_tip_mm < 0:
            raise ValueError("canal radii must be non-negative")
        if self.curvature_mm < 0 or self.noise_amplitude < 0:
            raise ValueError("curvature and noise amplitude must be non-negative")
        if not self.canal < self.background <= self.dentin:
            raise ValueError(
                "intensities must satisfy canal < background <= dentin, got "
                f"{self.canal}, {self.background}, {self.dentin}"
            )


def canal_geometry(spec: PhantomSpec, z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Centerline (cx, cy), radius and in-span flag at heights `z` (mm).

    The span parameter t runs 0 -> 1 from canal base to tip; the radius
    interpolates linearly and the centerline bows sideways by
    ``curvature * sin(pi t)`` in x and ``0.5 * curvature * sin(2 pi t)``
    in y.
    """
    extent = [d * s for d, s in zip(spec.dims, spec.spacing)]
    z_lo, z_hi = CANAL_SPAN[0] * extent[2], CANAL_SPAN[1] * extent[2]
    t = np.clip((z - z_lo) / (z_hi - z_lo), 0.0, 1.0)
    radius = spec.canal_radius_base_mm + (spec.canal_radius_tip_mm - spec.canal_radius_base_mm) * t
    center_x = 0.5 * extent[0] + spec.curvature_mm * np.sin(np.pi * t)
    center_y = 0.5 * extent[1] + 0.5 * spec.curvature_mm * np.sin(2.0 * np.pi * t)
    in_span = (z >= z_lo) & (z <= z_hi)
    return center_x, center_y, radius, in_span


def generate_phantom(spec: PhantomSpec) -> tuple[Volume, BinaryMask]:
    """Deterministically build the phantom volume and its exact canal mask.

    A voxel belongs to the canal when its center lies strictly inside the
    analytic tube: within the canal span and closer to the centerline
    (in its axial plane) than the local radius.
    """
    i, j, k = spec.dims
    sx, sy, sz = spec.spacing
    x = (np.arange(i) + 0.5) * sx
    y = (np.arange(j) + 0.5) * sy
    z = (np.arange(k) + 0.5) * sz
    grid_x, grid_y, grid_z = np.meshgrid(x, y, z, indexing="ij")

    extent = [d * s for d, s in zip(spec.dims, spec.spacing)]
    semi = [f * e for f, e in zip(BODY_FRACTIONS, extent)]
    body = (
        ((grid_x - 0.5 * extent[0]) / semi[0]) ** 2
        + ((grid_y - 0.5 * extent[1]) / semi[1]) ** 2
        + ((grid_z - 0.5 * extent[2]) / semi[2]) ** 2
    ) <= 1.0

    center_x, center_y, radius, in_span = canal_geometry(spec, grid_z)
    planar_sq = (grid_x - center_x) ** 2 + (grid_y - center_y) ** 2
    mask = in_span & (planar_sq < radius**2)

    data = np.full(spec.dims, spec.background, dtype=np.float64)
    data[body] = spec.dentin
    data[mask] = spec.canal
    if spec.noise_amplitude > 0:
        rng = sampling.make_rng(spec.seed)
        data = data + sampling.uniform_symmetric(rng, spec.dims, spec.noise_amplitude)
    return Volume(data, spec.spacing), BinaryMask(mask, spec.spacing)
