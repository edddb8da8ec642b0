"""Reconstruction quality metrics: PSNR, Dice, per-slice Feret diameter and area.

Shape metrics are computed per axial slice (fixed third index) on pixel
centers: a single pixel has Feret diameter 0 and the slice area is the
pixel count times the pixel footprint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .validation import check_same_dims, check_same_spacing, ensure_volume
from .volume import Volume

MICRONS_PER_MM = 1000.0


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Boolean voxel mask sharing the dimensions and spacing of its source volume."""

    data: np.ndarray
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        arr = np.array(self.data, dtype=bool)
        if arr.ndim != 3:
            raise ValueError(f"mask must be 3D, got shape {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape

    def count(self) -> int:
        return int(self.data.sum())


@dataclass(frozen=True)
class SliceShape:
    """Feret diameter (mm) and area (mm^2) of one axial slice."""

    index: int
    feret_mm: float
    area_mm2: float


@dataclass(frozen=True)
class MetricsReport:
    """Comparison of a reconstruction against a reference volume."""

    psnr_db: float
    dice: float
    mean_abs_feret_um: float
    mean_abs_area_mm2: float
    recon_slices: tuple[SliceShape, ...]
    ref_slices: tuple[SliceShape, ...]

    def to_dict(self) -> dict:
        return {
            "psnr_db": self.psnr_db,
            "dice": self.dice,
            "mean_abs_feret_um": self.mean_abs_feret_um,
            "mean_abs_area_mm2": self.mean_abs_area_mm2,
            "slices": {
                "recon": [[s.index, s.feret_mm, s.area_mm2] for s in self.recon_slices],
                "ref": [[s.index, s.feret_mm, s.area_mm2] for s in self.ref_slices],
            },
        }

    def to_text(self) -> str:
        """Key<TAB>value lines followed by one per-slice CSV block per volume."""
        lines = [
            f"psnr_db\t{self.psnr_db!r}",
            f"dice\t{self.dice!r}",
            f"mean_abs_feret_um\t{self.mean_abs_feret_um!r}",
            f"mean_abs_area_mm2\t{self.mean_abs_area_mm2!r}",
            f"slices\t{len(self.recon_slices)}",
        ]
        for label, table in (("recon", self.recon_slices), ("ref", self.ref_slices)):
            lines.append("")
            lines.append(f"[{label}]")
            lines.append("slice,feret_mm,area_mm2")
            lines.extend(f"{s.index},{s.feret_mm!r},{s.area_mm2!r}" for s in table)
        return "\n".join(lines) + "\n"


def psnr(x: Volume, ref: Volume) -> float:
    """Peak signal-to-noise ratio in dB against `ref`.

    Uses the dynamic range of the reference; identical volumes return
    ``math.inf``. A constant reference has no dynamic range and raises.
    """
    x = ensure_volume(x)
    ref = ensure_volume(ref)
    check_same_dims(x, ref)
    dynamic_range = float(ref.data.max() - ref.data.min())
    if dynamic_range == 0:
        raise ValueError("reference volume has zero dynamic range")
    mse = float(np.mean((x.data - ref.data) ** 2))
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(dynamic_range**2 / mse)


def segment_threshold(volume: Volume, mode: str = "otsu", threshold: float | None = None) -> BinaryMask:
    """Mask of voxels darker than a threshold (the canal convention).

    ``mode="fixed"`` uses the given `threshold`; ``mode="otsu"`` picks the
    256-bin histogram split maximizing the between-class variance and
    thresholds at that bin's upper edge. Constant volumes cannot be split
    and raise in otsu mode.
    """
    volume = ensure_volume(volume)
    data = volume.data
    if mode == "fixed":
        if threshold is None:
            raise ValueError("fixed mode requires a threshold")
        cut = float(threshold)
    elif mode == "otsu":
        lo, hi = float(data.min()), float(data.max())
        if lo == hi:
            raise ValueError("otsu threshold undefined for a constant volume")
        counts, edges = np.histogram(data, bins=256, range=(lo, hi))
        centers = 0.5 * (edges[:-1] + edges[1:])
        weights = counts / counts.sum()
        cum_w = np.cumsum(weights)
        cum_mean = np.cumsum(weights * centers)
        total_mean = cum_mean[-1]
        w0 = cum_w[:-1]
        w1 = 1.0 - w0
        valid = (w0 > 0) & (w1 > 0)
        between = np.zeros(255)
        between[valid] = (total_mean * w0[valid] - cum_mean[:-1][valid]) ** 2 / (
            w0[valid] * w1[valid]
        )
        cut = float(edges[int(np.argmax(between)) + 1])
    else:
        raise ValueError(f"unknown segmentation mode {mode!r}")
    return BinaryMask(data < cut, volume.spacing)


def dice(a: BinaryMask, b: BinaryMask) -> float:
    """Overlap score 2|A&B| / (|A| + |B|); two empty masks agree perfectly."""
    if a.dims != b.dims:
        raise ValueError(f"mask dimensions disagree: {a.dims} vs {b.dims}")
    size = a.count() + b.count()
    if size == 0:
        return 1.0
    return 2.0 * float(np.logical_and(a.data, b.data).sum()) / size


def feret_diameter_slice(mask_slice, spacing) -> float:
    """Longest distance between centers of true pixels, in mm.

    Computed over the convex hull vertices, which carry the diameter;
    degenerate slices (collinear or fewer than three pixels) fall back to
    the direct pairwise maximum. Empty slices have diameter 0.
    """
    mask_slice = np.asarray(mask_slice, dtype=bool)
    if mask_slice.ndim != 2:
        raise ValueError(f"slice must be 2D, got shape {mask_slice.shape}")
    sx, sy = float(spacing[0]), float(spacing[1])
    points = np.argwhere(mask_slice) * np.array([sx, sy])
    if points.shape[0] < 2:
        return 0.0
    if points.shape[0] > 3:
        try:
            points = points[ConvexHull(points).vertices]
        except QhullError:
            pass  # collinear pixels: use every point
    deltas = points[:, None, :] - points[None, :, :]
    return float(np.sqrt((deltas**2).sum(axis=2)).max())


def canal_area_slice(mask_slice, spacing) -> float:
    """Area of the true pixels in mm^2 (pixel count times footprint)."""
    mask_slice = np.asarray(mask_slice, dtype=bool)
    if mask_slice.ndim != 2:
        raise ValueError(f"slice must be 2D, got shape {mask_slice.shape}")
    return float(mask_slice.sum()) * float(spacing[0]) * float(spacing[1])


def compare(
    recon: Volume,
    ref: Volume,
    mode: str = "otsu",
    threshold: float | None = None,
) -> MetricsReport:
    """Assemble PSNR, Dice and per-slice shape statistics for a reconstruction.

    Both volumes are segmented with the same settings; Feret and area
    differences are averaged over axial slices where either mask is
    non-empty (0 when no such slice exists).
    """
    recon = ensure_volume(recon)
    ref = ensure_volume(ref)
    check_same_dims(recon, ref)
    check_same_spacing(recon, ref)

    mask_recon = segment_threshold(recon, mode, threshold)
    mask_ref = segment_threshold(ref, mode, threshold)
    pixel_spacing = recon.spacing[:2]

    recon_slices = []
    ref_slices = []
    feret_diffs = []
    area_diffs = []
    for index in range(recon.dims[2]):
        slice_recon = mask_recon.data[:, :, index]
        slice_ref = mask_ref.data[:, :, index]
        if not (slice_recon.any() or slice_ref.any()):
            continue
        feret_r = feret_diameter_slice(slice_recon, pixel_spacing)
        feret_g = feret_diameter_slice(slice_ref, pixel_spacing)
        area_r = canal_area_slice(slice_recon, pixel_spacing)
        area_g = canal_area_slice(slice_ref, pixel_spacing)
        recon_slices.append(SliceShape(index, feret_r, area_r))
        ref_slices.append(SliceShape(index, feret_g, area_g))
        feret_diffs.append(abs(feret_r - feret_g))
        area_diffs.append(abs(area_r - area_g))

    return MetricsReport(
        psnr_db=psnr(recon, ref),
        dice=dice(mask_recon, mask_ref),
        mean_abs_feret_um=float(np.mean(feret_diffs)) * MICRONS_PER_MM if feret_diffs else 0.0,
        mean_abs_area_mm2=float(np.mean(area_diffs)) if area_diffs else 0.0,
        recon_slices=tuple(recon_slices),
        ref_slices=tuple(ref_slices),
    )
