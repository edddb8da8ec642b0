"""Dense 3D volume container and its on-disk format.

A volume is exchanged as a pair of files: a plain-text header ``<name>.hdr``
and a raw payload ``<name>.raw``. The header holds exactly five
``key = value`` lines (UTF-8, LF endings)::

    NDims = 3
    DimSize = <I> <J> <K>
    ElementSpacing = <sx> <sy> <sz>
    ElementType = MET_FLOAT
    ElementDataFile = <name>.raw

The payload is I*J*K little-endian IEEE-754 32-bit floats with the first
index fastest: voxel (i, j, k) lives at flat offset ``i + I*j + I*J*k``.
In memory voxels are kept as float64; values that are exactly
representable in float32 (in particular anything read from disk)
round-trip bit-exactly through write/read.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

HEADER_SUFFIX = ".hdr"
RAW_SUFFIX = ".raw"
ELEMENT_TYPE = "MET_FLOAT"

_HEADER_KEYS = ("NDims", "DimSize", "ElementSpacing", "ElementType", "ElementDataFile")


class VolumeIOError(Exception):
    """A volume file pair could not be parsed."""


class MalformedHeaderError(VolumeIOError):
    """Header is missing keys, has unknown keys, or has unparseable values."""


class PayloadSizeError(VolumeIOError):
    """Raw payload length disagrees with the header dimensions."""


class NonFiniteValueError(ValueError):
    """Voxel data contains NaN or infinity."""


@dataclass(frozen=True, eq=False)
class Volume:
    """Immutable dense 3D scalar field with voxel spacing in millimeters.

    Parameters
    ----------
    data : array-like, shape (I, J, K)
        Voxel values; copied to float64 and frozen.
    spacing : (sx, sy, sz)
        Voxel edge lengths in mm, each strictly positive.
    """

    data: np.ndarray
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64)
        if arr.ndim != 3:
            raise ValueError(f"volume data must be 3D, got shape {arr.shape}")
        if min(arr.shape) < 1:
            raise ValueError(f"volume dimensions must be positive, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteValueError("volume data contains non-finite values")
        spacing = tuple(float(s) for s in self.spacing)
        if len(spacing) != 3:
            raise ValueError("spacing must have three components")
        if any(not np.isfinite(s) or s <= 0 for s in spacing):
            raise ValueError(f"spacing components must be positive, got {spacing}")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "spacing", spacing)

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape

    def with_data(self, data) -> "Volume":
        """New volume with the same spacing and different voxel values."""
        return Volume(data, self.spacing)


def _base_path(path) -> str:
    path = os.fspath(path)
    root, ext = os.path.splitext(path)
    if ext in (HEADER_SUFFIX, RAW_SUFFIX):
        return root
    return path


def write_volume(volume: Volume, path) -> None:
    """Write ``<path>.hdr`` and ``<path>.raw`` for `volume`.

    Output bytes are deterministic for identical input. Voxel values are
    stored as little-endian float32; values outside float32 precision are
    rounded, so construct volumes from float32-representable data when a
    bit-exact round-trip is required.
    """
    base = _base_path(path)
    name = os.path.basename(base)
    i, j, k = volume.dims
    sx, sy, sz = volume.spacing
    header = (
        f"NDims = 3\n"
        f"DimSize = {i} {j} {k}\n"
        f"ElementSpacing = {sx!r} {sy!r} {sz!r}\n"
        f"ElementType = {ELEMENT_TYPE}\n"
        f"ElementDataFile = {name}{RAW_SUFFIX}\n"
    )
    with open(base + HEADER_SUFFIX, "wb") as fh:
        fh.write(header.encode("utf-8"))
    payload = volume.data.ravel(order="F").astype("<f4").tobytes()
    with open(base + RAW_SUFFIX, "wb") as fh:
        fh.write(payload)


def read_volume(path) -> Volume:
    """Read a volume written by :func:`write_volume`.

    Raises
    ------
    MalformedHeaderError
        Unknown/missing header keys or invalid values.
    PayloadSizeError
        Payload byte count does not equal 4*I*J*K.
    NonFiniteValueError
        Payload decodes to NaN or infinity.
    """
    base = _base_path(path)
    header_path = base + HEADER_SUFFIX
    with open(header_path, "rb") as fh:
        text = fh.read().decode("utf-8")

    fields: dict[str, str] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in _HEADER_KEYS or key in fields:
            raise MalformedHeaderError(f"unexpected header line: {line!r}")
        fields[key] = value.strip()
    missing = [k for k in _HEADER_KEYS if k not in fields]
    if missing:
        raise MalformedHeaderError(f"missing header keys: {missing}")
    if fields["NDims"] != "3":
        raise MalformedHeaderError(f"NDims must be 3, got {fields['NDims']!r}")
    if fields["ElementType"] != ELEMENT_TYPE:
        raise MalformedHeaderError(f"unsupported ElementType {fields['ElementType']!r}")
    try:
        dims = tuple(int(t) for t in fields["DimSize"].split())
        spacing = tuple(float(t) for t in fields["ElementSpacing"].split())
    except ValueError as exc:
        raise MalformedHeaderError(f"unparseable header values: {exc}") from exc
    if len(dims) != 3 or any(d < 1 for d in dims):
        raise MalformedHeaderError(f"DimSize must be three positive integers, got {dims}")
    if len(spacing) != 3 or any(not np.isfinite(s) or s <= 0 for s in spacing):
        raise MalformedHeaderError(f"ElementSpacing must be three positive reals, got {spacing}")

    raw_path = os.path.join(os.path.dirname(header_path), fields["ElementDataFile"])
    with open(raw_path, "rb") as fh:
        payload = fh.read()
    i, j, k = dims
    expected = 4 * i * j * k
    if len(payload) != expected:
        raise PayloadSizeError(f"payload has {len(payload)} bytes, expected {expected}")
    flat = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    if not np.all(np.isfinite(flat)):
        raise NonFiniteValueError(f"payload of {raw_path!r} contains non-finite values")
    return Volume(flat.reshape(dims, order="F"), spacing)
