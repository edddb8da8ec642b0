"""Separable blur-and-decimate forward model.

A high-resolution volume is degraded per axis by a circulant Gaussian
blur followed by block averaging at an integer rate, then corrupted by
additive Gaussian noise. Each axis is handled by one dense operator
``D @ H`` so the whole model is a chain of three mode products.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import sampling
from .tensor_ops import mode_n_product
from .validation import as_triple, check_divisible, ensure_volume
from .volume import Volume


@dataclass(frozen=True)
class GaussianPsf:
    """Separable Gaussian blur described by one standard deviation per axis.

    Sigmas are expressed in high-resolution voxel units; zero means no
    blur along that axis.
    """

    sigma: tuple[float, float, float]

    def __post_init__(self):
        sigma = as_triple(self.sigma, "sigma")
        if any(not np.isfinite(s) or s < 0 for s in sigma):
            raise ValueError(f"sigma components must be finite and non-negative, got {sigma}")
        object.__setattr__(self, "sigma", sigma)


def as_psf(value) -> GaussianPsf:
    if isinstance(value, GaussianPsf):
        return value
    return GaussianPsf(as_triple(value, "sigma"))


@dataclass(frozen=True, kw_only=True)
class DegradationConfig:
    """Forward-model parameters: blur sigmas, decimation rate, noise level."""

    psf: GaussianPsf
    rate: int = 1
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "psf", as_psf(self.psf))
        if int(self.rate) != self.rate or self.rate < 1:
            raise ValueError(f"rate must be a positive integer, got {self.rate}")
        object.__setattr__(self, "rate", int(self.rate))
        if not np.isfinite(self.noise_sigma) or self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be non-negative, got {self.noise_sigma}")


@dataclass(frozen=True)
class AxisOperator:
    """Dense blur-then-average operator for one axis, shape (size/rate, size)."""

    matrix: np.ndarray
    axis: int
    rate: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        rows, cols = m.shape
        if cols % self.rate or rows != cols // self.rate:
            raise ValueError(f"operator shape {m.shape} inconsistent with rate {self.rate}")
        object.__setattr__(self, "matrix", m)


def gaussian_kernel_1d(sigma: float, length: int) -> np.ndarray:
    """Circularly centered sampled Gaussian, normalized to sum to 1.

    Entry ``i`` is ``exp(-d^2 / (2 sigma^2))`` with circular distance
    ``d = min(i, length - i)``; ``sigma = 0`` degenerates to a discrete
    delta at the zero-shift position.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    if length < 1:
        raise ValueError(f"length must be positive, got {length}")
    variance = sigma * sigma  # underflows to 0 for subnormal sigma: same as a delta
    if variance == 0:
        kernel = np.zeros(length)
        kernel[0] = 1.0
        return kernel
    idx = np.arange(length)
    d = np.minimum(idx, length - idx).astype(np.float64)
    with np.errstate(over="ignore"):
        kernel = np.exp(-(d**2) / (2.0 * variance))
    return kernel / kernel.sum()


def circulant_blur_matrix(kernel, size: int) -> np.ndarray:
    """Circulant matrix realizing circular convolution with `kernel`.

    ``out[i, j] = kernel[(i - j) mod size]``: the first column is the
    kernel and every row is a cyclic shift of the previous one, so a
    normalized kernel yields rows summing to 1.
    """
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim != 1 or kernel.shape[0] != size:
        raise ValueError(f"kernel must have length {size}, got shape {kernel.shape}")
    return scipy.linalg.circulant(kernel)


def decimation_matrix(size: int, rate: int) -> np.ndarray:
    """Block-averaging downsampler of shape (size/rate, size).

    Row ``b`` holds ``1/rate`` on columns ``b*rate .. b*rate + rate - 1``.
    """
    if rate < 1:
        raise ValueError(f"rate must be positive, got {rate}")
    if size % rate:
        raise ValueError(f"rate {rate} does not divide size {size}")
    return np.kron(np.eye(size // rate), np.full(rate, 1.0 / rate))


def make_axis_operators(dims, cfg: DegradationConfig) -> tuple[AxisOperator, AxisOperator, AxisOperator]:
    """Per-axis ``D @ H`` operators for a volume of high-resolution `dims`."""
    dims = tuple(int(d) for d in dims)
    check_divisible(dims, cfg.rate)
    ops = []
    for axis, (size, sigma) in enumerate(zip(dims, cfg.psf.sigma), start=1):
        blur = circulant_blur_matrix(gaussian_kernel_1d(sigma, size), size)
        matrix = decimation_matrix(size, cfg.rate) @ blur
        ops.append(AxisOperator(matrix, axis, cfg.rate))
    return tuple(ops)


def degrade(x: Volume, cfg: DegradationConfig) -> Volume:
    """Apply the forward model: blur+average each axis, then add noise.

    Output dimensions are ``dims / rate`` and spacing grows by `rate`.
    With ``noise_sigma = 0`` the result is deterministic; otherwise the
    noise field is Gaussian with the configured standard deviation, drawn
    from the seeded stream in :mod:`tensorsr.sampling`.
    """
    x = ensure_volume(x)
    ops = make_axis_operators(x.dims, cfg)
    out = x
    for op in ops:
        out = mode_n_product(out, op.matrix, op.axis)
    data = out.data
    if cfg.noise_sigma > 0:
        rng = sampling.make_rng(cfg.seed)
        data = data + cfg.noise_sigma * sampling.standard_normal(rng, data.shape)
    spacing = tuple(s * cfg.rate for s in x.spacing)
    return Volume(data, spacing)
