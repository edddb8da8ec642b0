"""Off-line estimation of the separable Gaussian blur from HR/LR pairs.

For each aligned pair the blur transfer function is estimated as the
ratio of the discrete Fourier transforms LR/HR with a floored
denominator, tapered by a separable Hann window to suppress unstable
high-frequency bins, and transformed back to a spatial kernel. Kernels
from several pairs are averaged and a separable Gaussian is fitted to
the average.

The Hann taper ``0.5 * (1 + cos(2 pi k / N))`` applied in the frequency
domain equals circular convolution with the 3-tap kernel
``[0.25, 0.5, 0.25]`` along each axis, which inflates the kernel's
second moment by exactly 0.5 per axis; the pipeline removes that known
contribution after fitting.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import curve_fit

from .degradation import GaussianPsf
from .resample import upsample_nearest
from .validation import check_same_dims, ensure_volume
from .volume import Volume

# per-axis second moment of the 3-tap spatial kernel the Hann taper equals
TAPER_VARIANCE = 0.5

DEFAULT_FLOOR = 1e-3


def dft3(volume: Volume) -> np.ndarray:
    """3D discrete Fourier transform; bin (a, b, c) matches numpy's fftn layout."""
    return np.fft.fftn(ensure_volume(volume).data)


def idft3(spectrum, spacing=(1.0, 1.0, 1.0)) -> Volume:
    """Inverse 3D DFT, keeping the real part."""
    spectrum = np.asarray(spectrum)
    if spectrum.ndim != 3:
        raise ValueError(f"spectrum must be 3D, got shape {spectrum.shape}")
    return Volume(np.fft.ifftn(spectrum).real, spacing)


def estimate_psf_spectrum(lr_upsampled: Volume, hr: Volume, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    """Per-bin ratio dft3(lr) / dft3(hr) with a floored denominator.

    Denominator bins with magnitude below ``floor * max`` are pushed up
    to that magnitude (phase preserved; zero bins become real) so the
    ratio stays finite everywhere.
    """
    lr_upsampled = ensure_volume(lr_upsampled)
    hr = ensure_volume(hr)
    check_same_dims(lr_upsampled, hr)
    if not floor > 0:
        raise ValueError(f"floor must be positive, got {floor}")
    numerator = dft3(lr_upsampled)
    denominator = dft3(hr)
    magnitude = np.abs(denominator)
    peak = magnitude.max()
    floor_value = floor * peak if peak > 0 else 1.0
    small = magnitude < floor_value
    boosted = np.where(
        magnitude > 0,
        denominator * (floor_value / np.maximum(magnitude, np.finfo(float).tiny)),
        floor_value,
    )
    return numerator / np.where(small, boosted, denominator)


def hann_taper(dims) -> np.ndarray:
    """Separable Hann window over the fftn frequency layout.

    Along an axis of length N the factor at bin m is
    ``0.5 * (1 + cos(2 pi k / N))`` with centered index k (k = 0 at DC,
    where the factor is exactly 1).
    """
    axes = [0.5 * (1.0 + np.cos(2.0 * np.pi * np.fft.fftfreq(int(n)))) for n in dims]
    return axes[0][:, None, None] * axes[1][None, :, None] * axes[2][None, None, :]


def hanning_suppress(spectrum) -> np.ndarray:
    """Attenuate high frequencies by the separable Hann taper."""
    spectrum = np.asarray(spectrum)
    if spectrum.ndim != 3:
        raise ValueError(f"spectrum must be 3D, got shape {spectrum.shape}")
    return spectrum * hann_taper(spectrum.shape)


def average_psfs(psfs) -> Volume:
    """Voxelwise mean of equally sized kernel volumes."""
    psfs = [ensure_volume(p) for p in psfs]
    if not psfs:
        raise ValueError("need at least one kernel volume")
    for p in psfs[1:]:
        check_same_dims(psfs[0], p)
    stacked = np.stack([p.data for p in psfs])
    return Volume(stacked.mean(axis=0), psfs[0].spacing)


def _axis_profile(weights: np.ndarray, axis: int) -> tuple[np.ndarray, np.ndarray]:
    other = tuple(a for a in range(3) if a != axis)
    marginal = weights.sum(axis=other)
    n = marginal.shape[0]
    idx = np.arange(n)
    offsets = np.where(idx <= n // 2, idx, idx - n).astype(np.float64)
    return offsets, marginal


def fit_gaussian_psf(psf: Volume, refine: bool = False) -> GaussianPsf:
    """Fit a separable Gaussian to a kernel centered at the zero voxel.

    Negative values are clipped, the kernel is normalized and each sigma
    is taken as the square root of the marginal second moment over
    circularly centered offsets. With ``refine=True`` each axis is
    re-fitted by nonlinear least squares on its marginal profile
    (falling back to the moment value if the fit does not converge).
    The result is invariant to positive scaling of the input.
    """
    psf = ensure_volume(psf)
    weights = np.clip(psf.data, 0.0, None)
    total = weights.sum()
    if total <= 0:
        raise ValueError("kernel has no positive mass")
    weights = weights / total
    sigmas = []
    for axis in range(3):
        offsets, marginal = _axis_profile(weights, axis)
        sigma = float(np.sqrt(np.sum(marginal * offsets**2)))
        if refine:
            scale = marginal.max()

            def gauss(d, amplitude, s):
                return amplitude * np.exp(-(d**2) / (2.0 * s**2))

            try:
                popt, _ = curve_fit(
                    gauss, offsets, marginal, p0=[scale, max(sigma, 0.3)], maxfev=10_000
                )
                sigma = float(abs(popt[1]))
            except (RuntimeError, ValueError):
                pass
        sigmas.append(sigma)
    return GaussianPsf(tuple(sigmas))


def estimate_psf(
    lr_volumes,
    hr_volumes,
    floor: float = DEFAULT_FLOOR,
    refine: bool = False,
) -> tuple[GaussianPsf, Volume]:
    """Full estimation pipeline over aligned (LR, HR) volume pairs.

    Low-resolution inputs whose dimensions divide the high-resolution
    ones are first replicated onto the fine grid. Per pair: spectrum
    ratio, Hann suppression, inverse transform; the kernels are then
    averaged in the spatial domain and fitted. The taper's known second
    moment (`TAPER_VARIANCE` per axis) is subtracted from the fitted
    variances before returning the sigmas.
    """
    lr_volumes = [ensure_volume(v) for v in lr_volumes]
    hr_volumes = [ensure_volume(v) for v in hr_volumes]
    if not lr_volumes:
        raise ValueError("need at least one volume pair")
    if len(lr_volumes) != len(hr_volumes):
        raise ValueError(f"got {len(lr_volumes)} LR and {len(hr_volumes)} HR volumes")
    kernels = []
    for lr, hr in zip(lr_volumes, hr_volumes):
        if lr.dims != hr.dims:
            rates = {h // l for h, l in zip(hr.dims, lr.dims)}
            if len(rates) != 1 or any(h % l for h, l in zip(hr.dims, lr.dims)):
                raise ValueError(f"LR dims {lr.dims} do not evenly divide HR dims {hr.dims}")
            lr = upsample_nearest(lr, rates.pop())
        ratio = hanning_suppress(estimate_psf_spectrum(lr, hr, floor))
        kernels.append(idft3(ratio, hr.spacing))
    averaged = average_psfs(kernels)
    fitted = fit_gaussian_psf(averaged, refine=refine)
    corrected = tuple(
        float(np.sqrt(max(s**2 - TAPER_VARIANCE, 0.0))) for s in fitted.sigma
    )
    return GaussianPsf(corrected), averaged
