"""Scikit-learn style estimators wrapping the functional pipeline.

These adapters follow the ``get_params``/``set_params``/``clone``
contract, so degradation, super-resolution and PSF estimation compose
with scikit-learn tooling. Inputs and outputs are
:class:`~tensorsr.volume.Volume` objects (bare 3D arrays are accepted
and wrapped with unit spacing).
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

import numpy as np

from .degradation import DegradationConfig, degrade
from .psf import DEFAULT_FLOOR, estimate_psf
from .solver import SolverConfig, super_resolve
from .validation import ensure_volume
from .volume import Volume


class VolumeDegrader(BaseEstimator, TransformerMixin):
    """Stateless transformer applying the blur/decimate/noise forward model.

    Parameters
    ----------
    sigma : scalar or (s1, s2, s3)
        Gaussian blur standard deviations in input-voxel units.
    rate : int
        Integer block-averaging decimation rate.
    noise_sigma : float
        Standard deviation of the additive Gaussian noise.
    seed : int
        Noise stream seed.
    """

    def __init__(self, sigma=(5.8, 5.3, 0.9), rate=2, noise_sigma=0.0, seed=0):
        self.sigma = sigma
        self.rate = rate
        self.noise_sigma = noise_sigma
        self.seed = seed

    def fit(self, X=None, y=None):
        return self

    def transform(self, X) -> Volume:
        cfg = DegradationConfig(
            psf=self.sigma, rate=self.rate, noise_sigma=self.noise_sigma, seed=self.seed
        )
        return degrade(ensure_volume(X), cfg)


class TensorSuperResolver(BaseEstimator):
    """Single-volume super-resolution via low-rank tensor factorization.

    ``fit`` runs the alternating solve on the low-resolution volume and
    stores the result; like other transductive estimators the primary
    entry point is ``fit_transform``.

    Attributes
    ----------
    reconstruction_ : Volume
        High-resolution estimate (dims grown by `rate`).
    factors_ : FactorSet
        Final factor matrices.
    trace_ : SolverTrace
        Per-sweep residual norms and timings.
    """

    def __init__(
        self,
        rank=500,
        iterations=10,
        epsilon=1.0,
        sigma=(5.8, 5.3, 0.9),
        rate=2,
        seed=0,
        tol=None,
        nonneg=False,
    ):
        self.rank = rank
        self.iterations = iterations
        self.epsilon = epsilon
        self.sigma = sigma
        self.rate = rate
        self.seed = seed
        self.tol = tol
        self.nonneg = nonneg

    def fit(self, X, y=None):
        cfg = SolverConfig(
            seed=self.seed,
            rank=self.rank,
            iterations=self.iterations,
            epsilon=self.epsilon,
            psf=self.sigma,
            rate=self.rate,
            tol=self.tol,
        )
        volume, factors, trace = super_resolve(ensure_volume(X), cfg)
        if self.nonneg:
            volume = volume.with_data(np.maximum(volume.data, 0.0))
        self.reconstruction_ = volume
        self.factors_ = factors
        self.trace_ = trace
        return self

    def fit_transform(self, X, y=None) -> Volume:
        return self.fit(X).reconstruction_


class GaussianPsfEstimator(BaseEstimator):
    """Estimate separable Gaussian blur sigmas from aligned volume pairs.

    ``fit(X, y)`` takes the low-resolution volumes as `X` and their
    high-resolution counterparts as `y`.

    Attributes
    ----------
    sigma_ : (s1, s2, s3)
        Estimated standard deviations in high-resolution voxel units.
    psf_ : Volume
        Averaged spatial kernel (centered at the zero voxel).
    """

    def __init__(self, floor=DEFAULT_FLOOR, refine=False):
        self.floor = floor
        self.refine = refine

    def fit(self, X, y):
        psf, averaged = estimate_psf(X, y, floor=self.floor, refine=self.refine)
        self.sigma_ = psf.sigma
        self.psf_ = averaged
        return self

    def predict(self, X=None):
        if not hasattr(self, "sigma_"):
            raise NotFittedError("GaussianPsfEstimator is not fitted")
        return self.sigma_
