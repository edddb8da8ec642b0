"""3D single-volume super-resolution via canonical polyadic decomposition.

The package couples a dense tensor-algebra core (factor sets, mode
products, unfoldings, Khatri-Rao products) with a separable
blur-and-decimate forward model, an alternating least-squares solver
with diagonally loaded pseudo-inverses, frequency-domain PSF estimation,
segmentation-based evaluation metrics and a phantom generator. A
scikit-learn style estimator facade and a CLI sit on top.
"""

from .degradation import (
    AxisOperator,
    DegradationConfig,
    GaussianPsf,
    circulant_blur_matrix,
    decimation_matrix,
    degrade,
    gaussian_kernel_1d,
    make_axis_operators,
)
from .estimators import GaussianPsfEstimator, TensorSuperResolver, VolumeDegrader
from .experiments import SweepPoint, reproduce_table
from .metrics import (
    BinaryMask,
    MetricsReport,
    SliceShape,
    canal_area_slice,
    compare,
    dice,
    feret_diameter_slice,
    psnr,
    segment_threshold,
)
from .phantom import PhantomSpec, generate_phantom
from .psf import (
    average_psfs,
    dft3,
    estimate_psf,
    estimate_psf_spectrum,
    fit_gaussian_psf,
    hann_taper,
    hanning_suppress,
    idft3,
)
from .resample import upsample_nearest, upsample_trilinear
from .solver import (
    SolverConfig,
    SolverDivergedError,
    SolverTrace,
    als_update_factor,
    regularized_pinv_apply,
    super_resolve,
)
from .tensor_ops import (
    FactorSet,
    build_from_factors,
    factor_matricization,
    fold,
    identifiability_bound,
    khatri_rao,
    matricize,
    mode_n_product,
)
from .volume import (
    MalformedHeaderError,
    NonFiniteValueError,
    PayloadSizeError,
    Volume,
    VolumeIOError,
    read_volume,
    write_volume,
)

__version__ = "0.1.0"

__all__ = [
    "AxisOperator",
    "BinaryMask",
    "DegradationConfig",
    "FactorSet",
    "GaussianPsf",
    "GaussianPsfEstimator",
    "MalformedHeaderError",
    "MetricsReport",
    "NonFiniteValueError",
    "PayloadSizeError",
    "PhantomSpec",
    "SliceShape",
    "SolverConfig",
    "SolverDivergedError",
    "SolverTrace",
    "SweepPoint",
    "TensorSuperResolver",
    "Volume",
    "VolumeDegrader",
    "VolumeIOError",
    "als_update_factor",
    "average_psfs",
    "build_from_factors",
    "canal_area_slice",
    "circulant_blur_matrix",
    "compare",
    "decimation_matrix",
    "degrade",
    "dft3",
    "dice",
    "estimate_psf",
    "estimate_psf_spectrum",
    "factor_matricization",
    "feret_diameter_slice",
    "fit_gaussian_psf",
    "fold",
    "gaussian_kernel_1d",
    "generate_phantom",
    "hann_taper",
    "hanning_suppress",
    "idft3",
    "identifiability_bound",
    "khatri_rao",
    "make_axis_operators",
    "matricize",
    "mode_n_product",
    "psnr",
    "read_volume",
    "regularized_pinv_apply",
    "reproduce_table",
    "segment_threshold",
    "super_resolve",
    "upsample_nearest",
    "upsample_trilinear",
    "write_volume",
]
