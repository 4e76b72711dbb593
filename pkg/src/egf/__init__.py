"""Learn empirical Green's functions of self-adjoint operators from forcing/response pairs.

A learned model is ``G(x, s) ~ sum_k sigma_k phi_k(x) phi_k(s)`` with modes
orthonormal in the quadrature inner product of a sensor grid. Two learners
are provided (single-pass POD and a two-pass randomized SVD), plus
interpolation of models across a scalar parameter on the Grassmann manifold.
"""
from .bundles import load_dataset, load_model, save_dataset, save_model
from .errors import (
    CorruptBundleError,
    DegenerateError,
    EgfError,
    IllConditionedKernelError,
    InvalidArgumentError,
    PoleError,
    RankError,
    ResonanceError,
    ShapeError,
    SolverError,
    TooLargeError,
    UnsupportedFormatError,
)
from .forcing import ForcingEnsemble, KernelConfig, covariance_factor, sample_gp
from .grid import SensorGrid, make_disk_grid, make_interval_grid, make_square_grid
from .interp import InterpolationSet, interpolate_egf, lagrange_weights, lift, match_modes, retract
from .model import EgfModel, ErrorReport, apply, densify, relative_kernel_error, test_error
from .pod import fit_coefficients, learn_pod, pod_modes
from .rsvd import SelfAdjointnessWarning, learn_rsvd
from .solvers import (
    NoiseConfig,
    ProblemSpec,
    ResponseEnsemble,
    add_noise,
    exact_kernel,
    make_solver,
    noisy,
    solve_ensemble,
)

__version__ = "0.1.0"

__all__ = [
    "CorruptBundleError", "DegenerateError", "EgfError", "EgfModel", "ErrorReport",
    "ForcingEnsemble", "IllConditionedKernelError", "InterpolationSet", "InvalidArgumentError",
    "KernelConfig", "NoiseConfig", "PoleError", "ProblemSpec", "RankError", "ResonanceError",
    "ResponseEnsemble", "SelfAdjointnessWarning", "SensorGrid", "ShapeError", "SolverError",
    "TooLargeError", "UnsupportedFormatError", "add_noise", "apply", "covariance_factor",
    "densify", "exact_kernel", "fit_coefficients", "interpolate_egf", "lagrange_weights",
    "learn_pod", "learn_rsvd", "lift", "load_dataset", "load_model", "make_disk_grid",
    "make_interval_grid", "make_solver", "make_square_grid", "match_modes", "noisy",
    "pod_modes", "relative_kernel_error", "retract", "sample_gp", "save_dataset",
    "save_model", "solve_ensemble", "test_error",
]
