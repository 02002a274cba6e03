"""Denoising and compressed sensing with expansive ReLU generative priors.

A fixed random (or externally trained) generator ``G: R^k -> R^n`` serves
as the signal prior; observations are denoised by descending the
non-convex least-squares loss over the latent code with a sign-negation
tweak that escapes the one spurious basin.  The package also ships the
closed-form loss-landscape quantities used to analyze that descent, an
encoder-decoder attenuation check, and a seeded sweep harness that
reproduces the ``sigma^2 k / n`` denoising-rate plots as CSV.
"""

__version__ = "0.1.0"

from .autoencoder import (
    AttenuationRecord,
    Autoencoder,
    apply,
    attenuation_bound,
    attenuation_trial,
    count_region_bound,
    encode,
    local_linearization,
    random_autoencoder,
    subspace_denoise,
)
from .denoiser import (
    DenoiseMetrics,
    DenoiseProblem,
    DescentConfig,
    DescentTrace,
    DivergenceError,
    evaluate,
    noise_scale_omega,
    run,
    step_direction,
)
from .estimator import GenerativePriorDenoiser
from .experiments import (
    FitResult,
    SweepConfig,
    SweepRow,
    fit_line,
    h_slice_rows,
    load_observation,
    loss_surface_rows,
    mean_rows,
    run_sweep,
    save_observation,
    sweep_csv_lines,
    write_sweep_csv,
)
from .landscape import (
    CoverReport,
    HDecomposition,
    LandscapeContext,
    angle_between,
    direction_swap_matrix,
    g_theta,
    h_of_x,
    make_context,
    masked_gram,
    rho,
    s_beta_ball_cover_check,
    s_beta_member,
    theta_check_sequence,
    wdc_deviation,
    wdc_q_matrix,
)
from .linalg import PowerIterationError, orthonormal_columns, project_onto_span, spectral_norm
from .manifest import (
    ManifestDataError,
    ManifestError,
    ManifestFileError,
    ManifestFormatError,
    ManifestShapeError,
    load_manifest,
    save_manifest,
)
from .network import (
    ActivationPattern,
    GeneratorNetwork,
    activation_pattern,
    active_weights,
    forward,
    lambda_matrix,
    layer_active_weights,
    loss,
    random_network,
)
from .rng import Rng, derive, gaussian_matrix, gaussian_vector

__all__ = [
    "ActivationPattern",
    "AttenuationRecord",
    "Autoencoder",
    "CoverReport",
    "DenoiseMetrics",
    "DenoiseProblem",
    "DescentConfig",
    "DescentTrace",
    "DivergenceError",
    "FitResult",
    "GenerativePriorDenoiser",
    "GeneratorNetwork",
    "HDecomposition",
    "LandscapeContext",
    "ManifestDataError",
    "ManifestError",
    "ManifestFileError",
    "ManifestFormatError",
    "ManifestShapeError",
    "PowerIterationError",
    "Rng",
    "SweepConfig",
    "SweepRow",
    "activation_pattern",
    "active_weights",
    "angle_between",
    "apply",
    "attenuation_bound",
    "attenuation_trial",
    "count_region_bound",
    "derive",
    "direction_swap_matrix",
    "encode",
    "evaluate",
    "fit_line",
    "forward",
    "g_theta",
    "gaussian_matrix",
    "gaussian_vector",
    "h_of_x",
    "h_slice_rows",
    "lambda_matrix",
    "layer_active_weights",
    "load_manifest",
    "load_observation",
    "local_linearization",
    "loss",
    "loss_surface_rows",
    "make_context",
    "masked_gram",
    "mean_rows",
    "noise_scale_omega",
    "orthonormal_columns",
    "project_onto_span",
    "random_autoencoder",
    "random_network",
    "rho",
    "run",
    "run_sweep",
    "s_beta_ball_cover_check",
    "s_beta_member",
    "save_manifest",
    "save_observation",
    "spectral_norm",
    "step_direction",
    "subspace_denoise",
    "sweep_csv_lines",
    "theta_check_sequence",
    "wdc_deviation",
    "wdc_q_matrix",
    "write_sweep_csv",
]
