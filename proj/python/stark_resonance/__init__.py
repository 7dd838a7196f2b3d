"""Resonances of the Stark operator -d^2/dx^2 + x + V with V supported on [0, gamma]."""

from ._core import (
    AccuracyError,
    AsymptoticConstants,
    BoundaryZeroError,
    FitError,
    Potential,
    SingularError,
    SpectralPoint,
    a0,
    airy_ai,
    airy_eval,
    branch_power,
    brute_force_roots,
    condition_c_constant,
    condition_c_fit,
    counting_prediction,
    find_resonances,
    forbidden_domain_scan,
    fourier_half,
    fredholm_det,
    map_lambda_z,
    map_z_lambda,
    minus_ik_power,
    model_roots,
    predicted_model_root,
    predicted_resonance,
    s_matrix,
    zworski_count,
)

__version__ = "0.1.0"
