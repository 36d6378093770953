"""Adaptive MPDR beamforming with condition-number-capped diagonal loading.

Extreme eigenvalues of the sample covariance come either from a full
Hermitian eigendecomposition or from a few Lanczos steps; the loading that
enforces a white-noise-gain floor follows in closed form.
"""

from ._backend import BACKEND
from .beamformer import SlidingScm, mpdr_weights, scanned_response, steering_vector
from .errors import (
    ConfigurationError,
    InfeasibleLoadingError,
    KbfError,
    NotPositiveDefiniteError,
    NumericalFailureError,
    SnapshotFormatError,
)
from .lanczos import lanczos_tridiagonalize, ritz_extremes
from .linalg import full_evd
from .loading import LoadingPolicy, compute_loading, kappa_max_from_wng, required_loading
from .scenario import ScenarioConfig

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConfigurationError",
    "InfeasibleLoadingError",
    "KbfError",
    "LoadingPolicy",
    "NotPositiveDefiniteError",
    "NumericalFailureError",
    "ScenarioConfig",
    "SlidingScm",
    "SnapshotFormatError",
    "compute_loading",
    "full_evd",
    "kappa_max_from_wng",
    "lanczos_tridiagonalize",
    "mpdr_weights",
    "required_loading",
    "ritz_extremes",
    "scanned_response",
    "steering_vector",
]
