"""WNG floor -> condition-number cap -> minimal diagonal loading."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InfeasibleLoadingError
from .lanczos import EigExtremes, ritz_extremes
from .linalg import _square, full_evd, gershgorin_bounds, trace_bounds

MODES = ("exact-evd", "lanczos", "gershgorin", "trace", "fixed", "none")

#: lambda_min estimates below this fraction of lambda_max are treated as 0.
LAMBDA_MIN_RFLOOR = 1e-14


def wng_floor_from_kappa(kappa, M):
    """Guaranteed linear WNG of an MPDR beamformer whose matrix has condition ``kappa``."""
    if not kappa >= 1.0:
        raise ValueError(f"condition number must be >= 1, got {kappa}")
    if M < 1:
        raise ValueError("M must be positive")
    if math.isinf(kappa):
        return 0.0
    return M * 4.0 * kappa / (kappa + 1.0) ** 2


@dataclass(frozen=True)
class WngBound:
    M: int
    w_min_db: float
    w_min_linear: float
    array_gain_limit: float
    kappa_max: float


def kappa_max_from_wng(w_min_db, M):
    """Largest condition number whose Kantorovich floor still meets ``w_min_db``."""
    if M < 1:
        raise ValueError("M must be positive")
    w_lin = 10.0 ** (w_min_db / 10.0)
    a_g = M / w_lin
    if a_g < 1.0 - 1e-12:
        raise ValueError(
            f"WNG floor {w_min_db:.4f} dB exceeds the maximum achievable "
            f"{10 * math.log10(M):.4f} dB for M={M}"
        )
    a_g = max(a_g, 1.0)
    kappa = (2.0 * a_g - 1.0) + 2.0 * math.sqrt(a_g * (a_g - 1.0))
    return WngBound(M=M, w_min_db=float(w_min_db), w_min_linear=w_lin,
                    array_gain_limit=a_g, kappa_max=kappa)


def default_wng_floor_db(M, margin_db=3.0):
    return 10.0 * math.log10(M) - margin_db


def required_loading(lambda_max, lambda_min, kappa_max):
    """Smallest mu >= 0 with (lambda_max + mu) / (lambda_min + mu) <= kappa_max."""
    if lambda_min < 0 or lambda_max < lambda_min:
        raise ValueError(
            f"need lambda_max >= lambda_min >= 0, got ({lambda_max}, {lambda_min})"
        )
    if kappa_max < 1.0:
        raise ValueError(f"kappa_max must be >= 1, got {kappa_max}")
    if kappa_max == 1.0:
        if lambda_max > lambda_min:
            raise InfeasibleLoadingError(
                "kappa_max = 1 cannot be reached by loading distinct eigenvalues"
            )
        return 0.0
    return max(0.0, (lambda_max - kappa_max * lambda_min) / (kappa_max - 1.0))


@dataclass(frozen=True)
class LoadingPolicy:
    mode: str
    bound: WngBound
    k: Optional[int] = None
    fixed_mu: Optional[float] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown loading mode {self.mode!r}; choose from {MODES}")
        if self.mode == "lanczos":
            if self.k is None or self.k < 1:
                raise ValueError("lanczos mode needs k >= 1")
        elif self.k is not None:
            raise ValueError(f"k is only meaningful for lanczos mode, not {self.mode}")
        if self.mode == "fixed":
            if self.fixed_mu is None or not self.fixed_mu >= 0:
                raise ValueError("fixed mode needs fixed_mu >= 0")
        elif self.fixed_mu is not None:
            raise ValueError(f"fixed_mu is only meaningful for fixed mode, not {self.mode}")

    @classmethod
    def create(cls, mode, M, w_min_db=None, k=4, fixed_mu=None):
        if w_min_db is None:
            w_min_db = default_wng_floor_db(M)
        return cls(
            mode=mode,
            bound=kappa_max_from_wng(w_min_db, M),
            k=int(k) if mode == "lanczos" else None,
            fixed_mu=float(fixed_mu) if mode == "fixed" else None,
        )


@dataclass(frozen=True)
class LoadingDecision:
    mu: float
    extremes: Optional[EigExtremes]
    policy: LoadingPolicy


def estimate_extremes(R, policy):
    """Extreme-eigenvalue estimate of ``R`` for the policy's mode (None for fixed/none)."""
    mode = policy.mode
    if mode == "exact-evd":
        w = full_evd(R)
        lo, hi = float(w[0]), float(w[-1])
        ext = EigExtremes(min(max(lo, 0.0), max(hi, 0.0)), max(hi, 0.0), "exact", R.shape[0])
    elif mode == "lanczos":
        ext = ritz_extremes(R, policy.k)
        if ext.lambda_min < 0.0:
            ext = EigExtremes(0.0, max(ext.lambda_max, 0.0), ext.method, ext.steps_used)
    elif mode in ("gershgorin", "trace"):
        sb = gershgorin_bounds(R) if mode == "gershgorin" else trace_bounds(R)
        ext = EigExtremes(sb.lower, sb.upper, sb.method, 0)
    else:
        return None
    if ext.lambda_min < LAMBDA_MIN_RFLOOR * ext.lambda_max:
        ext = EigExtremes(0.0, ext.lambda_max, ext.method, ext.steps_used)
    return ext


def compute_loading(R, policy):
    """Diagonal load for ``R`` so that ``R + mu I`` meets the policy's WNG floor."""
    R = _square(R)
    if policy.mode == "none":
        return LoadingDecision(0.0, None, policy)
    if policy.mode == "fixed":
        return LoadingDecision(policy.fixed_mu, None, policy)
    ext = estimate_extremes(R, policy)
    mu = required_loading(ext.lambda_max, ext.lambda_min, policy.bound.kappa_max)
    return LoadingDecision(mu, ext, policy)


def loaded(R, mu):
    """``R + mu I`` as a new array."""
    Q = np.array(R, dtype=np.complex128, copy=True)
    if mu:
        Q[np.diag_indices_from(Q)] += mu
    return Q
