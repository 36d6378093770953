"""k-step Lanczos tridiagonalization and Ritz extreme eigenvalues."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._backend import load_kernels
from .errors import NumericalFailureError
from .linalg import RealSymTridiagonal, _square

_k = load_kernels()

#: Breakdown threshold relative to the Frobenius norm of the input.
BREAKDOWN_RTOL = 1e-12


@dataclass(frozen=True)
class LanczosResult:
    T: RealSymTridiagonal
    basis: Optional[np.ndarray]  # (M, j_eff), columns v_1..v_j
    j_eff: int
    matvec_count: int
    breakdown: bool
    residual_norm: float  # beta of the last completed step


@dataclass(frozen=True)
class EigExtremes:
    lambda_min: float
    lambda_max: float
    method: str
    steps_used: int

    def __post_init__(self):
        if not (math.isfinite(self.lambda_min) and math.isfinite(self.lambda_max)):
            raise ValueError("eigenvalue estimates must be finite")
        if self.lambda_min > self.lambda_max:
            raise ValueError("lambda_min exceeds lambda_max")


_START_CACHE = {}


def uniform_start(M):
    v = _START_CACHE.get(M)
    if v is None:
        v = np.full(M, 1.0 / np.sqrt(M), dtype=np.complex128)
        v.flags.writeable = False
        _START_CACHE[M] = v
    return v


def _prepare(Q, k, v1):
    Q = _square(Q)
    M = Q.shape[0]
    k = int(k)
    if not 1 <= k <= M:
        raise ValueError(f"k must lie in [1, {M}], got {k}")
    if v1 is None:
        v1 = uniform_start(M)
    else:
        v1 = np.ascontiguousarray(v1, dtype=np.complex128)
        if v1.shape != (M,):
            raise ValueError(f"start vector has shape {v1.shape}, expected ({M},)")
        nrm = np.linalg.norm(v1)
        if abs(nrm - 1.0) > 1e-10:
            raise ValueError(f"start vector must be unit-norm, got norm {nrm}")
    return Q, k, v1


def lanczos_tridiagonalize(Q, k, v1=None, reorthogonalize=False, keep_basis=True):
    """Run ``k`` Lanczos steps on Hermitian ``Q`` from ``v1`` (default 1/sqrt(M)).

    The recursion stops early, flagging ``breakdown``, when a residual norm
    falls below ``BREAKDOWN_RTOL * ||Q||_F``; the Krylov space found is then
    invariant and the truncated tridiagonal is exact on it.
    ``reorthogonalize`` projects every new residual against all retained
    basis vectors (useful for k beyond ~8).
    """
    Q, k, v1 = _prepare(Q, k, v1)
    alpha, beta, V, j_eff, breakdown, ok = _k.lanczos(Q, v1, k, BREAKDOWN_RTOL, bool(reorthogonalize))
    if not ok:
        raise NumericalFailureError("non-finite value in Lanczos recursion")
    return LanczosResult(
        T=RealSymTridiagonal._trusted(alpha[:j_eff], beta[: j_eff - 1]),
        basis=V[:j_eff].T if keep_basis else None,
        j_eff=j_eff,
        matvec_count=j_eff,
        breakdown=bool(breakdown),
        residual_norm=float(beta[j_eff - 1]),
    )


def matvec_count_of(result):
    return result.matvec_count


def ritz_extremes(Q, k, v1=None, reorthogonalize=False):
    """Smallest and largest Ritz values after ``k`` Lanczos steps."""
    Q, k, v1 = _prepare(Q, k, v1)
    lo, hi, j_eff, ok = _k.lanczos_extremes(Q, v1, k, BREAKDOWN_RTOL, bool(reorthogonalize))
    if not ok:
        raise NumericalFailureError("non-finite value in Lanczos recursion")
    return EigExtremes(lo, hi, "ritz", j_eff)
