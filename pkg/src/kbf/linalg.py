"""Dense complex Hermitian linear algebra.

Matrices are plain ``complex128`` numpy arrays; :func:`as_hermitian` is the
validating constructor.  Everything else trusts its input to be Hermitian.
"""

from dataclasses import dataclass

import numpy as np

from ._backend import load_kernels
from .errors import NotPositiveDefiniteError, NumericalFailureError

_k = load_kernels()

#: Base numeric tolerance.  Residual and symmetry contracts scale from it.
EPS = 1e-12


class OpCounter:
    """Counts matrix-vector products charged by :func:`matvec`."""

    __slots__ = ("matvecs",)

    def __init__(self):
        self.matvecs = 0

    def __repr__(self):
        return f"OpCounter(matvecs={self.matvecs})"


def as_hermitian(A, rtol=EPS):
    """Copy ``A`` into a complex Hermitian array with an exactly real diagonal.

    Raises ``ValueError`` if ``A`` is not square, not finite, or deviates
    from its conjugate transpose by more than ``rtol`` relative to its
    largest entry.
    """
    A = np.array(A, dtype=np.complex128, copy=True)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    scale = max(1.0, float(np.abs(A).max()))
    if np.abs(A - A.conj().T).max() > rtol * scale:
        raise ValueError("matrix is not Hermitian")
    np.fill_diagonal(A, A.diagonal().real)
    return A


def _square(A):
    A = np.ascontiguousarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def matvec(A, x, counter=None):
    """Return ``A @ x``, charging one product to ``counter`` if given."""
    A = _square(A)
    x = np.ascontiguousarray(x, dtype=np.complex128)
    if x.shape != (A.shape[0],):
        raise ValueError(f"dimension mismatch: matrix {A.shape}, vector {x.shape}")
    y = _k.matvec(A, x)
    if counter is not None:
        counter.matvecs += 1
    return y


def cholesky_pd(A):
    """Lower Cholesky factor of a Hermitian positive definite matrix."""
    A = _square(A)
    L, ok = _k.cholesky(A)
    if not ok:
        raise NotPositiveDefiniteError(
            "Cholesky factorization met a non-positive pivot; matrix is not "
            "numerically positive definite"
        )
    return L


def solve_with_factor(L, b):
    """Solve ``L L^H x = b`` for 1-D or 2-D ``b``."""
    b = np.asarray(b, dtype=np.complex128)
    if b.shape[0] != L.shape[0]:
        raise ValueError(f"dimension mismatch: factor {L.shape}, rhs {b.shape}")
    if b.ndim == 1:
        return _k.chol_solve(L, np.ascontiguousarray(b[:, None]))[:, 0]
    return _k.chol_solve(L, np.ascontiguousarray(b))


def solve_pd(A, b):
    """Solve ``A x = b`` for Hermitian positive definite ``A``."""
    return solve_with_factor(cholesky_pd(A), b)


def full_evd(A, vectors=False):
    """Eigenvalues (ascending) and optionally eigenvectors of a Hermitian matrix.

    The numba backend reduces to real tridiagonal form with Householder
    reflections and finishes with implicit-shift QL; the numpy backend calls
    LAPACK.
    """
    A = _square(A)
    if vectors:
        w, V, ok = _k.hermitian_eigh(A)
    else:
        w, ok = _k.hermitian_eigvalsh(A)
        V = None
    if not ok or not np.all(np.isfinite(w)):
        raise NumericalFailureError("Hermitian eigensolver did not converge")
    return (w, V) if vectors else w


@dataclass(frozen=True)
class RealSymTridiagonal:
    """Symmetric tridiagonal matrix as (diagonal, nonnegative off-diagonal)."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=np.float64))
        beta = np.atleast_1d(np.asarray(self.beta, dtype=np.float64))
        k = alpha.shape[0]
        if alpha.ndim != 1 or k < 1:
            raise ValueError("alpha must be a non-empty 1-D sequence")
        if beta.shape != (k - 1,):
            raise ValueError(f"beta must have length {k - 1}, got {beta.shape}")
        if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(beta))):
            raise ValueError("tridiagonal entries must be finite")
        if np.any(beta < 0):
            raise ValueError("off-diagonal entries must be nonnegative")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def _trusted(cls, alpha, beta):
        # for kernel output that is already float64, finite and nonnegative
        obj = object.__new__(cls)
        object.__setattr__(obj, "alpha", alpha)
        object.__setattr__(obj, "beta", beta)
        return obj

    @property
    def size(self):
        return self.alpha.shape[0]

    def dense(self):
        return np.diag(self.alpha) + np.diag(self.beta, 1) + np.diag(self.beta, -1)

    def inf_norm(self):
        rows = np.abs(self.alpha).copy()
        rows[:-1] += self.beta
        rows[1:] += self.beta
        return float(rows.max())


def tridiag_eigenvalues(T):
    """All eigenvalues of ``T`` in ascending order, by Sturm-sequence bisection."""
    return _k.tridiag_eigvals(T.alpha, T.beta)


@dataclass(frozen=True)
class SpectralBounds:
    lower: float
    upper: float
    method: str

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")


def gershgorin_bounds(A):
    """Gershgorin disc enclosure, lower end clipped at zero (PSD inputs)."""
    lo, hi = _k.gershgorin(_square(A))
    return SpectralBounds(max(0.0, float(lo)), float(hi), "gershgorin")


def trace_bounds(A):
    """The loose PSD enclosure ``[0, trace(A)]``."""
    diag = _square(A).diagonal().real
    if np.any(diag < 0):
        raise ValueError("negative diagonal entry: matrix is not positive semidefinite")
    return SpectralBounds(0.0, float(diag.sum()), "trace")
