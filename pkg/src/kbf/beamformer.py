"""ULA steering, sliding-window SCM, loaded MPDR weights, WNG and Capon scans."""

from dataclasses import dataclass

import numpy as np

from ._backend import load_kernels
from .linalg import _square, cholesky_pd, solve_with_factor

_k = load_kernels()


@dataclass(frozen=True)
class SteeringVector:
    angle_deg: float
    d: np.ndarray
    spacing_ratio: float = 0.5

    @property
    def M(self):
        return self.d.shape[0]


def steering_matrix(angles_deg, M, spacing_ratio=0.5):
    """Columns are ULA steering vectors, element 0 as phase reference."""
    angles = np.atleast_1d(np.asarray(angles_deg, dtype=np.float64))
    m = np.arange(M)[:, None]
    # cos(theta) written as sin(90 - theta): exactly 0 at broadside, exactly odd about it
    cos = np.sin(np.deg2rad(90.0 - angles))
    return np.exp(-2j * np.pi * spacing_ratio * m * cos[None, :])


def steering_vector(angle_deg, M, spacing_ratio=0.5):
    if M < 1:
        raise ValueError("M must be positive")
    if not 0.0 <= angle_deg <= 180.0:
        raise ValueError(f"angle must lie in [0, 180] degrees, got {angle_deg}")
    d = steering_matrix(angle_deg, M, spacing_ratio)[:, 0]
    return SteeringVector(float(angle_deg), d, float(spacing_ratio))


def angle_grid(step_deg=1.0, lo=0.0, hi=180.0):
    n = int(round((hi - lo) / step_deg))
    return lo + step_deg * np.arange(n + 1)


class SlidingScm:
    """Rectangular-window sample covariance maintained by rank-1 add/remove.

    Until ``L`` snapshots have arrived the estimate is normalized by the
    number held.  The running sum is rebuilt from the buffer every
    ``recompute_every`` pushes to stop rounding drift.
    """

    def __init__(self, M, L, recompute_every=1024):
        if M < 1 or L < 1:
            raise ValueError("M and L must be positive")
        self.M = M
        self.L = L
        self.recompute_every = recompute_every
        self._buf = np.zeros((L, M), dtype=np.complex128)
        self._sum = np.zeros((M, M), dtype=np.complex128)
        self._head = 0
        self.fill = 0
        self.pushes = 0

    @property
    def warm(self):
        return self.fill == self.L

    @property
    def R(self):
        if self.fill == 0:
            return np.zeros((self.M, self.M), dtype=np.complex128)
        return self._sum / self.fill

    def push(self, y):
        y = np.ascontiguousarray(y, dtype=np.complex128)
        if y.shape != (self.M,):
            raise ValueError(f"snapshot has shape {y.shape}, expected ({self.M},)")
        if self.fill == self.L:
            _k.rank1_update(self._sum, self._buf[self._head], -1.0)
        else:
            self.fill += 1
        self._buf[self._head] = y
        self._head = (self._head + 1) % self.L
        self.pushes += 1
        if self.recompute_every and self.pushes % self.recompute_every == 0:
            self.recompute()
        else:
            _k.rank1_update(self._sum, y, 1.0)
        return self

    def recompute(self):
        held = self._buf if self.fill == self.L else self._buf[: self.fill]
        # outer products summed: sum_l y_l y_l^H
        self._sum = held.T @ held.conj()
        self._sum = 0.5 * (self._sum + self._sum.conj().T)

    def snapshots(self):
        """Held snapshots, oldest first."""
        if self.fill < self.L:
            return self._buf[: self.fill].copy()
        return np.roll(self._buf, -self._head, axis=0)


def scm_push(state, y):
    return state.push(y)


@dataclass(frozen=True)
class BeamWeights:
    w: np.ndarray
    steering: SteeringVector
    mu: float = 0.0


def _as_d(d):
    return d.d if isinstance(d, SteeringVector) else np.asarray(d, dtype=np.complex128)


def mpdr_weights(Q, d, mu=0.0, factor=None):
    """Distortionless minimum-power weights ``Q^-1 d / (d^H Q^-1 d)``.

    ``Q`` must already include any diagonal loading (``mu`` is only recorded).
    A precomputed Cholesky ``factor`` of ``Q`` may be passed to skip refactoring.
    """
    L = cholesky_pd(Q) if factor is None else factor
    dv = _as_d(d)
    u = solve_with_factor(L, dv)
    w = u / np.vdot(dv, u)
    if not isinstance(d, SteeringVector):
        d = SteeringVector(float("nan"), dv)
    return BeamWeights(w, d, float(mu))


def wng(weights):
    """White noise gain ``1 / (w^H w)`` as (linear, dB)."""
    w = weights.w if isinstance(weights, BeamWeights) else np.asarray(weights)
    lin = 1.0 / float(np.vdot(w, w).real)
    return lin, 10.0 * np.log10(lin)


def quiescent_beampattern(d_target, angle_deg):
    """Response in dB of the conventional weights ``d_t / M`` toward ``angle_deg``."""
    M = d_target.M
    d = steering_matrix(angle_deg, M, d_target.spacing_ratio)
    g = np.abs(d.conj().T @ d_target.d) / M
    with np.errstate(divide="ignore"):
        out = 20.0 * np.log10(g)
    return float(out[0]) if np.ndim(angle_deg) == 0 else out


def capon_power(Q, D, factor=None):
    """Linear Capon spectrum ``1 / (d^H Q^-1 d)`` for each column of ``D``."""
    L = cholesky_pd(Q) if factor is None else factor
    return 1.0 / _k.chol_quadform(L, np.ascontiguousarray(D, dtype=np.complex128))


def to_db_normalized(p):
    p = np.asarray(p, dtype=np.float64)
    return 10.0 * np.log10(p / p.max())


def scanned_response(Q, angles_deg, spacing_ratio=0.5, factor=None):
    """Capon scan over ``angles_deg`` in dB relative to its grid maximum."""
    Q = _square(Q)
    angles = np.asarray(angles_deg, dtype=np.float64)
    D = steering_matrix(angles, Q.shape[0], spacing_ratio)
    return angles, to_db_normalized(capon_power(Q, D, factor=factor))
