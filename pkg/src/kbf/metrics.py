"""Per-frame beamformer metrics and across-trial aggregation."""

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .beamformer import BeamWeights, mpdr_weights, steering_vector
from .scenario import true_covariance

#: Column order of per-frame metric traces and the metric CSVs.
TRACE_FIELDS = ("mu", "lambda_max", "lambda_min", "wng_db", "sinr_db", "mse", "off_axis_power")


@dataclass
class FrameMetrics:
    frame: int
    mode: str
    mu: float
    lambda_max_est: float
    lambda_min_est: float
    wng_db: float
    sinr_db: float
    mse_inst: float
    off_axis_power: float
    warmup: bool


def _w(weights):
    return weights.w if isinstance(weights, BeamWeights) else np.asarray(weights)


def output_mse(weights, y, s_target):
    """Instantaneous squared error ``|w^H y - s|^2``."""
    e = np.vdot(_w(weights), y) - s_target
    return float(e.real ** 2 + e.imag ** 2)


def sinr_db(w, d_target, target_power, R_in):
    num = target_power * abs(np.vdot(w, d_target)) ** 2
    den = float(np.vdot(w, R_in @ w).real)
    return 10.0 * np.log10(num / den)


def output_sinr(weights, sources):
    """Output SINR (dB) of ``weights`` against the true interference-plus-noise covariance."""
    _, R_in = true_covariance(sources)
    return sinr_db(_w(weights), sources.target.d, sources.target_power, R_in)


def off_axis_power(Q, angle_deg, y, spacing_ratio=0.5, factor=None):
    """``|w^H y|^2`` for MPDR weights steered to ``angle_deg`` from ``Q``."""
    d = steering_vector(angle_deg, Q.shape[0], spacing_ratio)
    w = mpdr_weights(Q, d, factor=factor).w
    p = np.vdot(w, y)
    return float(p.real ** 2 + p.imag ** 2)


def running_mean(x):
    """Cumulative mean from frame 0, skipping non-finite frames."""
    x = np.asarray(x, dtype=np.float64)
    ok = np.isfinite(x)
    num = np.cumsum(np.where(ok, x, 0.0))
    den = np.cumsum(ok)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(den > 0, num / np.maximum(den, 1), np.nan)


@dataclass
class EnsembleTrace:
    mean: np.ndarray
    trials: int
    median: Optional[np.ndarray] = None
    p05: Optional[np.ndarray] = None
    p95: Optional[np.ndarray] = None


class EnsembleAccumulator:
    """Running per-frame sum of finite values; trials are added in a fixed order."""

    def __init__(self, shape):
        self._sum = np.zeros(shape)
        self._count = np.zeros(shape, dtype=np.int64)
        self.trials = 0

    def add(self, trace):
        trace = np.asarray(trace, dtype=np.float64)
        if trace.shape != self._sum.shape:
            raise ValueError(f"trace shape {trace.shape} does not match {self._sum.shape}")
        ok = np.isfinite(trace)
        self._sum += np.where(ok, trace, 0.0)
        self._count += ok
        self.trials += 1

    def mean(self):
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self._count > 0, self._sum / np.maximum(self._count, 1), np.nan)


def ensemble_aggregate(traces, percentiles=False):
    """Per-frame mean across trials (one trace per row), ignoring non-finite entries."""
    traces = [np.asarray(t, dtype=np.float64) for t in traces]
    if not traces:
        raise ValueError("no traces to aggregate")
    if len({t.shape for t in traces}) != 1:
        raise ValueError("per-trial traces must all have the same length")
    acc = EnsembleAccumulator(traces[0].shape)
    for t in traces:
        acc.add(t)
    out = EnsembleTrace(acc.mean(), acc.trials)
    if percentiles:
        X = np.where(np.isfinite(traces), traces, np.nan)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            out.median = np.nanmedian(X, axis=0)
            out.p05, out.p95 = np.nanpercentile(X, [5, 95], axis=0)
    return out
