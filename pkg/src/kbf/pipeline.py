"""The per-frame processing chain shared by simulated and file-driven runs.

Each frame: push the snapshot into the sliding SCM, then for every loading
policy estimate extremes, load, factor once, and derive target weights,
off-axis weights, metrics and (optionally) a Capon scan from that factor.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .beamformer import SlidingScm, capon_power, steering_matrix, steering_vector
from .errors import NotPositiveDefiniteError
from .linalg import cholesky_pd, full_evd, solve_with_factor
from .loading import compute_loading, loaded
from .metrics import TRACE_FIELDS, running_mean, sinr_db
from .scenario import covariances

OMNISCIENT = "omniscient"
_MU, _LMAX, _LMIN, _WNG, _SINR, _MSE, _OFF = range(len(TRACE_FIELDS))


@dataclass
class Truth:
    """Ground-truth statistics for one active-source configuration."""

    R_y: np.ndarray
    R_in: np.ndarray
    factor: np.ndarray  # Cholesky factor of R_y
    lambda_min: float
    lambda_max: float
    target_power: float
    source_angles: tuple
    source_powers: tuple


class TruthCache:
    def __init__(self, M, spacing_ratio, target_angle, target_power, interferer_power):
        self.M = M
        self.spacing_ratio = spacing_ratio
        self.target_angle = target_angle
        self.target_d = steering_vector(target_angle, M, spacing_ratio).d
        self.target_power = target_power
        self.interferer_power = interferer_power
        self._cache = {}

    def get(self, angles):
        key = tuple(sorted(a for a in angles if a == a))
        hit = self._cache.get(key)
        if hit is None:
            R_y, R_in = covariances(self.M, self.spacing_ratio, self.target_d,
                                    self.target_power, self.interferer_power, key)
            w = full_evd(R_y)
            hit = Truth(R_y, R_in, cholesky_pd(R_y), float(w[0]), float(w[-1]),
                        self.target_power,
                        (self.target_angle,) + key,
                        (self.target_power,) + (self.interferer_power,) * len(key))
            self._cache[key] = hit
        return hit


def ground_truth_power(truth, scan_angles, noise_power=1.0):
    """Line spectrum: source powers on their nearest grid angles above the white-noise Capon floor."""
    M = truth.R_y.shape[0]
    p = np.full(scan_angles.shape, noise_power / M)
    for a, pw in zip(truth.source_angles, truth.source_powers):
        p[np.argmin(np.abs(scan_angles - a))] += pw
    return p


class FramePipeline:
    def __init__(self, M, L, policies, target_angle=90.0, spacing_ratio=0.5,
                 off_axis_angle=45.0, scan_angles=None, recompute_every=1024,
                 omniscient=False):
        self.M = M
        self.L = L
        self.policies = list(policies)
        self.omniscient = omniscient
        self.labels = [p.mode for p in self.policies] + ([OMNISCIENT] if omniscient else [])
        self.scm = SlidingScm(M, L, recompute_every)
        d_t = steering_vector(target_angle, M, spacing_ratio).d
        d_off = steering_vector(off_axis_angle, M, spacing_ratio).d
        self.d_t = d_t
        self._D2 = np.ascontiguousarray(np.column_stack([d_t, d_off]))
        self.scan_angles = (np.asarray(scan_angles, dtype=np.float64)
                            if scan_angles is not None else None)
        self._scan_D = (np.ascontiguousarray(steering_matrix(self.scan_angles, M, spacing_ratio))
                        if scan_angles is not None else None)

    @property
    def n_modes(self):
        return len(self.labels)

    def _evaluate(self, Q, L, y, s, truth, out, want_scan):
        W = solve_with_factor(L, self._D2)
        w = W[:, 0] / np.vdot(self._D2[:, 0], W[:, 0])
        w_off = W[:, 1] / np.vdot(self._D2[:, 1], W[:, 1])
        out[_WNG] = -10.0 * np.log10(np.vdot(w, w).real)
        p = np.vdot(w_off, y)
        out[_OFF] = p.real ** 2 + p.imag ** 2
        if truth is not None:
            e = np.vdot(w, y) - s
            out[_MSE] = e.real ** 2 + e.imag ** 2
            out[_SINR] = sinr_db(w, self.d_t, truth.target_power, truth.R_in)
        if want_scan:
            return capon_power(Q, self._scan_D, factor=L)
        return None

    def step(self, y, s=None, truth=None, want_scan=False):
        """Process one snapshot.

        Returns ``(rows, scans)``: rows is ``(n_modes, len(TRACE_FIELDS))``
        with nan where a value is unavailable; scans maps label to linear
        Capon power (empty unless ``want_scan``).
        """
        self.scm.push(y)
        R = self.scm.R
        rows = np.full((self.n_modes, len(TRACE_FIELDS)), np.nan)
        scans = {}
        for i, policy in enumerate(self.policies):
            dec = compute_loading(R, policy)
            rows[i, _MU] = dec.mu
            if dec.extremes is not None:
                rows[i, _LMAX] = dec.extremes.lambda_max
                rows[i, _LMIN] = dec.extremes.lambda_min
            Q = loaded(R, dec.mu)
            try:
                L = cholesky_pd(Q)
            except NotPositiveDefiniteError:
                continue
            scan = self._evaluate(Q, L, y, s, truth, rows[i], want_scan)
            if want_scan:
                scans[policy.mode] = scan
        if self.omniscient and truth is not None:
            row = rows[-1]
            row[_MU] = 0.0
            row[_LMAX] = truth.lambda_max
            row[_LMIN] = truth.lambda_min
            scan = self._evaluate(truth.R_y, truth.factor, y, s, truth, row, want_scan)
            if want_scan:
                scans[OMNISCIENT] = scan
        return rows, scans


@dataclass
class StreamResult:
    labels: List[str]
    traces: np.ndarray  # (n_modes, T, len(TRACE_FIELDS)); off-axis column is the running mean
    warmup: np.ndarray  # (T,) bool, True while the window holds fewer than L snapshots
    scan_angles: Optional[np.ndarray] = None
    scan_final: Dict[str, np.ndarray] = field(default_factory=dict)
    scan_mean: Dict[str, np.ndarray] = field(default_factory=dict)
    btr: Dict[str, np.ndarray] = field(default_factory=dict)  # label -> (T, G) linear power

    def trace(self, label, name):
        return self.traces[self.labels.index(label), :, TRACE_FIELDS.index(name)]


def run_stream(pipeline, Y, s=None, truths=None, scans="none"):
    """Drive ``pipeline`` over snapshots ``Y`` (T, M).

    ``truths`` is an optional per-frame sequence of :class:`Truth`.  ``scans``
    is ``"none"``, ``"summary"`` (final-frame and time-averaged scans) or
    ``"every"`` (a bearing-time record per mode).
    """
    T = Y.shape[0]
    traces = np.empty((pipeline.n_modes, T, len(TRACE_FIELDS)))
    warmup = np.zeros(T, dtype=bool)
    want = scans != "none" and pipeline.scan_angles is not None
    G = 0 if not want else pipeline.scan_angles.shape[0]
    res = StreamResult(pipeline.labels, traces, warmup,
                       pipeline.scan_angles if want else None)
    sums = {}
    counts = {}
    if scans == "every" and want:
        res.btr = {lab: np.full((T, G), np.nan) for lab in pipeline.labels}
    gt_sum = np.zeros(G)
    gt_count = 0
    for t in range(T):
        truth = truths[t] if truths is not None else None
        st = s[t] if s is not None else None
        rows, frame_scans = pipeline.step(Y[t], st, truth, want_scan=want)
        traces[:, t, :] = rows
        warmup[t] = not pipeline.scm.warm
        if not want:
            continue
        for lab, p in frame_scans.items():
            if scans == "every":
                res.btr[lab][t] = p
            if not warmup[t]:
                sums[lab] = sums.get(lab, 0.0) + p
                counts[lab] = counts.get(lab, 0) + 1
            if t == T - 1:
                res.scan_final[lab] = p
        if truth is not None:
            gt = ground_truth_power(truth, pipeline.scan_angles)
            if not warmup[t]:
                gt_sum = gt_sum + gt
                gt_count += 1
            if t == T - 1:
                res.scan_final["ground_truth"] = gt
    for lab in sums:
        res.scan_mean[lab] = sums[lab] / counts[lab]
    if gt_count:
        res.scan_mean["ground_truth"] = gt_sum / gt_count
    off = TRACE_FIELDS.index("off_axis_power")
    for i in range(pipeline.n_modes):
        traces[i, :, off] = running_mean(traces[i, :, off])
    return res
