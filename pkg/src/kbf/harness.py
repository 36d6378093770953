"""Experiment orchestration: Monte Carlo simulation, file processing, scans."""

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

import numpy as np

from .beamformer import angle_grid, to_db_normalized
from .config import RunConfig
from .errors import ConfigurationError
from .io import read_snapshots, write_columns, write_csv, write_snapshots
from .metrics import TRACE_FIELDS, EnsembleAccumulator
from .pipeline import OMNISCIENT, FramePipeline, StreamResult, TruthCache, run_stream
from .scenario import build_allowed_grid, generate_trial

logger = logging.getLogger(__name__)

METRIC_HEADER = ("frame",) + TRACE_FIELDS


def make_pipeline(config, omniscient=True):
    sc = config.scenario
    return FramePipeline(
        sc.M, sc.L, config.policies(),
        target_angle=sc.target_angle,
        spacing_ratio=sc.spacing_ratio,
        off_axis_angle=config.off_axis_angle,
        scan_angles=angle_grid(sc.angle_grid_step),
        recompute_every=config.recompute_every,
        omniscient=omniscient,
    )


def run_trial(config, trial, scans="none", allowed=None):
    """Generate and process one trial; returns (StreamResult, TrialStream)."""
    sc = config.scenario
    stream = generate_trial(sc, trial, allowed)
    cache = TruthCache(sc.M, sc.spacing_ratio, sc.target_angle,
                       sc.target_power, sc.interferer_power)
    truths = [cache.get(row) for row in stream.angles]
    res = run_stream(make_pipeline(config), stream.Y, stream.s, truths, scans)
    return res, stream


def _trial_job(args):
    config, trial, allowed = args
    res, _ = run_trial(config, trial, "summary" if trial == 0 else "none", allowed)
    return res


@dataclass
class SimulationResult:
    config: RunConfig
    labels: List[str]
    ensemble: np.ndarray  # (n_modes, T, len(TRACE_FIELDS)) per-frame means over trials
    warmup: np.ndarray
    scan_angles: np.ndarray
    scan_final: Dict[str, np.ndarray]
    scan_mean: Dict[str, np.ndarray]
    trial_traces: Optional[List[np.ndarray]] = field(default=None, repr=False)

    def mean(self, label, name):
        return self.ensemble[self.labels.index(label), :, TRACE_FIELDS.index(name)]

    def per_trial(self, label, name):
        """(trials, T) array of one metric; needs ``keep_trials=True``."""
        if self.trial_traces is None:
            raise ValueError("simulation was run without keep_trials")
        i, j = self.labels.index(label), TRACE_FIELDS.index(name)
        return np.stack([t[i, :, j] for t in self.trial_traces])


def simulate(config, keep_trials=False):
    """Run every trial and reduce to per-frame ensemble means.

    Trials are reduced in index order, so results do not depend on
    ``config.workers``.
    """
    sc = config.scenario
    allowed = None if sc.fixed_interferers is not None else build_allowed_grid(sc)
    config.policies()  # validate before spawning workers
    jobs = [(config, t, allowed) for t in range(sc.trials)]
    if config.workers > 1 and sc.trials > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = pool.map(_trial_job, jobs)
            return _reduce(config, results, keep_trials)
    return _reduce(config, map(_trial_job, jobs), keep_trials)


def _reduce(config, results, keep_trials):
    acc = None
    kept = [] if keep_trials else None
    first = None
    for res in results:
        if acc is None:
            acc = EnsembleAccumulator(res.traces.shape)
            first = res
        acc.add(res.traces)
        if keep_trials:
            kept.append(res.traces)
    return SimulationResult(
        config=config,
        labels=list(first.labels),
        ensemble=acc.mean(),
        warmup=first.warmup,
        scan_angles=first.scan_angles,
        scan_final=first.scan_final,
        scan_mean=first.scan_mean,
        trial_traces=kept,
    )


def write_metrics(path, traces):
    T = traces.shape[0]
    rows = ((t,) + tuple(traces[t]) for t in range(T))
    write_csv(path, METRIC_HEADER, rows)


def scan_columns(angles, scan, labels):
    cols = {"angle_deg": angles}
    order = ["ground_truth", OMNISCIENT] + [lab for lab in labels if lab != OMNISCIENT]
    for lab in order:
        if lab in scan:
            cols[f"{lab}_db"] = to_db_normalized(scan[lab])
    return cols


def write_simulation(result, out_dir):
    """Write metric and scan CSVs; returns the list of paths written."""
    os.makedirs(out_dir, exist_ok=True)
    cfg = result.config
    written = []
    if "metrics" in cfg.emit:
        for i, lab in enumerate(result.labels):
            path = os.path.join(out_dir, f"metrics_{lab}.csv")
            write_metrics(path, result.ensemble[i])
            written.append(path)
    if "scan" in cfg.emit and result.scan_final:
        for name, scan in (("scan.csv", result.scan_final), ("scan_time_avg.csv", result.scan_mean)):
            path = os.path.join(out_dir, name)
            write_columns(path, scan_columns(result.scan_angles, scan, result.labels))
            written.append(path)
    if "snapshots" in cfg.emit:
        sc = cfg.scenario
        allowed = None if sc.fixed_interferers is not None else build_allowed_grid(sc)
        stream = generate_trial(sc, 0, allowed)
        path = os.path.join(out_dir, "snapshots.kbf")
        write_snapshots(path, stream.Y)
        written.append(path)
    return written


def process(path, config):
    """Run the frame pipeline over a snapshot file (no ground truth available)."""
    Y = read_snapshots(path)
    M = Y.shape[1]
    if M != config.scenario.M:
        raise ConfigurationError(
            f"snapshot file has M={M} channels but the steering configuration expects "
            f"M={config.scenario.M}")
    if Y.shape[0] < config.scenario.L:
        logger.warning("file holds %d snapshots, fewer than the window length %d",
                       Y.shape[0], config.scenario.L)
    return run_stream(make_pipeline(config, omniscient=False), Y, scans="every")


def write_process(result, out_dir, btr_every=1):
    os.makedirs(out_dir, exist_ok=True)
    written = []
    angles = result.scan_angles
    for i, lab in enumerate(result.labels):
        btr = result.btr[lab]
        T = btr.shape[0]

        def rows(btr=btr, T=T):
            for t in range(0, T, btr_every):
                if np.all(np.isnan(btr[t])):
                    db = btr[t]
                else:
                    db = to_db_normalized(btr[t])
                for a, p in zip(angles, db):
                    yield t, a, p

        path = os.path.join(out_dir, f"btr_{lab}.csv")
        write_csv(path, ("frame", "angle", "power_db"), rows())
        written.append(path)
        path = os.path.join(out_dir, f"metrics_{lab}.csv")
        write_metrics(path, result.traces[i])
        written.append(path)
    return written


def single_frame_scan(config, frames=None, trial=0):
    """Capon scans at the last frame of one trial with ``frames`` snapshots (default L)."""
    sc = config.scenario
    frames = sc.L if frames is None else frames
    cfg = replace(config, scenario=replace(sc, T=frames, trials=1))
    allowed = None if sc.fixed_interferers is not None else build_allowed_grid(sc)
    res, stream = run_trial(cfg, trial, "summary", allowed)
    return res, stream
