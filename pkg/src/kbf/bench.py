"""Timing of extreme-eigenvalue estimation: k-step Lanczos vs full EVD."""

import time

import numpy as np

from .lanczos import lanczos_tridiagonalize, ritz_extremes
from .linalg import full_evd

BENCH_HEADER = ("M", "method", "median_ns", "matvecs")


def random_scm(M, rng, snapshots=None):
    """Sample covariance of complex white snapshots plus unit noise floor."""
    n = 2 * M if snapshots is None else snapshots
    X = (rng.standard_normal((M, n)) + 1j * rng.standard_normal((M, n))) / np.sqrt(2 * n)
    return X @ X.conj().T + np.eye(M)


def _median_ns(fn, repetitions):
    fn()  # warm caches and any lazy compilation
    ts = np.empty(repetitions, dtype=np.int64)
    for i in range(repetitions):
        t0 = time.perf_counter_ns()
        fn()
        ts[i] = time.perf_counter_ns() - t0
    return int(np.median(ts))


def bench(M_list=(32, 64, 128, 256), k=4, repetitions=30, seed=0):
    """Rows of (M, method, median_ns, matvecs); EVD rows report matvecs as 'n/a'."""
    rng = np.random.default_rng(seed)
    rows = []
    for M in M_list:
        if M < k:
            raise ValueError(f"M={M} is smaller than k={k}")
        Q = random_scm(M, rng)
        matvecs = lanczos_tridiagonalize(Q, k, keep_basis=False).matvec_count
        t_l = _median_ns(lambda: ritz_extremes(Q, k), repetitions)
        t_e = _median_ns(lambda: full_evd(Q), repetitions)
        rows.append((M, "lanczos", t_l, matvecs))
        rows.append((M, "evd", t_e, "n/a"))
    return rows


def loglog_slope(M_values, times):
    """Least-squares slope of log(time) against log(M)."""
    x = np.log(np.asarray(M_values, dtype=np.float64))
    y = np.log(np.asarray(times, dtype=np.float64))
    return float(np.polyfit(x, y, 1)[0])


def slopes(rows):
    out = {}
    for method in ("lanczos", "evd"):
        sel = [(r[0], r[2]) for r in rows if r[1] == method]
        out[method] = loglog_slope([m for m, _ in sel], [t for _, t in sel])
    return out
