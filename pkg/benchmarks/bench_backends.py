"""Numba vs numpy kernel timings.

Usage::

    python3 benchmarks/bench_backends.py [--M 15,64,256] [--repetitions 50]

Kernels are timed side by side in one process.  The end-to-end frame step
depends on the backend chosen at import, so it runs once per backend in a
child process with ``KBF_BACKEND`` set.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from kbf._backend import HAVE_NUMBA, load_kernels
from kbf.bench import random_scm
from kbf.lanczos import BREAKDOWN_RTOL, uniform_start

FRAME_SNIPPET = """
import timeit, numpy as np
from kbf.config import RunConfig
from kbf.harness import make_pipeline
from kbf.scenario import ScenarioConfig, generate_trial, build_allowed_grid
cfg = RunConfig(scenario=ScenarioConfig(T=400, trials=1), modes=("exact-evd", "lanczos"))
st = generate_trial(cfg.scenario, 0, build_allowed_grid(cfg.scenario))
pipe = make_pipeline(cfg, omniscient=False)
for t in range(cfg.scenario.L):
    pipe.step(st.Y[t])
i = [cfg.scenario.L]
def one():
    pipe.step(st.Y[i[0] % 400]); i[0] += 1
one()
print(min(timeit.repeat(one, number=200, repeat=5)) / 200)
"""


def per_call(fn, repetitions):
    fn()
    number = 20
    return min(timeit.repeat(fn, number=number, repeat=max(3, repetitions // number))) / number


def kernel_cases(K, M, rng):
    Q = random_scm(M, rng)
    v1 = uniform_start(M)
    y = (rng.standard_normal(M) + 1j * rng.standard_normal(M)) / np.sqrt(2)
    R = Q.copy()
    L, _ = K.cholesky(Q)
    D = np.stack([v1, y], axis=1)
    return {
        "lanczos_k4": lambda: K.lanczos_extremes(Q, v1, 4, BREAKDOWN_RTOL, False),
        "evd_values": lambda: K.hermitian_eigvalsh(Q),
        "cholesky": lambda: K.cholesky(Q),
        "chol_solve": lambda: K.chol_solve(L, D),
        "rank1_update": lambda: K.rank1_update(R, y, 1e-3),
        "gershgorin": lambda: K.gershgorin(Q),
    }


def frame_step(backend):
    env = dict(os.environ, KBF_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", FRAME_SNIPPET], env=env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--M", default="15,64,256")
    ap.add_argument("--repetitions", type=int, default=60)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        sys.exit("numba is not installed; nothing to compare")
    Ms = [int(m) for m in args.M.split(",")]
    backends = ("numba", "numpy")
    print(f"{'kernel':<14}{'M':>5}{'numba us':>12}{'numpy us':>12}{'speedup':>9}")
    for M in Ms:
        cases = {b: kernel_cases(load_kernels(b), M, np.random.default_rng(M)) for b in backends}
        for name in cases["numba"]:
            t = {b: per_call(cases[b][name], args.repetitions) for b in backends}
            print(f"{name:<14}{M:>5}{t['numba'] * 1e6:>12.1f}{t['numpy'] * 1e6:>12.1f}"
                  f"{t['numpy'] / t['numba']:>9.2f}")
    t = {b: frame_step(b) for b in backends}
    print(f"{'frame_step':<14}{15:>5}{t['numba'] * 1e6:>12.1f}{t['numpy'] * 1e6:>12.1f}"
          f"{t['numpy'] / t['numba']:>9.2f}")


if __name__ == "__main__":
    main()
