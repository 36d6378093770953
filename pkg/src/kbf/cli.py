"""Command line entry point: ``kbf simulate|process|scan|bench``."""

import argparse
import json
import logging
import os
import sys
import time

from . import __version__
from ._backend import BACKEND
from .bench import BENCH_HEADER, bench, slopes
from .config import EMIT_CHOICES, build_config, config_to_dict, load_config_file
from .errors import KbfError
from .harness import (
    process,
    scan_columns,
    simulate,
    single_frame_scan,
    write_process,
    write_simulation,
)
from .io import read_snapshots, write_columns, write_csv
from .loading import MODES

logger = logging.getLogger("kbf")


def _angles(text):
    try:
        return tuple(float(a) for a in text.split(",") if a.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated angles, got {text!r}")


def _int_list(text):
    try:
        return tuple(int(a) for a in text.split(",") if a.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _common(p):
    p.add_argument("--config", help="flat JSON file of configuration keys")
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", dest="modes", action="append", choices=MODES,
                   help="loading mode; repeat to run several side by side")
    p.add_argument("--k", type=int, help="Lanczos steps (default 4)")
    p.add_argument("--wmin-db", type=float, dest="wmin_db",
                   help="WNG floor in dB (default 10log10(M) - 3)")
    p.add_argument("--fixed-mu", type=float, dest="fixed_mu")
    p.add_argument("--M", type=int)
    p.add_argument("--L", type=int)
    p.add_argument("--out", dest="out_dir", default=None)


def build_parser():
    parser = argparse.ArgumentParser(prog="kbf", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbose = argparse.ArgumentParser(add_help=False)
    verbose.add_argument("-v", "--verbose", action="store_true", default=None,
                         help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[verbose], help="Monte Carlo run; writes metric and scan CSVs")
    _common(p)
    p.add_argument("--trials", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--paper-scale", action="store_true", default=None, dest="paper_scale",
                   help="200 trials of 20000 snapshots")
    p.add_argument("--workers", type=int)
    p.add_argument("--interferers", type=_angles, dest="fixed_interferers",
                   help="fixed interferer angles, e.g. 60,120 (disables birth-death)")
    p.add_argument("--emit", action="append", choices=EMIT_CHOICES,
                   help="outputs to write (default metrics and scan)")

    p = sub.add_parser("process", parents=[verbose], help="run the pipeline over a snapshot file")
    p.add_argument("input")
    _common(p)
    p.add_argument("--btr-every", type=int, default=1, help="keep every n-th frame in the BTR")

    p = sub.add_parser("scan", parents=[verbose], help="single-frame scanned response")
    _common(p)
    p.add_argument("--interferers", type=_angles, dest="fixed_interferers")
    p.add_argument("--frames", type=int, help="snapshots before the scan (default L)")
    p.add_argument("--trial", type=int, default=0)

    p = sub.add_parser("bench", parents=[verbose], help="time Lanczos vs full EVD")
    p.add_argument("--config")
    p.add_argument("--M", type=_int_list, dest="bench_M", help="e.g. 32,64,128,256")
    p.add_argument("--k", type=int)
    p.add_argument("--repetitions", type=int, dest="bench_repetitions")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", dest="out_dir", default=None)
    return parser


_NOT_CONFIG = {"command", "verbose", "config", "input", "btr_every", "frames", "trial"}


def resolve_config(args, extra=None):
    values = load_config_file(args.config) if args.config else {}
    for key, val in vars(args).items():
        if key in _NOT_CONFIG or val is None:
            continue
        values[key] = val
    values.update(extra or {})
    return build_config(values)


def _dump_config(config, out_dir):
    path = os.path.join(out_dir, "config.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(config), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def cmd_simulate(args):
    config = resolve_config(args)
    sc = config.scenario
    logger.info("simulate: %d trials x %d snapshots, modes %s, backend %s",
                sc.trials, sc.T, ",".join(config.modes), BACKEND)
    t0 = time.perf_counter()
    result = simulate(config)
    paths = write_simulation(result, config.out_dir)
    paths.append(_dump_config(config, config.out_dir))
    logger.info("done in %.1f s", time.perf_counter() - t0)
    return paths


def cmd_process(args):
    extra = {}
    if args.M is None:
        # steering follows the file unless the user pins M
        extra["M"] = read_snapshots(args.input).shape[1]
    if args.btr_every < 1:
        raise KbfError("--btr-every must be >= 1")
    config = resolve_config(args, extra)
    result = process(args.input, config)
    return write_process(result, config.out_dir, args.btr_every)


def cmd_scan(args):
    config = resolve_config(args)
    res, _ = single_frame_scan(config, frames=args.frames, trial=args.trial)
    os.makedirs(config.out_dir, exist_ok=True)
    path = os.path.join(config.out_dir, "scan.csv")
    write_columns(path, scan_columns(res.scan_angles, res.scan_final, res.labels))
    return [path]


def cmd_bench(args):
    config = resolve_config(args)
    rows = bench(config.bench_M, config.k, config.bench_repetitions, config.scenario.seed)
    os.makedirs(config.out_dir, exist_ok=True)
    path = os.path.join(config.out_dir, "bench.csv")
    write_csv(path, BENCH_HEADER, rows)
    if len(config.bench_M) >= 2:
        for method, s in slopes(rows).items():
            print(f"{method}: log-log slope {s:.2f}")
    return [path]


COMMANDS = {
    "simulate": cmd_simulate,
    "process": cmd_process,
    "scan": cmd_scan,
    "bench": cmd_bench,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        paths = COMMANDS[args.command](args)
    except KbfError as exc:
        print(f"kbf {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"kbf {args.command}: error: {exc}", file=sys.stderr)
        return 2
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
