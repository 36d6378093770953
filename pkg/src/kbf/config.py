"""Run configuration: a flat JSON file whose values CLI flags may override."""

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .errors import ConfigurationError
from .loading import MODES, LoadingPolicy
from .scenario import ScenarioConfig

EMIT_CHOICES = ("metrics", "scan", "snapshots")

#: Desk-scale defaults; --paper-scale restores trials=200, T=20000.
DESK_TRIALS = 10
DESK_T = 4000
FULL_TRIALS = 200
FULL_T = 20000


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioConfig = field(
        default_factory=lambda: ScenarioConfig(T=DESK_T, trials=DESK_TRIALS))
    modes: Tuple[str, ...] = ("exact-evd", "lanczos")
    k: int = 4
    wmin_db: Optional[float] = None  # default: 10 log10(M) - 3
    fixed_mu: Optional[float] = None
    out_dir: str = "out"
    emit: Tuple[str, ...] = ("metrics", "scan")
    workers: int = 1
    off_axis_angle: float = 45.0
    recompute_every: int = 1024
    bench_M: Tuple[int, ...] = (32, 64, 128, 256)
    bench_repetitions: int = 30

    def __post_init__(self):
        modes = tuple(self.modes)
        if not modes:
            raise ConfigurationError("at least one loading mode is required")
        bad = [m for m in modes if m not in MODES]
        if bad:
            raise ConfigurationError(f"unknown mode(s) {bad}; choose from {MODES}")
        if len(set(modes)) != len(modes):
            raise ConfigurationError(f"duplicate modes in {modes}")
        if "fixed" in modes and self.fixed_mu is None:
            raise ConfigurationError("mode 'fixed' needs fixed_mu")
        bad = [e for e in self.emit if e not in EMIT_CHOICES]
        if bad:
            raise ConfigurationError(f"unknown emit flag(s) {bad}; choose from {EMIT_CHOICES}")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "emit", tuple(self.emit))
        object.__setattr__(self, "bench_M", tuple(int(m) for m in self.bench_M))

    def policies(self):
        M = self.scenario.M
        try:
            return [LoadingPolicy.create(m, M, self.wmin_db, k=self.k, fixed_mu=self.fixed_mu)
                    for m in self.modes]
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from exc


_SCENARIO_KEYS = {f.name for f in dataclasses.fields(ScenarioConfig)}
_RUN_KEYS = {f.name for f in dataclasses.fields(RunConfig)} - {"scenario"}


def build_config(values):
    """RunConfig from a flat mapping of scenario and run keys."""
    values = {k: v for k, v in values.items() if v is not None}
    unknown = set(values) - _SCENARIO_KEYS - _RUN_KEYS - {"paper_scale"}
    if unknown:
        raise ConfigurationError(f"unknown configuration key(s): {sorted(unknown)}")
    sc = {k: values[k] for k in values if k in _SCENARIO_KEYS}
    run = {k: values[k] for k in values if k in _RUN_KEYS}
    if values.get("paper_scale"):
        sc["trials"] = FULL_TRIALS
        sc["T"] = FULL_T
    sc.setdefault("trials", DESK_TRIALS)
    sc.setdefault("T", DESK_T)
    for key in ("quiescent_band_db", "fixed_interferers"):
        if key in sc:
            sc[key] = tuple(sc[key])
    for key in ("modes", "emit", "bench_M"):
        if key in run:
            run[key] = tuple(run[key])
    try:
        scenario = ScenarioConfig(**sc)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from exc
    return RunConfig(scenario=scenario, **run)


def load_config_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError("config file must hold a flat JSON object")
    return data


def config_to_dict(config):
    """Flat, JSON-serializable view of ``config`` (inverse of :func:`build_config`)."""
    out = dataclasses.asdict(config.scenario)
    run = dataclasses.asdict(config)
    run.pop("scenario")
    out.update(run)
    return {k: list(v) if isinstance(v, tuple) else v for k, v in out.items()}
