"""Seeded birth-death interference scenario for a narrowband ULA.

Sources are circular complex Gaussian with powers relative to unit sensor
noise.  Interferer slots switch on and off with geometric dwell times and
land on a fresh angle from the allowed grid at every activation.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .beamformer import SteeringVector, angle_grid, quiescent_beampattern, steering_matrix, steering_vector
from .errors import ConfigurationError


@dataclass(frozen=True)
class ScenarioConfig:
    M: int = 15
    L: int = 37
    T: int = 20000
    trials: int = 200
    f0: float = 1000.0  # informational; geometry is carried by spacing_ratio
    spacing_ratio: float = 0.5
    snr_db: float = -5.0
    inr_db: float = 7.0
    target_angle: float = 90.0
    max_interferers: int = 2
    quiescent_band_db: Tuple[float, float] = (-13.0, -3.0)
    angle_grid_step: float = 1.0
    mean_active: float = 2000.0
    mean_inactive: float = 1000.0
    seed: int = 0
    fixed_interferers: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.M < 1:
            raise ConfigurationError("M must be >= 1")
        if not self.T >= self.L >= 1:
            raise ConfigurationError(f"need T >= L >= 1, got T={self.T}, L={self.L}")
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        lo, hi = self.quiescent_band_db
        if not lo < hi <= 0:
            raise ConfigurationError(f"quiescent band must satisfy low < high <= 0, got {(lo, hi)}")
        if self.max_interferers < 0:
            raise ConfigurationError("max_interferers must be >= 0")
        if self.mean_active < 1 or self.mean_inactive < 1:
            raise ConfigurationError("mean dwell times must be >= 1 snapshot")
        if self.angle_grid_step <= 0:
            raise ConfigurationError("angle_grid_step must be positive")
        object.__setattr__(self, "quiescent_band_db", (float(lo), float(hi)))
        if self.fixed_interferers is not None:
            object.__setattr__(self, "fixed_interferers", tuple(float(a) for a in self.fixed_interferers))

    @property
    def target_power(self):
        return 10.0 ** (self.snr_db / 10.0)

    @property
    def interferer_power(self):
        return 10.0 ** (self.inr_db / 10.0)

    @property
    def n_slots(self):
        if self.fixed_interferers is not None:
            return len(self.fixed_interferers)
        return self.max_interferers


def build_allowed_grid(config):
    """Grid angles whose quiescent response toward the target lies in the band."""
    d_t = steering_vector(config.target_angle, config.M, config.spacing_ratio)
    grid = angle_grid(config.angle_grid_step)
    b = quiescent_beampattern(d_t, grid)
    lo, hi = config.quiescent_band_db
    keep = (b >= lo) & (b <= hi) & ~np.isclose(grid, config.target_angle)
    if not keep.any():
        raise ConfigurationError(
            f"no grid angle has a quiescent response within {config.quiescent_band_db} dB"
        )
    return grid[keep]


def _geometric(rng, mean):
    if math.isinf(mean):
        return -1  # never expires
    return int(rng.geometric(1.0 / mean))


@dataclass
class InterfererSlot:
    active: bool
    angle: float  # nan while inactive
    dwell: int  # frames left in the current state; -1 never changes


@dataclass
class SourceSet:
    M: int
    spacing_ratio: float
    target: SteeringVector
    target_power: float
    interferer_power: float
    interferers: List[InterfererSlot]
    allowed_angles: np.ndarray
    mean_active: float
    mean_inactive: float
    noise_power: float = 1.0
    _cache: dict = field(default_factory=dict, repr=False)

    def active_angles(self):
        return tuple(s.angle for s in self.interferers if s.active)


def initial_sources(config, rng, allowed=None):
    """Source set at frame 0; slots start in their stationary on/off distribution."""
    if allowed is None:
        allowed = build_allowed_grid(config)
    target = steering_vector(config.target_angle, config.M, config.spacing_ratio)
    slots = []
    if config.fixed_interferers is not None:
        slots = [InterfererSlot(True, a, -1) for a in config.fixed_interferers]
    else:
        ma, mi = config.mean_active, config.mean_inactive
        p_on = 0.0 if math.isinf(mi) else (1.0 if math.isinf(ma) else ma / (ma + mi))
        for _ in range(config.max_interferers):
            if rng.random() < p_on:
                slots.append(InterfererSlot(True, float(rng.choice(allowed)), _geometric(rng, ma)))
            else:
                slots.append(InterfererSlot(False, math.nan, _geometric(rng, mi)))
    return SourceSet(
        M=config.M,
        spacing_ratio=config.spacing_ratio,
        target=target,
        target_power=config.target_power,
        interferer_power=config.interferer_power,
        interferers=slots,
        allowed_angles=allowed,
        mean_active=config.mean_active,
        mean_inactive=config.mean_inactive,
    )


def birth_death_step(state, rng):
    """Advance every slot by one frame (in place); returns ``state``."""
    for slot in state.interferers:
        if slot.dwell < 0:
            continue
        slot.dwell -= 1
        if slot.dwell > 0:
            continue
        if slot.active:
            slot.active = False
            slot.angle = math.nan
            slot.dwell = _geometric(rng, state.mean_inactive)
        else:
            slot.active = True
            slot.angle = float(rng.choice(state.allowed_angles))
            slot.dwell = _geometric(rng, state.mean_active)
    return state


def _cn(rng, power, size):
    scale = math.sqrt(power / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def synthesize_snapshot(sources, rng):
    """One array snapshot ``y`` and the target waveform sample ``s``."""
    s = complex(_cn(rng, sources.target_power, None))
    y = sources.target.d * s
    for a in sources.active_angles():
        d = steering_matrix(a, sources.M, sources.spacing_ratio)[:, 0]
        y = y + d * complex(_cn(rng, sources.interferer_power, None))
    y = y + _cn(rng, sources.noise_power, sources.M)
    return y, s


def covariances(M, spacing_ratio, target_d, target_power, interferer_power, angles, noise_power=1.0):
    """(R_y, R_in) for a target plus interferers at ``angles``."""
    R_in = noise_power * np.eye(M, dtype=np.complex128)
    if len(angles):
        D = steering_matrix(np.asarray(angles), M, spacing_ratio)
        R_in = R_in + interferer_power * (D @ D.conj().T)
    R_y = R_in + target_power * np.outer(target_d, target_d.conj())
    return R_y, R_in


def true_covariance(sources):
    """Ensemble covariance and its interference-plus-noise part for the active sources."""
    key = tuple(sorted(sources.active_angles()))
    hit = sources._cache.get(key)
    if hit is None:
        hit = covariances(sources.M, sources.spacing_ratio, sources.target.d,
                          sources.target_power, sources.interferer_power, key,
                          sources.noise_power)
        sources._cache[key] = hit
    return hit


def trial_rng(seed, trial):
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))


@dataclass
class TrialStream:
    trial: int
    Y: np.ndarray  # (T, M) snapshots
    s: np.ndarray  # (T,) target waveform
    angles: np.ndarray  # (T, slots) active interferer angles, nan when off


def generate_trial(config, trial, allowed=None):
    """Full snapshot stream for one trial; bit-identical for equal (seed, trial)."""
    rng = trial_rng(config.seed, trial)
    state = initial_sources(config, rng, allowed)
    T, slots = config.T, config.n_slots
    angles = np.full((T, slots), np.nan)
    for t in range(T):
        for j, slot in enumerate(state.interferers):
            if slot.active:
                angles[t, j] = slot.angle
        birth_death_step(state, rng)
    s = _cn(rng, config.target_power, T)
    sj = _cn(rng, config.interferer_power, (T, slots))
    v = _cn(rng, 1.0, (T, config.M))
    Y = s[:, None] * state.target.d[None, :] + v
    if slots:
        on = ~np.isnan(angles)
        D = steering_matrix(np.where(on, angles, 90.0).ravel(), config.M, config.spacing_ratio)
        D = D.T.reshape(T, slots, config.M)
        Y = Y + np.einsum("ts,tsm->tm", np.where(on, sj, 0.0), D)
    return TrialStream(trial, Y, s, angles)
