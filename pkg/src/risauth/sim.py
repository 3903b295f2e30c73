"""Monte Carlo trial batches, TPR/FPR and ROC curves.

Each trial is one deployment: a fresh legitimate channel draw, a baseline
from ``n_pilots`` noisy pilot measurements on that channel, one legitimate
authentication attempt on the same channel with fresh noise, and one attack
per Eve with fresh Eve channels. Every trial draws from its own stream keyed
by ``(master_seed, trial, role, attacker)``, so results do not depend on
chunking or worker count.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np
from numpy.random import Generator

from . import kernels
from .adversary import (
    DEFAULT_P_S,
    AttackKind,
    AttackSpec,
    impersonation_amplitudes,
    relay_amplitudes,
    replay_amplitudes,
)
from .auth import DEFAULT_PILOTS, SPREAD_FLOOR
from .channel import (
    ChannelRealization,
    RicianParams,
    RisConfig,
    RisMode,
    ScenarioGeometry,
    cascade_coefficient,
    optimal_ris_phases,
    sample_eve_batch,
    sample_legit_batch,
)
from .circuit import CircuitParams, NoiseParams, legit_amplitudes
from .errors import ConfigError

ROLE_DEPLOY, ROLE_LEGIT, ROLE_ATTACK = 0, 1, 2
GRID_POINTS = 512
GRID_FLOOR = 1e-3
TABLE_FPRS = (0.15, 0.20, 0.25, 0.30)
CHUNK = 2048


class Label(enum.Enum):
    LEGIT = "legit"
    ATTACK = "attack"


@dataclass(frozen=True)
class TrialConfig:
    geometry: ScenarioGeometry = field(default_factory=ScenarioGeometry)
    rician: RicianParams = field(default_factory=RicianParams)
    circuit: CircuitParams = field(default_factory=CircuitParams)
    noise: NoiseParams = field(default_factory=NoiseParams)
    p_s: float = DEFAULT_P_S
    ris_mode: RisMode | None = None
    attack: AttackSpec | None = field(default_factory=AttackSpec)
    n_trials: int = 10_000
    master_seed: int = 0
    n_pilots: int = DEFAULT_PILOTS
    channel_drift: bool = False
    drift_rho: float = 0.98

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        if not self.p_s > 0:
            raise ValueError("p_s must be > 0")
        if self.n_pilots < 2:
            raise ValueError("n_pilots must be >= 2")
        if not 0.0 <= self.drift_rho <= 1.0:
            raise ValueError("drift_rho must lie in [0, 1]")
        if self.ris_mode is None:
            mode = RisMode.OPTIMAL if self.geometry.n_elements > 0 else RisMode.ABSENT
            object.__setattr__(self, "ris_mode", mode)
        if self.ris_mode not in (RisMode.OPTIMAL, RisMode.ABSENT):
            raise ValueError("ris_mode must be OPTIMAL or ABSENT")
        if self.ris_mode is RisMode.OPTIMAL and self.geometry.n_elements == 0:
            raise ValueError("optimal RIS mode needs n_elements > 0")

    def with_geometry(self, **changes) -> TrialConfig:
        geom = replace(self.geometry, **changes)
        mode = None if "n_elements" in changes else self.ris_mode
        return replace(self, geometry=geom, ris_mode=mode)


@dataclass(frozen=True)
class TrialOutcome:
    label: Label
    score: float
    attack_kind: AttackKind | None = None
    tampered: bool = False


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    fpr: float
    tpr: float


class RateEstimate(NamedTuple):
    tpr: float
    extrapolated: bool


@dataclass
class SimResult:
    legit: np.ndarray
    attack: np.ndarray | None
    mean_incident_power: float
    config: TrialConfig
    legit_deltas: np.ndarray | None = None  # (T, 2) raw (harvester, demodulator) deviations in volts

    @property
    def mean_snr_db(self) -> float:
        s2 = self.config.noise.sigma2_l
        return math.inf if s2 == 0 else 10.0 * math.log10(self.mean_incident_power / s2)


def trial_rng(master_seed: int, trial: int, role: int, sub: int = 0) -> Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(trial, role, sub)))


def _cnormal(rngs: Sequence[Generator], shape: tuple, sigma2: float) -> np.ndarray:
    z = np.empty((len(rngs), *shape, 2))
    for i, rng in enumerate(rngs):
        z[i] = rng.standard_normal((*shape, 2))
    return np.sqrt(sigma2 / 2.0) * (z[..., 0] + 1j * z[..., 1])


def _ris_for(cfg: TrialConfig, real: ChannelRealization) -> RisConfig:
    if cfg.ris_mode is RisMode.OPTIMAL:
        return optimal_ris_phases(real)
    return RisConfig.absent()


def _legit_amps(cfg: TrialConfig, real: ChannelRealization, ris: RisConfig) -> np.ndarray:
    cascade = real.h_ST * cascade_coefficient(real.H_TR, real.H_RL, ris)
    return legit_amplitudes(cfg.p_s, cfg.circuit.gammas, real.h_ST * real.h_TL, cascade)


def _drift(cfg: TrialConfig, real: ChannelRealization, rngs) -> ChannelRealization:
    """Age the legitimate channel: rho * h + sqrt(1 - rho^2) * fresh draw, link by link."""
    fresh = sample_legit_batch(cfg.geometry, cfg.rician, rngs)
    rho = cfg.drift_rho
    mix = lambda a, b: rho * a + math.sqrt(1.0 - rho * rho) * b  # noqa: E731
    return ChannelRealization(
        h_ST=mix(real.h_ST, fresh.h_ST), h_SL=mix(real.h_SL, fresh.h_SL), h_TL=mix(real.h_TL, fresh.h_TL),
        H_TR=mix(real.H_TR, fresh.H_TR), H_RL=mix(real.H_RL, fresh.H_RL),
    )


def _attack_amps(cfg: TrialConfig, real: ChannelRealization, ris: RisConfig, rngs) -> np.ndarray:
    spec, cp, geom = cfg.attack, cfg.circuit, cfg.geometry
    eve_real = replace(real, **sample_eve_batch(geom, cfg.rician, rngs))
    if spec.kind is AttackKind.IMPERSONATION:
        return impersonation_amplitudes(cfg.p_s, eve_real, ris, cp)
    if spec.kind is AttackKind.REPLAY:
        record = replace(sample_legit_batch(geom, cfg.rician, rngs), **sample_eve_batch(geom, cfg.rician, rngs))
        record_noise = _cnormal(rngs, (2,), cfg.noise.sigma2_e)
        return replay_amplitudes(cfg.p_s, record, eve_real, ris, cp, record_noise)
    if spec.kind in (AttackKind.RELAY, AttackKind.MITM):
        forward_noise = _cnormal(rngs, (2,), cfg.noise.sigma2_e)
        return relay_amplitudes(cfg.p_s, eve_real, ris, cp, forward_noise, spec.relay_gain)
    raise ConfigError("attack.kind", f"unknown attack kind {spec.kind!r}")


def _simulate_chunk(cfg: TrialConfig, start: int, stop: int, with_attack: bool):
    trials = range(start, stop)
    args = kernels.circuit_args(cfg.circuit)
    sigma2_l = cfg.noise.sigma2_l

    deploy = [trial_rng(cfg.master_seed, t, ROLE_DEPLOY) for t in trials]
    real = sample_legit_batch(cfg.geometry, cfg.rician, deploy)
    ris = _ris_for(cfg, real)
    amps = _legit_amps(cfg, real, ris)
    pilots = _cnormal(deploy, (cfg.n_pilots, 2, 2), sigma2_l)
    mean, std = kernels.pilot_stats(amps, pilots, *args)

    legit_rngs = [trial_rng(cfg.master_seed, t, ROLE_LEGIT) for t in trials]
    if cfg.channel_drift:
        aged = _drift(cfg, real, legit_rngs)
        legit_amps = _legit_amps(cfg, aged, _ris_for(cfg, aged))
    else:
        legit_amps = amps
    noise = _cnormal(legit_rngs, (2, 2), sigma2_l)
    legit, d_hrv, d_dem = kernels.profile_scores(legit_amps, noise, mean, std, *args, SPREAD_FLOOR)

    attack = None
    if with_attack:
        per_eve = []
        for j in range(cfg.attack.n_eve):
            rngs = [trial_rng(cfg.master_seed, t, ROLE_ATTACK, j) for t in trials]
            eve_amps = np.ascontiguousarray(_attack_amps(cfg, real, ris, rngs), dtype=complex)
            noise = _cnormal(rngs, (2, 2), sigma2_l)
            per_eve.append(kernels.profile_scores(eve_amps, noise, mean, std, *args, SPREAD_FLOOR)[0])
        attack = np.min(per_eve, axis=0)
    power = float(np.sum(np.abs(amps) ** 2) / 2.0)
    return legit, attack, power, np.column_stack([d_hrv, d_dem])


def simulate(cfg: TrialConfig, with_attack: bool = True, workers: int = 1) -> SimResult:
    """Run legitimate and (optionally) attack trials for one configuration."""
    if with_attack and cfg.attack is None:
        raise ConfigError("attack", "attack trials need an attack spec")
    bounds = [(s, min(s + CHUNK, cfg.n_trials)) for s in range(0, cfg.n_trials, CHUNK)]
    if workers > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_simulate_chunk, *zip(*[(cfg, a, b, with_attack) for a, b in bounds])))
    else:
        parts = [_simulate_chunk(cfg, a, b, with_attack) for a, b in bounds]
    legit = np.concatenate([p[0] for p in parts])
    attack = np.concatenate([p[1] for p in parts]) if with_attack else None
    deltas = np.concatenate([p[3] for p in parts])
    return SimResult(legit, attack, sum(p[2] for p in parts) / cfg.n_trials, cfg, deltas)


def run_legit_trials(cfg: TrialConfig, workers: int = 1) -> list[TrialOutcome]:
    res = simulate(cfg, with_attack=False, workers=workers)
    return [TrialOutcome(Label.LEGIT, float(s)) for s in res.legit]


def run_attack_trials(cfg: TrialConfig, workers: int = 1) -> list[TrialOutcome]:
    if cfg.attack is None:
        raise ConfigError("attack", "attack trials need an attack spec")
    if not isinstance(cfg.attack.kind, AttackKind):
        raise ConfigError("attack.kind", f"unknown attack kind {cfg.attack.kind!r}")
    res = simulate(cfg, with_attack=True, workers=workers)
    kind, tampered = cfg.attack.kind, cfg.attack.tampered
    return [TrialOutcome(Label.ATTACK, float(s), kind, tampered) for s in res.attack]


def _scores(outcomes) -> np.ndarray:
    if isinstance(outcomes, np.ndarray):
        scores = outcomes.astype(float, copy=False)
    else:
        scores = np.array([o.score if isinstance(o, TrialOutcome) else o for o in outcomes], dtype=float)
    if scores.size == 0:
        raise ValueError("no outcomes")
    return scores


def acceptance_rate(outcomes, t: float) -> float:
    """Fraction of outcomes accepted at threshold ``t`` (accept iff score <= t)."""
    scores = _scores(outcomes)
    return float(np.count_nonzero(scores <= t)) / scores.size


def tpr(outcomes, t: float) -> float:
    """N_TP / (N_TP + N_FN) over legitimate outcomes."""
    return acceptance_rate(outcomes, t)


def fpr(outcomes, t: float) -> float:
    """N_FP / (N_FP + N_TN) over attack outcomes."""
    return acceptance_rate(outcomes, t)


def threshold_grid(legit, attack, n: int = GRID_POINTS, lo: float = GRID_FLOOR) -> np.ndarray:
    """Log-spaced thresholds from ``lo`` to 1.05 times the largest observed score."""
    top = max(float(np.max(_scores(legit))), float(np.max(_scores(attack)))) * 1.05
    if not math.isfinite(top):
        raise ValueError("scores must be finite")
    return np.geomspace(lo, max(top, 10.0 * lo), n)


def roc_curve(legit, attack, grid=None) -> list[RocPoint]:
    legit_s = np.sort(_scores(legit))
    attack_s = np.sort(_scores(attack))
    grid = threshold_grid(legit_s, attack_s) if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) < 0):
        raise ValueError("threshold grid must be non-empty and sorted ascending")
    tp = np.searchsorted(legit_s, grid, side="right") / legit_s.size
    fp = np.searchsorted(attack_s, grid, side="right") / attack_s.size
    return [RocPoint(float(t), float(f), float(p)) for t, f, p in zip(grid, fp, tp)]


def tpr_at_fpr(roc: Sequence[RocPoint], fpr_target: float) -> RateEstimate:
    """Linearly interpolated TPR at a target FPR.

    Among points sharing an FPR the highest TPR is used. Targets outside the
    achieved FPR range return the nearest endpoint flagged as extrapolated.
    """
    if len(roc) == 0:
        raise ValueError("empty ROC")
    if not 0.0 <= fpr_target <= 1.0:
        raise ValueError(f"fpr_target must lie in [0, 1], got {fpr_target}")
    f = np.array([p.fpr for p in roc])
    r = np.array([p.tpr for p in roc])
    if fpr_target < f[0]:
        return RateEstimate(float(r[0]), True)
    if fpr_target > f[-1]:
        return RateEstimate(float(r[-1]), True)
    lo = int(np.searchsorted(f, fpr_target, side="right")) - 1
    if f[lo] == fpr_target or lo == len(f) - 1:
        return RateEstimate(float(r[lo]), False)
    hi = lo + 1
    w = (fpr_target - f[lo]) / (f[hi] - f[lo])
    return RateEstimate(float(r[lo] + w * (r[hi] - r[lo])), False)


def wilson_interval(p_hat: float, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("n must be > 0")
    denom = 1.0 + z * z / n
    centre = (p_hat + z * z / (2 * n)) / denom
    half = z * math.sqrt(p_hat * (1 - p_hat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def significantly_less(a: float, b: float, n: int) -> bool:
    """True when the 95% intervals of two rates over ``n`` trials are disjoint with a < b."""
    return wilson_interval(a, n)[1] < wilson_interval(b, n)[0]
