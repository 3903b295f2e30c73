"""Profiles LT would measure under impersonation, MITM, replay and relay attacks.

Eve never controls the RIS: every Eve cascade is evaluated with the phase
vector optimized for the legitimate TT-LT link. The ``*_amplitudes`` helpers
return noiseless-at-LT per-state amplitudes (last axis = state) and broadcast
over batched realizations; the ``*_profile`` functions add LT noise and run
the circuit model for a single realization.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.random import Generator

from .channel import ChannelRealization, RisConfig, ScenarioGeometry, cascade_coefficient
from .circuit import (
    CircuitParams,
    NoiseParams,
    VoltageProfile,
    complex_noise,
    dbm_to_watts,
    incident_power,
    legit_amplitudes,
    measure_amplitudes,
)

DEFAULT_P_S = dbm_to_watts(1.0)


class AttackKind(enum.Enum):
    IMPERSONATION = "impersonation"
    MITM = "mitm"
    REPLAY = "replay"
    RELAY = "relay"


class RelayGain(enum.Enum):
    UNIT = "unit"  # forwarded power equals received power
    MATCHED = "matched"  # scaled so mean power at LT equals the legitimate mean


@dataclass(frozen=True)
class AttackSpec:
    kind: AttackKind = AttackKind.IMPERSONATION
    n_eve: int = 1
    claimed_id: str = "TT"
    relay_gain: RelayGain = RelayGain.UNIT

    def __post_init__(self):
        if self.n_eve < 1:
            raise ValueError(f"n_eve must be >= 1, got {self.n_eve}")

    @property
    def tampered(self) -> bool:
        return self.kind is AttackKind.MITM


def _require_eve(real: ChannelRealization) -> None:
    if not real.has_eve:
        raise ValueError("realization has no Eve links")


def eve_cascade(real: ChannelRealization, legit_ris: RisConfig):
    return cascade_coefficient(real.H_ER, real.H_RL, legit_ris)


def legit_power(p_s, real: ChannelRealization, legit_ris: RisConfig, cp: CircuitParams):
    """Noiseless incident power at LT from TT, per state (last axis)."""
    cascade = np.asarray(real.h_ST * cascade_coefficient(real.H_TR, real.H_RL, legit_ris))
    direct = np.asarray(real.h_ST * real.h_TL)
    return incident_power(p_s, cp.gammas, direct[..., None], cascade[..., None])


def impersonation_amplitudes(p_s, real: ChannelRealization, legit_ris: RisConfig, cp: CircuitParams):
    _require_eve(real)
    return legit_amplitudes(p_s, cp.gammas, real.h_SE * real.h_EL, real.h_SE * eve_cascade(real, legit_ris))


def _forward_path(real: ChannelRealization, legit_ris: RisConfig):
    """Eve-to-LT amplitude: direct link plus the (unoptimized) RIS cascade."""
    return np.asarray(real.h_EL + eve_cascade(real, legit_ris))[..., None]


def replay_amplitudes(p_s, record_real: ChannelRealization, replay_real: ChannelRealization,
                      legit_ris: RisConfig, cp: CircuitParams, record_noise):
    """Recorded TT backscatter (with Eve's receive noise) retransmitted over current channels."""
    _require_eve(record_real)
    _require_eve(replay_real)
    recorded = np.sqrt(p_s) * np.asarray(record_real.h_ST * record_real.h_TE)[..., None] * cp.gammas
    return (recorded + record_noise) * _forward_path(replay_real, legit_ris)


def relay_gain(p_s, real: ChannelRealization, legit_ris: RisConfig, cp: CircuitParams,
               mode: RelayGain = RelayGain.UNIT):
    if mode is RelayGain.UNIT:
        return np.ones(np.shape(real.h_ST))[()]
    relayed = np.abs(np.sqrt(p_s) * np.asarray(real.h_ST * real.h_TE)[..., None] * cp.gammas
                     * _forward_path(real, legit_ris)) ** 2
    target = legit_power(p_s, real, legit_ris, cp)
    return np.sqrt(target.mean(axis=-1) / relayed.mean(axis=-1))[()]


def relay_amplitudes(p_s, real: ChannelRealization, legit_ris: RisConfig, cp: CircuitParams,
                     forward_noise, mode: RelayGain = RelayGain.UNIT):
    """Live forwarding: TT->Eve hop (plus Eve noise) amplified and sent over Eve->LT."""
    _require_eve(real)
    g = np.asarray(relay_gain(p_s, real, legit_ris, cp, mode))[..., None]
    received = np.sqrt(p_s) * np.asarray(real.h_ST * real.h_TE)[..., None] * cp.gammas + forward_noise
    return g * received * _forward_path(real, legit_ris)


# MITM shares the relay signal path; only the tamper flag on the trial differs.
mitm_amplitudes = relay_amplitudes


def impersonation_profile(geom: ScenarioGeometry, real: ChannelRealization, legit_ris: RisConfig,
                          cp: CircuitParams, noise: NoiseParams, rng: Generator,
                          p_s: float = DEFAULT_P_S) -> VoltageProfile:
    amps = impersonation_amplitudes(p_s, real, legit_ris, cp)
    return measure_amplitudes(amps, cp, noise.sigma2_l, rng)


def replay_profile(geom: ScenarioGeometry, record_real: ChannelRealization, replay_real: ChannelRealization,
                   legit_ris: RisConfig, cp: CircuitParams, noise: NoiseParams, rng: Generator,
                   p_s: float = DEFAULT_P_S) -> VoltageProfile:
    record_noise = complex_noise(rng, noise.sigma2_e, 2)
    amps = replay_amplitudes(p_s, record_real, replay_real, legit_ris, cp, record_noise)
    return measure_amplitudes(amps, cp, noise.sigma2_l, rng)


def relay_profile(geom: ScenarioGeometry, real: ChannelRealization, legit_ris: RisConfig,
                  cp: CircuitParams, noise: NoiseParams, rng: Generator, p_s: float = DEFAULT_P_S,
                  mode: RelayGain = RelayGain.UNIT) -> VoltageProfile:
    forward_noise = complex_noise(rng, noise.sigma2_e, 2)
    amps = relay_amplitudes(p_s, real, legit_ris, cp, forward_noise, mode)
    return measure_amplitudes(amps, cp, noise.sigma2_l, rng)


def mitm_profile(geom: ScenarioGeometry, real: ChannelRealization, legit_ris: RisConfig,
                 cp: CircuitParams, noise: NoiseParams, rng: Generator, p_s: float = DEFAULT_P_S,
                 mode: RelayGain = RelayGain.UNIT) -> VoltageProfile:
    return relay_profile(geom, real, legit_ris, cp, noise, rng, p_s, mode)


def multi_attacker_scores(spec: AttackSpec, scores: Sequence[float]) -> float:
    """Trial score of a coordinated attack: the best (lowest-scoring) attacker."""
    if len(scores) == 0:
        raise ValueError("no attacker scores")
    if len(scores) != spec.n_eve:
        raise ValueError(f"expected {spec.n_eve} attacker scores, got {len(scores)}")
    return float(min(scores))
