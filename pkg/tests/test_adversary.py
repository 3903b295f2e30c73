from __future__ import annotations

import numpy as np
import pytest

from risauth.adversary import (
    AttackKind,
    AttackSpec,
    RelayGain,
    eve_cascade,
    impersonation_amplitudes,
    impersonation_profile,
    legit_power,
    mitm_profile,
    multi_attacker_scores,
    relay_amplitudes,
    relay_profile,
    replay_amplitudes,
    replay_profile,
)
from risauth.channel import RicianParams, RisConfig, ScenarioGeometry, optimal_ris_phases, sample_realization
from risauth.circuit import CircuitParams, NoiseParams, noiseless_profile

CP = CircuitParams()
P_S = 1e-3


def _real(n=8, seed=0):
    geom = ScenarioGeometry(n_elements=n)
    real = sample_realization(geom, RicianParams(), np.random.default_rng(seed))
    return geom, real, optimal_ris_phases(real)


def test_spec_validation_and_tamper_flag():
    with pytest.raises(ValueError):
        AttackSpec(n_eve=0)
    assert AttackSpec(kind=AttackKind.MITM).tampered
    assert not AttackSpec(kind=AttackKind.RELAY).tampered


def test_eve_cascade_uses_legit_phases():
    _, real, ris = _real()
    expected = np.sum(real.H_ER * real.H_RL * np.exp(1j * ris.phases))
    assert eve_cascade(real, ris) == pytest.approx(expected)
    # the legit-optimal phases are not optimal for Eve's path
    assert abs(expected) < np.sum(np.abs(real.H_ER * real.H_RL))


def test_impersonation_amplitude_oracle():
    _, real, ris = _real()
    amps = impersonation_amplitudes(P_S, real, ris, CP)
    c = real.h_SE * eve_cascade(real, ris)
    expected = P_S * np.array([0.9, 0.1]) * (abs(real.h_SE * real.h_EL) ** 2 + abs(c) ** 2)
    np.testing.assert_allclose(np.abs(amps) ** 2, expected, rtol=1e-12)


def test_legit_state_ratio_is_gamma_ratio():
    _, real, ris = _real()
    p = legit_power(P_S, real, ris, CP)
    assert p[0] / p[1] == pytest.approx(9.0)


def test_replay_and_relay_state_ratio_is_gamma_squared():
    _, real, ris = _real()
    zero = np.zeros(2)
    for amps in (replay_amplitudes(P_S, real, real, ris, CP, zero),
                 relay_amplitudes(P_S, real, ris, CP, zero)):
        p = np.abs(amps) ** 2
        assert p[0] / p[1] == pytest.approx(81.0)


def test_matched_relay_matches_legit_mean_power():
    _, real, ris = _real()
    amps = relay_amplitudes(P_S, real, ris, CP, np.zeros(2), RelayGain.MATCHED)
    assert np.mean(np.abs(amps) ** 2) == pytest.approx(np.mean(legit_power(P_S, real, ris, CP)))


def test_noiseless_attack_profiles_differ_from_legit():
    geom, real, ris = _real(seed=3)
    noise = NoiseParams.noiseless()
    rng = np.random.default_rng(0)
    legit = noiseless_profile(P_S, CP, real.h_ST * real.h_TL,
                              real.h_ST * np.sum(real.H_TR * real.H_RL * np.exp(1j * ris.phases)))
    for profile in (
        impersonation_profile(geom, real, ris, CP, noise, rng, P_S),
        replay_profile(geom, _real(seed=4)[1], real, ris, CP, noise, rng, P_S),
        relay_profile(geom, real, ris, CP, noise, rng, P_S),
        mitm_profile(geom, real, ris, CP, noise, rng, P_S),
    ):
        assert np.max(np.abs(profile.as_array() - legit.as_array())) > 0


def test_eve_links_required():
    real = sample_realization(ScenarioGeometry(), RicianParams(), np.random.default_rng(0))
    legit_only = type(real)(real.h_ST, real.h_SL, real.h_TL, real.H_TR, real.H_RL)
    with pytest.raises(ValueError):
        impersonation_amplitudes(P_S, legit_only, RisConfig.absent(), CP)


def test_multi_attacker_takes_minimum():
    assert multi_attacker_scores(AttackSpec(n_eve=3), [3.0, 1.5, 2.0]) == 1.5
    with pytest.raises(ValueError):
        multi_attacker_scores(AttackSpec(n_eve=2), [])
    with pytest.raises(ValueError):
        multi_attacker_scores(AttackSpec(n_eve=2), [1.0])
