from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from risauth.channel import (
    ChannelRealization,
    RicianParams,
    RisConfig,
    RisMode,
    ScenarioGeometry,
    cascade_coefficient,
    link_gain,
    optimal_ris_phases,
    path_gain,
    random_ris_phases,
    sample_legit_batch,
    sample_realization,
    sample_small_scale,
)

LAMBDA_915 = 0.32764203060109286  # c / 915 MHz, m


def test_wavelength_and_proximity_floor():
    geom = ScenarioGeometry()
    assert geom.wavelength == pytest.approx(LAMBDA_915, rel=1e-15)
    assert geom.proximity_floor == pytest.approx(0.1638, abs=1e-4)


def test_path_gain_hand_value():
    # sqrt(8 * 8) * lambda / (4 pi) * 1.5 ** (-3.5 / 2)
    expected = 8.0 * 0.0260729244 * 0.4918586310
    assert path_gain(1.5, 3.5, LAMBDA_915, 8, 8) == pytest.approx(expected, rel=1e-8)


def test_path_gain_free_space_decay():
    g1 = path_gain(1.0, 2.0, LAMBDA_915)
    g2 = path_gain(2.0, 2.0, LAMBDA_915)
    assert g1 / g2 == pytest.approx(2.0)


@pytest.mark.parametrize("args", [(0.0, 2.0, 1.0), (1.0, -1.0, 1.0), (1.0, 2.0, 0.0)])
def test_path_gain_rejects_bad_input(args):
    with pytest.raises(ValueError):
        path_gain(*args)


def test_link_gain_uses_ris_exponent_and_gains():
    geom = ScenarioGeometry()
    assert link_gain(geom, "TR") == pytest.approx(path_gain(1.0, 2.5, geom.wavelength, 8, 1))
    assert link_gain(geom, "TL") == pytest.approx(path_gain(1.5, 3.5, geom.wavelength, 8, 8))
    assert link_gain(geom, "EL") == pytest.approx(path_gain(0.75, 3.5, geom.wavelength, 1, 8))


def test_eve_gain_defaults_to_tag_gain_when_unset():
    assert ScenarioGeometry(g_eve=None).eve_gain == 8.0


def test_geometry_rejects_eve_inside_half_wavelength():
    with pytest.raises(ValueError, match="d_EL"):
        ScenarioGeometry(d_EL=0.01)
    ScenarioGeometry(d_EL=0.17)


@pytest.mark.parametrize("field", ["d_TL", "d_RL", "f_c"])
def test_geometry_rejects_nonpositive(field):
    with pytest.raises(ValueError):
        ScenarioGeometry(**{field: 0.0})


def test_rician_moments():
    rng = np.random.default_rng(0)
    k = 3.0
    h = sample_small_scale(RicianParams(k_factor=k), rng, 200_000)
    assert np.mean(np.abs(h) ** 2) == pytest.approx(1.0, abs=0.01)
    # LOS component sits on the real axis at sqrt(K / (K + 1))
    assert np.mean(h).real == pytest.approx(math.sqrt(k / (k + 1)), abs=0.01)
    assert abs(np.mean(h).imag) < 0.01
    assert np.var(h) == pytest.approx(1.0 / (k + 1), abs=0.01)


def test_rician_infinite_k_is_deterministic():
    h = sample_small_scale(RicianParams(k_factor=math.inf), np.random.default_rng(0), 4, los_phase=0.5)
    np.testing.assert_allclose(h, np.exp(0.5j) * np.ones(4))


def test_rician_k_zero_is_rayleigh():
    h = sample_small_scale(RicianParams(k_factor=0.0), np.random.default_rng(1), 100_000)
    assert abs(np.mean(h)) < 0.01
    assert np.mean(np.abs(h) ** 2) == pytest.approx(1.0, abs=0.02)


def test_rician_rejects_negative_k():
    with pytest.raises(ValueError):
        RicianParams(k_factor=-1.0)


def test_realization_is_seed_deterministic():
    geom = ScenarioGeometry(n_elements=5)
    a = sample_realization(geom, RicianParams(), np.random.default_rng(7))
    b = sample_realization(geom, RicianParams(), np.random.default_rng(7))
    np.testing.assert_array_equal(a.H_TR, b.H_TR)
    assert a.h_EL == b.h_EL
    assert a.has_eve and a.n_elements == 5


def test_batch_trial_matches_single_draw():
    geom = ScenarioGeometry(n_elements=3)
    rngs = [np.random.default_rng(s) for s in range(4)]
    batch = sample_legit_batch(geom, RicianParams(), rngs)
    single = sample_legit_batch(geom, RicianParams(), [np.random.default_rng(2)]).trial(0)
    assert batch.trial(2).h_TL == single.h_TL
    np.testing.assert_array_equal(batch.trial(2).H_RL, single.H_RL)


def test_realization_mean_power_matches_path_loss():
    geom = ScenarioGeometry()
    rngs = [np.random.default_rng(s) for s in range(20_000)]
    batch = sample_legit_batch(geom, RicianParams(), rngs)
    assert np.mean(np.abs(batch.h_TL) ** 2) == pytest.approx(link_gain(geom, "TL") ** 2, rel=0.03)


def test_phase_decomposition():
    H = np.array([2 * np.exp(-0.3j), 1 * np.exp(1.1j)])
    real = ChannelRealization(1, 1, 1, H, H)
    np.testing.assert_allclose(real.delta, [0.3, 2 * np.pi - 1.1])
    np.testing.assert_allclose(np.abs(H) * np.exp(-1j * real.delta), H)


def test_unit_channels_give_n_squared():
    for n in (1, 4, 16, 64):
        ones = np.ones(n, dtype=complex)
        real = ChannelRealization(1, 1, 1, ones, ones)
        assert abs(cascade_coefficient(ones, ones, optimal_ris_phases(real))) ** 2 == n * n


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_optimal_phases_beat_random(n, seed):
    rng = np.random.default_rng(seed)
    real = sample_realization(ScenarioGeometry(n_elements=n), RicianParams(), rng)
    best = abs(cascade_coefficient(real.H_TR, real.H_RL, optimal_ris_phases(real)))
    # the optimum equals the coherent sum of magnitudes
    assert best == pytest.approx(np.sum(np.abs(real.H_TR * real.H_RL)), rel=1e-12)
    for _ in range(20):
        rand = abs(cascade_coefficient(real.H_TR, real.H_RL, random_ris_phases(n, rng)))
        assert rand <= best * (1 + 1e-12)


def test_optimal_phases_need_elements():
    real = ChannelRealization(1, 1, 1, np.zeros(0), np.zeros(0))
    with pytest.raises(ValueError):
        optimal_ris_phases(real)


def test_absent_ris_contributes_nothing():
    assert random_ris_phases(0, np.random.default_rng(0)).mode is RisMode.ABSENT
    assert cascade_coefficient(np.ones(3), np.ones(3), RisConfig.absent()) == 0


def test_cascade_length_mismatch():
    with pytest.raises(ValueError):
        cascade_coefficient(np.ones(3), np.ones(4), RisConfig(np.zeros(3), RisMode.OPTIMAL))


def test_phases_are_wrapped():
    cfg = RisConfig(np.array([-0.5, 7.0]), RisMode.RANDOM)
    assert np.all((cfg.phases >= 0) & (cfg.phases < 2 * np.pi))
