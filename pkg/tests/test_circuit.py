from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from risauth.circuit import (
    CircuitParams,
    NoiseParams,
    VoltageProfile,
    dbm_to_watts,
    demodulator_voltage,
    demodulator_voltage_stepwise,
    differential_rcs,
    harvester_voltage,
    harvester_voltage_stepwise,
    incident_power,
    legit_amplitudes,
    measure_amplitudes,
    noiseless_profile,
    reflection_coefficient,
    watts_to_dbm,
)

UNIT = CircuitParams(v_d=0.3, k_hrv=1.0, k_dem=1.0, alpha=0.5, divider_ratio=0.5)


def test_dbm_conversion():
    assert dbm_to_watts(1.0) == pytest.approx(1.2589254117941673e-3, rel=1e-15)
    assert dbm_to_watts(-40.0) == pytest.approx(1e-7, rel=1e-15)
    assert watts_to_dbm(1e-3) == pytest.approx(0.0, abs=1e-12)


def test_harvester_hand_value():
    # 4 sqrt(1 * 0.5 * 2) - 4 * 0.3
    assert harvester_voltage(2.0, UNIT) == pytest.approx(2.8)


def test_demodulator_hand_value():
    # (sqrt(1 * 0.5 * 2) - 0.6) * 0.5
    assert demodulator_voltage(2.0, UNIT) == pytest.approx(0.2)


def test_outputs_clamp_below_turn_on():
    assert harvester_voltage(0.01, UNIT) == 0.0
    assert demodulator_voltage(0.01, UNIT) == 0.0
    assert harvester_voltage(0.0, UNIT) == 0.0


def test_negative_power_rejected():
    with pytest.raises(ValueError):
        harvester_voltage(-1.0, UNIT)
    with pytest.raises(ValueError):
        demodulator_voltage(np.array([1.0, -1.0]), UNIT)


def test_p_min_gate():
    cp = CircuitParams(k_hrv=1.0, k_dem=1.0, p_min=5.0)
    assert harvester_voltage(4.0, cp) == 0.0
    assert harvester_voltage(6.0, cp) > 0.0


@settings(max_examples=200, deadline=None)
@given(
    p=st.floats(1e-12, 1e-2),
    k=st.floats(1.0, 1e12),
    alpha=st.floats(0.01, 0.99),
    v_d=st.floats(0.0, 0.5),
    r1=st.floats(1.0, 1e6),
    r2=st.floats(1.0, 1e6),
)
def test_stepwise_matches_closed_form(p, k, alpha, v_d, r1, r2):
    cp = CircuitParams(v_d=v_d, k_hrv=k, k_dem=k, alpha=alpha, divider_ratio=r2 / (r1 + r2))
    scale_h = 4 * math.sqrt(k * alpha * p) + 4 * v_d
    scale_d = math.sqrt(k * (1 - alpha) * p) + 2 * v_d
    assert abs(harvester_voltage_stepwise(p, cp) - harvester_voltage(p, cp)) <= 1e-12 * scale_h
    assert abs(demodulator_voltage_stepwise(p, cp, r1, r2) - demodulator_voltage(p, cp)) <= 1e-12 * scale_d


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1e-3), st.floats(0, 1e-3))
def test_voltages_monotone_in_power(p1, p2):
    lo, hi = sorted((p1, p2))
    cp = CircuitParams()
    assert harvester_voltage(lo, cp) <= harvester_voltage(hi, cp)
    assert demodulator_voltage(lo, cp) <= demodulator_voltage(hi, cp)


def test_incident_power_hand_value():
    # 2 * 0.5 * (|3|^2 + |4j|^2)
    assert incident_power(2.0, 0.5, 3.0, 4j) == pytest.approx(25.0)
    with pytest.raises(ValueError):
        incident_power(-1.0, 0.5, 1.0, 1.0)


def test_legit_amplitudes_per_state():
    amps = legit_amplitudes(1.0, [0.9, 0.1], 1.0, 0.0)
    np.testing.assert_allclose(np.abs(amps) ** 2, [0.9, 0.1])


def test_reflection_coefficient():
    assert reflection_coefficient(50 - 10j, 50 + 10j) == 0
    assert reflection_coefficient(0, 50) == -1
    with pytest.raises(ValueError):
        reflection_coefficient(-50, 50)


def test_differential_rcs_hand_value():
    lam = 0.5
    expected = lam**2 * 64 / (4 * math.pi) * 0.8**2
    assert differential_rcs(lam, 8, 0.9, 0.1) == pytest.approx(expected)


@pytest.mark.parametrize(
    "kwargs",
    [{"alpha": 1.5}, {"v_d": -0.1}, {"k_hrv": 0.0}, {"divider_ratio": 0.0}, {"gamma_on": 1.5},
     {"gamma_on": 0.5, "gamma_off": 0.5}],
)
def test_circuit_params_validation(kwargs):
    with pytest.raises(ValueError):
        CircuitParams(**kwargs)


def test_voltage_profile_validation():
    with pytest.raises(ValueError):
        VoltageProfile(1.0, -0.1, 0.0, 0.0)
    with pytest.raises(ValueError):
        VoltageProfile(1.0, math.nan, 0.0, 0.0)
    vp = VoltageProfile.from_array([1, 2, 3, 4])
    assert vp.hrv("off") == 2 and vp.dem("on") == 3


def test_noiseless_measurement_equals_closed_form():
    cp = CircuitParams()
    amps = legit_amplitudes(1e-3, cp.gammas, 0.01, 0.005j)
    measured = measure_amplitudes(amps, cp, 0.0, np.random.default_rng(0))
    expected = noiseless_profile(1e-3, cp, 0.01, 0.005j)
    np.testing.assert_allclose(measured.as_array(), expected.as_array(), rtol=1e-12)


def test_noise_params_defaults_and_validation():
    n = NoiseParams()
    assert n.sigma2_l == pytest.approx(1e-7) and n.sigma2_e == pytest.approx(1e-6)
    with pytest.raises(ValueError):
        NoiseParams(sigma2_l=-1.0)
