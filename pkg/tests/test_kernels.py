from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from risauth import _kernels_py, kernels
from risauth.auth import establish_baseline, normalized_score, profile_delta
from risauth.circuit import CircuitParams, VoltageProfile, profile_from_powers

CP = CircuitParams()
ARGS = kernels.circuit_args(CP)


def _batch(trials=64, pilots=30, seed=0, scale=1e-4):
    rng = np.random.default_rng(seed)

    def cn(*shape, s=scale):
        return s * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)

    return cn(trials, 2, s=3 * scale), cn(trials, pilots, 2, 2), cn(trials, 2, 2)


def _backends():
    out = [_kernels_py]
    try:
        out.append(kernels.load_backend("cython"))
    except ImportError:
        pass
    return out


@pytest.mark.parametrize("mod", _backends(), ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_kernels_match_reference_circuit(mod):
    amps, pilots, noise = _batch(trials=5)
    for t in range(5):
        powers = np.abs(amps[t][:, None] + pilots[t]) ** 2
        profiles = [VoltageProfile.from_array(v) for v in profile_from_powers(powers, CP)]
        base = establish_baseline(profiles)
        mean, std = mod.pilot_stats(amps[t : t + 1], pilots[t : t + 1], *ARGS)
        np.testing.assert_allclose(mean[0], base.mean.as_array(), rtol=1e-12)
        np.testing.assert_allclose(std[0], base.spread.as_array(), rtol=1e-10)

        measured = VoltageProfile.from_array(profile_from_powers(np.abs(amps[t][:, None] + noise[t]) ** 2, CP))
        deltas = profile_delta(measured, base)
        score, dh, dd = mod.profile_scores(amps[t : t + 1], noise[t : t + 1], mean, std, *ARGS, 1e-9)
        assert (dh[0], dd[0]) == pytest.approx(deltas, rel=1e-10)
        assert score[0] == pytest.approx(normalized_score(deltas, base), rel=1e-10)


def test_backends_agree():
    mods = _backends()
    if len(mods) < 2:
        pytest.skip("compiled kernels not built")
    py, cy = mods
    amps, pilots, noise = _batch(trials=500, pilots=100, seed=4)
    m1, s1 = py.pilot_stats(amps, pilots, *ARGS)
    m2, s2 = cy.pilot_stats(amps, pilots, *ARGS)
    np.testing.assert_allclose(m1, m2, rtol=1e-12)
    np.testing.assert_allclose(s1, s2, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(py.profile_voltages(amps, noise, *ARGS), cy.profile_voltages(amps, noise, *ARGS),
                               rtol=1e-13)
    for a, b in zip(py.profile_scores(amps, noise, m1, s1, *ARGS, 1e-9),
                    cy.profile_scores(amps, noise, m1, s1, *ARGS, 1e-9)):
        np.testing.assert_allclose(a, b, rtol=1e-12)


@pytest.mark.parametrize("mod", _backends(), ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_identical_pilots_zero_spread(mod):
    amps, pilots, _ = _batch(trials=3, pilots=10)
    pilots[:] = 0
    mean, std = mod.pilot_stats(amps, pilots, *ARGS)
    assert np.all(std == 0.0)
    score, _, _ = mod.profile_scores(amps, np.zeros((3, 2, 2), complex), mean, std, *ARGS, 1e-9)
    assert np.all(score == 0.0)


def test_env_var_forces_fallback():
    env = dict(os.environ, RISAUTH_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import risauth.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_load_backend_python():
    assert kernels.load_backend("python") is _kernels_py
