"""Tag front-end model: incident power, harvester and demodulator output voltages.

The harvester is a two-stage Dickson multiplier (output ``4 (V_rect - V_d)``);
the demodulator is a two-diode envelope detector followed by an ``R2/(R1+R2)``
divider. Rectified voltage squared is proportional to the absorbed power, and
the incident power is split ``alpha : 1 - alpha`` between the two branches.
Outputs are clamped at 0 V below diode turn-on.

All voltage functions broadcast over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator

STATES = ("on", "off")
# flat component order used by profiles, baselines and the kernels
COMPONENTS = ("v_hrv_on", "v_hrv_off", "v_dem_on", "v_dem_off")


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * np.log10(watts) + 30.0


@dataclass(frozen=True)
class CircuitParams:
    """Diode drop, proportionality constants, power split, divider and state reflections.

    ``p_min`` optionally gates operation: measured powers below it yield 0 V
    on both branches (the tag is unpowered). ``0`` disables the gate.
    """

    v_d: float = 0.3
    k_hrv: float = 1.0e12
    k_dem: float = 1.0e12
    alpha: float = 0.5
    divider_ratio: float = 0.5
    gamma_on: complex = 0.9 + 0j
    gamma_off: complex = 0.1 + 0j
    p_min: float = 0.0

    def __post_init__(self):
        if self.v_d < 0:
            raise ValueError("v_d must be >= 0")
        if not (self.k_hrv > 0 and self.k_dem > 0):
            raise ValueError("k_hrv and k_dem must be > 0")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 < self.divider_ratio <= 1.0:
            raise ValueError(f"divider_ratio must lie in (0, 1], got {self.divider_ratio}")
        if abs(self.gamma_on) > 1 or abs(self.gamma_off) > 1:
            raise ValueError("reflection coefficients must satisfy |gamma| <= 1")
        if self.gamma_on == self.gamma_off:
            raise ValueError("gamma_on and gamma_off must differ")
        if self.p_min < 0:
            raise ValueError("p_min must be >= 0")

    @property
    def gamma_states(self) -> dict[str, complex]:
        return {"on": complex(self.gamma_on), "off": complex(self.gamma_off)}

    @property
    def gammas(self) -> np.ndarray:
        """Reflection coefficients in ``STATES`` order."""
        return np.array([self.gamma_on, self.gamma_off], dtype=complex)


@dataclass(frozen=True)
class NoiseParams:
    """Noise powers in watts at LT, TT and Eve."""

    sigma2_l: float = dbm_to_watts(-40.0)
    sigma2_t: float = dbm_to_watts(-40.0)
    sigma2_e: float = dbm_to_watts(-30.0)

    def __post_init__(self):
        if min(self.sigma2_l, self.sigma2_t, self.sigma2_e) < 0:
            raise ValueError("noise powers must be >= 0")

    @classmethod
    def noiseless(cls) -> NoiseParams:
        return cls(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class VoltageProfile:
    v_hrv_on: float
    v_hrv_off: float
    v_dem_on: float
    v_dem_off: float

    def __post_init__(self):
        values = (self.v_hrv_on, self.v_hrv_off, self.v_dem_on, self.v_dem_off)
        if not all(math.isfinite(v) and v >= 0 for v in values):
            raise ValueError(f"voltages must be finite and >= 0, got {values}")

    def as_array(self) -> np.ndarray:
        return np.array([self.v_hrv_on, self.v_hrv_off, self.v_dem_on, self.v_dem_off], dtype=float)

    @classmethod
    def from_array(cls, values) -> VoltageProfile:
        return cls(*np.asarray(values, dtype=float).reshape(4).tolist())

    def hrv(self, state: str) -> float:
        return getattr(self, f"v_hrv_{state}")

    def dem(self, state: str) -> float:
        return getattr(self, f"v_dem_{state}")


def reflection_coefficient(z_load: complex, z_antenna: complex) -> complex:
    """Conjugate-matched reflection (Z_L - Z_a*) / (Z_L + Z_a*)."""
    denom = z_load + np.conj(z_antenna)
    if denom == 0:
        raise ValueError("z_load + conj(z_antenna) is zero")
    return complex((z_load - np.conj(z_antenna)) / denom)


def differential_rcs(lam: float, g_tag: float, gamma_1: complex, gamma_2: complex) -> float:
    """Differential radar cross-section between two modulation states, in m^2."""
    if not (lam > 0 and g_tag > 0):
        raise ValueError("wavelength and gain must be > 0")
    return lam**2 * g_tag**2 / (4.0 * np.pi) * abs(gamma_1 - gamma_2) ** 2


def incident_power(p_s, gamma_i, direct_amp, cascade_amp):
    """P_s |gamma_i| (|direct|^2 + |cascade|^2).

    ``direct_amp`` is h_ST h_TL and ``cascade_amp`` is h_ST times the RIS
    cascade; both already include path loss.
    """
    if np.any(np.asarray(p_s) < 0):
        raise ValueError("source power must be >= 0")
    return p_s * np.abs(gamma_i) * (np.abs(direct_amp) ** 2 + np.abs(cascade_amp) ** 2)


def harvester_voltage(p_inc, cp: CircuitParams):
    """max(0, 4 sqrt(k_hrv alpha P_inc) - 4 V_d)."""
    p_inc = np.asarray(p_inc, dtype=float)
    if np.any(p_inc < 0):
        raise ValueError("incident power must be >= 0")
    v = np.maximum(0.0, 4.0 * np.sqrt(cp.k_hrv * cp.alpha * p_inc) - 4.0 * cp.v_d)
    if cp.p_min > 0:
        v = np.where(p_inc < cp.p_min, 0.0, v)
    return v[()]


def demodulator_voltage(p_inc, cp: CircuitParams):
    """max(0, (sqrt(k_dem (1 - alpha) P_inc) - 2 V_d) R2 / (R1 + R2))."""
    p_inc = np.asarray(p_inc, dtype=float)
    if np.any(p_inc < 0):
        raise ValueError("incident power must be >= 0")
    v = np.maximum(0.0, (np.sqrt(cp.k_dem * (1.0 - cp.alpha) * p_inc) - 2.0 * cp.v_d) * cp.divider_ratio)
    if cp.p_min > 0:
        v = np.where(p_inc < cp.p_min, 0.0, v)
    return v[()]


# Stage-by-stage forms of the two circuits. They are kept separate from the
# closed forms above so the two can be checked against each other.

def split_power(p_inc, alpha):
    """(harvester share, demodulator share) of the incident power."""
    return alpha * p_inc, (1.0 - alpha) * p_inc


def rectified_voltage(p_branch, k):
    return np.sqrt(k * p_branch)


def dickson_output(v_rect, v_d):
    first_stage = v_rect - v_d
    return 2.0 * (2.0 * first_stage)


def envelope_output(v_rect, v_d, r1, r2):
    v_baseband = v_rect - 2.0 * v_d
    return v_baseband * (r2 / (r1 + r2))


def harvester_voltage_stepwise(p_inc, cp: CircuitParams):
    p_hrv, _ = split_power(p_inc, cp.alpha)
    return np.maximum(0.0, dickson_output(rectified_voltage(p_hrv, cp.k_hrv), cp.v_d))


def demodulator_voltage_stepwise(p_inc, cp: CircuitParams, r1: float | None = None, r2: float = 1.0):
    _, p_dem = split_power(p_inc, cp.alpha)
    if r1 is None:
        r1 = r2 * (1.0 - cp.divider_ratio) / cp.divider_ratio
    return np.maximum(0.0, envelope_output(rectified_voltage(p_dem, cp.k_dem), cp.v_d, r1, r2))


def legit_amplitudes(p_s, gammas, direct_amp, cascade_amp) -> np.ndarray:
    """Noiseless received amplitudes sqrt(P_inc,i), one per modulation state (last axis)."""
    direct_amp = np.asarray(direct_amp)[..., None]
    cascade_amp = np.asarray(cascade_amp)[..., None]
    return np.sqrt(incident_power(p_s, np.asarray(gammas), direct_amp, cascade_amp)).astype(complex)


def complex_noise(rng: Generator, sigma2: float, shape) -> np.ndarray:
    """CN(0, sigma2) samples."""
    z = rng.standard_normal((*tuple(np.atleast_1d(shape)), 2))
    return np.sqrt(sigma2 / 2.0) * (z[..., 0] + 1j * z[..., 1])


def profile_from_powers(powers: np.ndarray, cp: CircuitParams) -> np.ndarray:
    """Voltages in ``COMPONENTS`` order from measured powers shaped ``(..., state, branch)``."""
    hrv = harvester_voltage(powers[..., 0], cp)
    dem = demodulator_voltage(powers[..., 1], cp)
    return np.concatenate([np.asarray(hrv), np.asarray(dem)], axis=-1)


def measure_amplitudes(amps, cp: CircuitParams, sigma2: float, rng: Generator) -> VoltageProfile:
    """Measure one profile from per-state received amplitudes.

    Each circuit branch sees its own CN(0, sigma2) noise sample added to the
    amplitude before squaring.
    """
    amps = np.asarray(amps, dtype=complex).reshape(2)
    noise = complex_noise(rng, sigma2, (2, 2))
    powers = np.abs(amps[:, None] + noise) ** 2
    return VoltageProfile.from_array(profile_from_powers(powers, cp))


def measure_profile(p_s, gamma_states, direct_amp, cascade_amp, cp: CircuitParams,
                    noise: NoiseParams, rng: Generator) -> VoltageProfile:
    gammas = [gamma_states[s] for s in STATES]
    amps = legit_amplitudes(p_s, gammas, direct_amp, cascade_amp)
    return measure_amplitudes(amps, cp, noise.sigma2_l, rng)


def noiseless_profile(p_s, cp: CircuitParams, direct_amp, cascade_amp) -> VoltageProfile:
    p_inc = incident_power(p_s, cp.gammas, direct_amp, cascade_amp)
    return VoltageProfile.from_array(np.concatenate([harvester_voltage(p_inc, cp), demodulator_voltage(p_inc, cp)]))
