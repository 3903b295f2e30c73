"""Numpy reference kernels. ``_kernels.pyx`` implements the same functions in Cython.

Shapes: ``amps`` is ``(T, 2)`` complex (trial, state); pilot noise is
``(T, P, 2, 2)`` and measurement noise ``(T, 2, 2)`` complex (..., state,
branch), already scaled by the noise standard deviation. Statistics come out
as ``(T, 4)`` in ``COMPONENTS`` order.
"""

from __future__ import annotations

import numpy as np


def _voltages(powers, k_hrv, k_dem, alpha, v_d, ratio, p_min):
    hrv = np.maximum(0.0, 4.0 * np.sqrt(k_hrv * alpha * powers[..., 0]) - 4.0 * v_d)
    dem = np.maximum(0.0, (np.sqrt(k_dem * (1.0 - alpha) * powers[..., 1]) - 2.0 * v_d) * ratio)
    if p_min > 0:
        hrv = np.where(powers[..., 0] < p_min, 0.0, hrv)
        dem = np.where(powers[..., 1] < p_min, 0.0, dem)
    return np.concatenate([hrv, dem], axis=-1)


def profile_voltages(amps, noise, k_hrv, k_dem, alpha, v_d, ratio, p_min):
    powers = np.abs(amps[:, :, None] + noise) ** 2
    return _voltages(powers, k_hrv, k_dem, alpha, v_d, ratio, p_min)


def pilot_stats(amps, noise, k_hrv, k_dem, alpha, v_d, ratio, p_min):
    """Per-component mean and sample standard deviation over the pilot axis."""
    powers = np.abs(amps[:, None, :, None] + noise) ** 2
    volts = _voltages(powers, k_hrv, k_dem, alpha, v_d, ratio, p_min)
    # shift by the first pilot so identical pilots give an exact mean and zero spread
    ref = volts[:, :1, :]
    shifted = volts - ref
    mean_shift = shifted.mean(axis=1)
    mean = ref[:, 0, :] + mean_shift
    var = ((shifted - mean_shift[:, None, :]) ** 2).sum(axis=1) / (volts.shape[1] - 1)
    return mean, np.sqrt(var)


def profile_scores(amps, noise, mean, std, k_hrv, k_dem, alpha, v_d, ratio, p_min, floor):
    """Normalized score plus the two state-maxed deviations for each trial."""
    volts = profile_voltages(amps, noise, k_hrv, k_dem, alpha, v_d, ratio, p_min)
    dev = np.abs(volts - mean)
    d_hrv = dev[:, :2].max(axis=1)
    d_dem = dev[:, 2:].max(axis=1)
    s_hrv = np.maximum(std[:, :2].max(axis=1), floor)
    s_dem = np.maximum(std[:, 2:].max(axis=1), floor)
    return np.maximum(d_hrv / s_hrv, d_dem / s_dem), d_hrv, d_dem
