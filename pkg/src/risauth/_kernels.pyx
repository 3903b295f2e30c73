# cython: language_level=3
"""Compiled trial kernels; same contract as ``_kernels_py``."""

import numpy as np
from libc.math cimport sqrt, fabs


cdef inline double _hrv(double p, double k_hrv, double alpha, double v_d, double p_min) nogil:
    cdef double v
    if p_min > 0 and p < p_min:
        return 0.0
    v = 4.0 * sqrt(k_hrv * alpha * p) - 4.0 * v_d
    return v if v > 0.0 else 0.0


cdef inline double _dem(double p, double k_dem, double alpha, double v_d, double ratio, double p_min) nogil:
    cdef double v
    if p_min > 0 and p < p_min:
        return 0.0
    v = (sqrt(k_dem * (1.0 - alpha) * p) - 2.0 * v_d) * ratio
    return v if v > 0.0 else 0.0


cdef inline double _abs2(double complex a, double complex n) nogil:
    cdef double re = a.real + n.real, im = a.imag + n.imag
    return re * re + im * im


cdef inline void _volts4(double complex a_on, double complex a_off,
                         double complex n_on_h, double complex n_on_d,
                         double complex n_off_h, double complex n_off_d,
                         double k_hrv, double k_dem, double alpha, double v_d,
                         double ratio, double p_min, double* out) nogil:
    out[0] = _hrv(_abs2(a_on, n_on_h), k_hrv, alpha, v_d, p_min)
    out[1] = _hrv(_abs2(a_off, n_off_h), k_hrv, alpha, v_d, p_min)
    out[2] = _dem(_abs2(a_on, n_on_d), k_dem, alpha, v_d, ratio, p_min)
    out[3] = _dem(_abs2(a_off, n_off_d), k_dem, alpha, v_d, ratio, p_min)


def profile_voltages(double complex[:, :] amps, double complex[:, :, :] noise,
                     double k_hrv, double k_dem, double alpha, double v_d, double ratio, double p_min):
    cdef Py_ssize_t T = amps.shape[0], t
    out = np.empty((T, 4))
    cdef double[:, :] o = out
    cdef double v[4]
    with nogil:
        for t in range(T):
            _volts4(amps[t, 0], amps[t, 1], noise[t, 0, 0], noise[t, 0, 1], noise[t, 1, 0], noise[t, 1, 1],
                    k_hrv, k_dem, alpha, v_d, ratio, p_min, v)
            o[t, 0] = v[0]; o[t, 1] = v[1]; o[t, 2] = v[2]; o[t, 3] = v[3]
    return out


def pilot_stats(double complex[:, :] amps, double complex[:, :, :, :] noise,
                double k_hrv, double k_dem, double alpha, double v_d, double ratio, double p_min):
    cdef Py_ssize_t T = noise.shape[0], P = noise.shape[1], t, p, c
    mean_arr = np.empty((T, 4))
    std_arr = np.empty((T, 4))
    buf_arr = np.empty((P, 4))
    cdef double[:, :] mean = mean_arr
    cdef double[:, :] std = std_arr
    cdef double[:, ::1] buf = buf_arr
    cdef double s1[4]
    cdef double s2[4]
    cdef double d
    with nogil:
        for t in range(T):
            for p in range(P):
                _volts4(amps[t, 0], amps[t, 1], noise[t, p, 0, 0], noise[t, p, 0, 1], noise[t, p, 1, 0],
                        noise[t, p, 1, 1], k_hrv, k_dem, alpha, v_d, ratio, p_min, &buf[p, 0])
            # values are shifted by the first pilot before the two-pass mean and variance
            for c in range(4):
                s1[c] = 0.0
                s2[c] = 0.0
            for p in range(1, P):
                for c in range(4):
                    s1[c] += buf[p, c] - buf[0, c]
            for c in range(4):
                s1[c] /= P
                s2[c] = s1[c] * s1[c]
            for p in range(1, P):
                for c in range(4):
                    d = buf[p, c] - buf[0, c] - s1[c]
                    s2[c] += d * d
            for c in range(4):
                mean[t, c] = buf[0, c] + s1[c]
                std[t, c] = sqrt(s2[c] / (P - 1))
    return mean_arr, std_arr


def profile_scores(double complex[:, :] amps, double complex[:, :, :] noise,
                   double[:, :] mean, double[:, :] std,
                   double k_hrv, double k_dem, double alpha, double v_d, double ratio, double p_min,
                   double floor):
    cdef Py_ssize_t T = amps.shape[0], t
    score_arr = np.empty(T)
    dh_arr = np.empty(T)
    dd_arr = np.empty(T)
    cdef double[:] score = score_arr
    cdef double[:] dh = dh_arr
    cdef double[:] dd = dd_arr
    cdef double v[4]
    cdef double a, b, sh, sd, qh, qd
    with nogil:
        for t in range(T):
            _volts4(amps[t, 0], amps[t, 1], noise[t, 0, 0], noise[t, 0, 1], noise[t, 1, 0], noise[t, 1, 1],
                    k_hrv, k_dem, alpha, v_d, ratio, p_min, v)
            a = fabs(v[0] - mean[t, 0])
            b = fabs(v[1] - mean[t, 1])
            dh[t] = a if a > b else b
            a = fabs(v[2] - mean[t, 2])
            b = fabs(v[3] - mean[t, 3])
            dd[t] = a if a > b else b
            sh = std[t, 0] if std[t, 0] > std[t, 1] else std[t, 1]
            sd = std[t, 2] if std[t, 2] > std[t, 3] else std[t, 3]
            if sh < floor:
                sh = floor
            if sd < floor:
                sd = floor
            qh = dh[t] / sh
            qd = dd[t] / sd
            score[t] = qh if qh > qd else qd
    return score_arr, dh_arr, dd_arr
