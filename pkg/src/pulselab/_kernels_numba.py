"""Numba-compiled hot kernels: fused spectral update and point evaluation.

Same contracts as ``_kernels_numpy``; the phase factors exp(-i xi_k c) are
generated by complex rotation recurrences (xi_k is a uniform grid), replacing
~4 transcendental calls per mode with one complex multiply.  Accumulated
recurrence roundoff is O(N eps), far below the integrator tolerances.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

__all__ = ["propagate", "grad_at", "value_at"]


@njit(cache=True)
def propagate(hat, decay, gain, sym, xi, x0, v, delta):
    n = hat.shape[0]
    out = np.empty_like(hat)
    dxi = xi[1] - xi[0]
    # rotation increments for exp(-i xi x0) and exp(-i xi v delta)
    c0, s0 = math.cos(dxi * x0), math.sin(dxi * x0)
    vd = v * delta
    cv, sv = math.cos(dxi * vd), math.sin(dxi * vd)
    # running phases at k = 0
    p0r, p0i = 1.0, 0.0
    pvr, pvi = 1.0, 0.0
    out[0] = decay[0] * hat[0] + gain[0] * (-math.expm1(-sym[0] * delta) / sym[0])
    for k in range(1, n - 1):
        p0r, p0i = p0r * c0 + p0i * s0, p0i * c0 - p0r * s0
        pvr, pvi = pvr * cv + pvi * sv, pvi * cv - pvr * sv
        # num = exp(-i xi v delta) - decay
        nr = pvr - decay[k]
        ni = pvi
        # z = sym - i xi v ; w = num / z
        zr = sym[k]
        zi = -xi[k] * v
        den = zr * zr + zi * zi
        wr = (nr * zr + ni * zi) / den
        wi = (ni * zr - nr * zi) / den
        # src = gain * exp(-i xi x0) * w
        sr = gain[k] * (p0r * wr - p0i * wi)
        si = gain[k] * (p0r * wi + p0i * wr)
        out[k] = decay[k] * hat[k] + complex(sr, si)
    out[n - 1] = 0.0
    return out


@njit(cache=True)
def grad_at(hat, xi, x, half_width):
    n = hat.shape[0]
    dxi = xi[1] - xi[0]
    c, s = math.cos(dxi * x), math.sin(dxi * x)
    pr, pi = 1.0, 0.0
    acc = 0.0
    for k in range(1, n - 1):
        pr, pi = pr * c - pi * s, pi * c + pr * s
        # Im(hat_k * exp(i xi_k x))
        acc += xi[k] * (hat[k].real * pi + hat[k].imag * pr)
    return -acc / half_width


@njit(cache=True)
def value_at(hat, xi, x, half_width):
    n = hat.shape[0]
    dxi = xi[1] - xi[0]
    c, s = math.cos(dxi * x), math.sin(dxi * x)
    pr, pi = 1.0, 0.0
    acc = 0.5 * hat[0].real
    for k in range(1, n - 1):
        pr, pi = pr * c - pi * s, pi * c + pr * s
        acc += hat[k].real * pr - hat[k].imag * pi
    return acc / half_width
