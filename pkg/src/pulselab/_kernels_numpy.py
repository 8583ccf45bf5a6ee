"""Pure-numpy implementations of the per-step hot kernels.

These are the reference semantics for the numba lane; both lanes are exercised
against each other in the test suite and the benchmark script.
"""
from __future__ import annotations

import numpy as np


def propagate(hat: np.ndarray, decay: np.ndarray, gain: np.ndarray,
              sym: np.ndarray, xi: np.ndarray, x0: float, v: float,
              delta: float) -> np.ndarray:
    """One exact Duhamel update over a step of length ``delta``.

    The homogeneous part is damped by the exact multiplier ``decay =
    exp(-sym*delta)``; the production term is integrated exactly along the
    straight-line source path ``x(sigma) = x0 + v*sigma``::

        int_0^delta exp(-sym (delta-s)) exp(-i xi (x0 + v s)) ds
            = exp(-i xi x0) * (exp(-i xi v delta) - decay) / (sym - i xi v)

    which is well defined because ``sym > 0``.
    """
    z = sym - 1j * (xi * v)
    num = np.exp(-1j * (xi * (v * delta))) - decay
    src = gain * np.exp(-1j * (xi * x0)) * (num / z)
    # zero mode via expm1 to keep the deformation balance exact at roundoff
    src[0] = gain[0] * (-np.expm1(-sym[0] * delta) / sym[0])
    out = decay * hat + src
    out[-1] = 0.0
    return out


def grad_at(hat: np.ndarray, xi: np.ndarray, x: float, half_width: float) -> float:
    """Exact spatial derivative of the trigonometric interpolant at ``x``."""
    body = hat[1:-1] * np.exp(1j * (xi[1:-1] * x))
    return float(-(1.0 / half_width) * np.dot(xi[1:-1], body.imag))


def value_at(hat: np.ndarray, xi: np.ndarray, x: float, half_width: float) -> float:
    """Trigonometric interpolant of the field evaluated at ``x``."""
    body = hat[1:-1] * np.exp(1j * (xi[1:-1] * x))
    return float((0.5 * hat[0].real + np.sum(body.real)) / half_width)
