"""Independent brute-force verifiers for the fast evaluation paths.

Everything here deliberately uses a different discretization than the library
code it checks: direct-space trapezoid sums with Richardson refinement instead
of adaptive frequency panels or spectral synthesis.  Agreement between the two
routes is evidence, not tautology.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .model import ModelParams, SourceKernel, gaussian_kernel
from . import analytic

__all__ = [
    "OracleReport", "fourier_by_quadrature", "greens_convolution",
    "heat_norm_scaling", "richardson_trapezoid", "standard_suite",
]


@dataclass(frozen=True)
class OracleReport:
    """One oracle-vs-fast comparison row."""

    quantity: str
    oracle_value: float
    fast_value: float
    tolerance: float

    @property
    def abs_discrepancy(self) -> float:
        return abs(self.oracle_value - self.fast_value)

    @property
    def rel_discrepancy(self) -> float:
        scale = max(abs(self.oracle_value), abs(self.fast_value), 1e-300)
        return self.abs_discrepancy / scale

    @property
    def passed(self) -> bool:
        return self.abs_discrepancy <= self.tolerance


def richardson_trapezoid(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                         tol: float = 1e-11, n0: int = 64,
                         max_doublings: int = 22) -> float:
    """Trapezoid sums on dyadically refined grids with one Richardson
    extrapolation level; stops when consecutive extrapolants agree to ``tol``."""
    if b <= a:
        return 0.0
    n = n0
    x = np.linspace(a, b, n + 1)
    t_prev = float(np.trapz(f(x), x))
    r_prev = None
    for _ in range(max_doublings):
        n *= 2
        x = np.linspace(a, b, n + 1)
        t_cur = float(np.trapz(f(x), x))
        r_cur = (4.0 * t_cur - t_prev) / 3.0
        if r_prev is not None and abs(r_cur - r_prev) <= tol * max(1.0, abs(r_cur)):
            return r_cur
        t_prev, r_prev = t_cur, r_cur
    raise RuntimeError(f"trapezoid refinement stalled at n={n} (last={r_cur!r})")


def _profile_cutoff(decay_certificate: tuple[float, float], tol: float = 1e-15) -> float:
    big_m, rate = decay_certificate
    if big_m <= 0.0:
        return 1.0
    return max(1.0, math.sqrt(math.log(max(big_m, 1.0) / tol) / rate) * 1.2)


def fourier_by_quadrature(profile: Callable[[np.ndarray], np.ndarray], xi: float,
                          decay_certificate: tuple[float, float] = (1.0, 1.0),
                          tol: float = 1e-11) -> float:
    """Transform ``int profile(x) exp(-i x xi) dx`` of an even profile by
    direct-space quadrature (real by evenness)."""
    cut = _profile_cutoff(decay_certificate)
    return 2.0 * richardson_trapezoid(
        lambda x: np.asarray(profile(x), dtype=float) * np.cos(xi * x),
        0.0, cut, tol=tol)


def greens_convolution(kernel: SourceKernel, beta: float = 1.0,
                       alpha_gamma: float = 1.0,
                       tol: float = 1e-11) -> Callable[[float], float]:
    """Direct-space resting profile: ``x -> (ag/2b) int exp(-|x-y|/b) g(y) dy``.

    The integral is split at the kink ``y = x`` whenever it falls inside the
    production support, so each trapezoid panel sees a smooth integrand.
    """
    cut = _profile_cutoff(kernel.decay_certificate)

    def evaluate(x: float) -> float:
        pref = alpha_gamma / (2.0 * beta)
        def f(y):
            return np.asarray(kernel.profile(y), dtype=float) * np.exp(-np.abs(x - y) / beta)
        pieces = []
        if -cut < x < cut:
            pieces = [(-cut, x), (x, cut)]
        else:
            pieces = [(-cut, cut)]
        return pref * sum(richardson_trapezoid(f, a, b, tol=tol) for a, b in pieces)

    return evaluate


def heat_norm_scaling(k: int, p: float, t_grid: Sequence[float]) -> float:
    """Fitted log-log slope of ``t -> ||d^k/dx^k h_t||_p`` for the heat kernel
    ``h_t(x) = exp(-x^2/4t)/sqrt(4 pi t)``; the exact exponent is
    ``-(k + (1 - 1/p))/2``."""
    if k > 3:
        raise ValueError("derivatives implemented up to order 3")
    ts = np.asarray(list(t_grid), dtype=float)
    if ts.size < 2 or np.any(ts <= 0.0):
        raise ValueError("need at least two positive times")
    norms = np.empty_like(ts)
    for i, t in enumerate(ts):
        width = math.sqrt(2.0 * t)
        x = np.linspace(-40.0 * width, 40.0 * width, 200001)
        h = np.exp(-x * x / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)
        if k == 0:
            d = h
        elif k == 1:
            d = -x / (2.0 * t) * h
        elif k == 2:
            d = (x * x / (4.0 * t * t) - 1.0 / (2.0 * t)) * h
        else:
            d = (-x ** 3 / (8.0 * t ** 3) + 3.0 * x / (4.0 * t * t)) * h
        if math.isinf(p):
            norms[i] = np.abs(d).max()
        else:
            norms[i] = np.trapz(np.abs(d) ** p, x) ** (1.0 / p)
    logs = np.log(norms)
    if np.ptp(np.log(ts)) < 1e-12:
        raise ValueError("degenerate time grid: zero spread")
    slope = np.polyfit(np.log(ts), logs, 1)[0]
    return float(slope)


def standard_suite(eps_proxy: float = 1e-3) -> list[OracleReport]:
    """The fixed oracle-vs-fast comparison battery emitted by the CLI."""
    rows: list[OracleReport] = []

    # quadrature value of the rational moment integral vs its closed form
    for beta in (1.0, 2.0, 10.0):
        fast = analytic.a_integral(beta)
        closed = math.pi / (4.0 * beta ** 3)
        rows.append(OracleReport(f"a_integral(beta={beta:g})", closed, fast,
                                 tolerance=1e-8 * closed))

    # Gaussian transform: direct-space quadrature vs the closed form
    g1 = gaussian_kernel(1.0)
    for xi in (0.0, 1.0, 2.0):
        oracle_val = fourier_by_quadrature(g1.profile, xi, g1.decay_certificate)
        rows.append(OracleReport(f"gaussian_fourier(xi={xi:g})",
                                 oracle_val, float(g1.fourier(xi)), tolerance=1e-8))

    # two-sided exponential: transform of exp(-|x|)/2 is 1/(1+xi^2)
    def two_sided(x):
        return 0.5 * np.exp(-np.abs(np.asarray(x, dtype=float)))
    for xi in (0.0, 1.0):
        oracle_val = fourier_by_quadrature(two_sided, xi, (0.5, 0.012))
        rows.append(OracleReport(f"greens_fourier(xi={xi:g})",
                                 oracle_val, 1.0 / (1.0 + xi ** 2), tolerance=1e-8))

    # wave-speed integrand reduction at ten speeds
    for v in np.linspace(0.0, 4.5, 10):
        fast = _reduction_quadrature(float(v))
        closed = math.pi / (2.0 * math.sqrt(4.0 + v * v))
        rows.append(OracleReport(f"speed_reduction(v={v:.2f})", closed, fast,
                                 tolerance=1e-9))

    # resting profile: frequency-space fast path vs direct-space convolution
    params = ModelParams(epsilon=eps_proxy)
    prof = analytic.stationary_profile(params)
    conv = greens_convolution(gaussian_kernel(eps_proxy))
    for x in (0.0, 0.5, 1.0):
        rows.append(OracleReport(f"stationary(x={x:g})", conv(x), float(prof(x)),
                                 tolerance=1e-8))

    # heat kernel norm scaling exponents
    tgrid = np.geomspace(0.25, 4.0, 9)
    for (k, p) in ((0, math.inf), (1, 1.0), (2, 2.0)):
        slope = heat_norm_scaling(k, p, tgrid)
        exact = -(k + (1.0 - (0.0 if math.isinf(p) else 1.0 / p))) / 2.0
        label = "inf" if math.isinf(p) else f"{p:g}"
        rows.append(OracleReport(f"heat_scaling(k={k} p={label})",
                                 exact, slope, tolerance=0.02 * abs(exact)))
    return rows


def _reduction_quadrature(v: float) -> float:
    """int_0^inf xi^2/((1+xi^2)^2 + v^2 xi^2) dxi by split trapezoid sums;
    the substitution xi -> 1/u maps the tail onto the same-form integrand."""
    def head(x):
        x2 = x * x
        return x2 / ((1.0 + x2) ** 2 + v * v * x2)
    def tail(u):
        u2 = u * u
        return 1.0 / ((1.0 + u2) ** 2 + v * v * u2)
    return (richardson_trapezoid(head, 0.0, 1.0, tol=1e-12) +
            richardson_trapezoid(tail, 0.0, 1.0, tol=1e-12))
