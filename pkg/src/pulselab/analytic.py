"""Exact stationary and traveling-pulse solutions of the coupled model.

Everything here is frequency-space quadrature.  With the transform convention
``fhat(xi) = int f e^{-i x xi} dx``, the stationary deformation solves
``(1 - beta^2 d^2/dx^2) S = alpha gamma g`` and is

    S0(x) = (alpha gamma / pi) * int_0^inf ghat(xi) cos(x xi) / (1 + beta^2 xi^2) dxi,

a traveling profile at speed v has

    Shat(xi) = alpha gamma ghat(xi) (1 + beta^2 xi^2 + i alpha v xi) / D(xi),
    D(xi) = (1 + beta^2 xi^2)^2 + alpha^2 v^2 xi^2,

and the speed of a self-consistent pulse solves the implicit relation

    (eta / pi) * int_0^inf alpha^2 gamma ghat(xi) xi^2 / D(xi) dxi = 1,

whose left side at v = 0 equals eta/eta*, defining the critical stiffness
eta* = (pi / (alpha^2 gamma)) / int_0^inf ghat xi^2 / (1+beta^2 xi^2)^2 dxi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .model import ModelParams, SourceKernel, gaussian_kernel
from .quadrature import adaptive_quad, gaussian_cutoff, oscillatory_quad

__all__ = [
    "StationaryProfile", "PulseSolution", "ThresholdResult",
    "stationary_profile", "pulse_profile", "pulse_profile_deriv",
    "velocity_residual", "pulse_velocity", "critical_stiffness", "a_integral",
]

QUAD_TOL = 1e-12
PROFILE_TOL = 1e-11
TAIL_TOL = 1e-13
ROOT_TOL = 1e-10


def _kernel_of(params: ModelParams, kernel: Optional[SourceKernel]) -> SourceKernel:
    return kernel if kernel is not None else gaussian_kernel(params.epsilon)


def _cutoff(kernel: SourceKernel, rational_bound: float, tol: float = TAIL_TOL) -> float:
    amp, rate = kernel.fourier_decay
    return gaussian_cutoff(amp, rate, rational_bound, tol)


def _profile_integral(f, ximax: float, osc_rate: float) -> float:
    """Frequency integral of a profile evaluator: oscillation-aware panels
    away from the center, error-driven panels at it."""
    if osc_rate > 1e-9:
        val, _ = oscillatory_quad(f, ximax, osc_rate, tol=PROFILE_TOL)
    else:
        val, _ = adaptive_quad(f, 0.0, ximax, tol=PROFILE_TOL, limit=100000)
    return val


@dataclass(frozen=True)
class StationaryProfile:
    """Evaluator for the even resting deformation profile."""

    params: ModelParams
    kernel: SourceKernel
    center: float = 0.0

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        xs = np.atleast_1d(np.asarray(x, dtype=float)) - self.center
        ag = self.params.alpha * self.params.gamma
        b2 = self.params.beta ** 2
        if self.kernel.is_zero() or ag == 0.0:
            out = np.zeros_like(xs)
            return out if np.ndim(x) else float(out[0])
        ximax = _cutoff(self.kernel, 1.0)
        vals = np.empty_like(xs)
        for i, xi0 in enumerate(xs):
            f = lambda xi: self.kernel.fourier(xi) * np.cos(xi0 * xi) / (1.0 + b2 * xi * xi)
            vals[i] = (ag / math.pi) * _profile_integral(f, ximax, abs(xi0))
        return vals if np.ndim(x) else float(vals[0])

    def derivative(self, x):
        xs = np.atleast_1d(np.asarray(x, dtype=float)) - self.center
        ag = self.params.alpha * self.params.gamma
        b2 = self.params.beta ** 2
        if self.kernel.is_zero() or ag == 0.0:
            out = np.zeros_like(xs)
            return out if np.ndim(x) else float(out[0])
        ximax = _cutoff(self.kernel, 1.0)
        vals = np.empty_like(xs)
        for i, xi0 in enumerate(xs):
            f = lambda xi: -self.kernel.fourier(xi) * xi * np.sin(xi0 * xi) / (1.0 + b2 * xi * xi)
            vals[i] = (ag / math.pi) * _profile_integral(f, ximax, abs(xi0))
        return vals if np.ndim(x) else float(vals[0])


def stationary_profile(params: ModelParams, kernel: Optional[SourceKernel] = None,
                       center: float = 0.0) -> StationaryProfile:
    """Resting state: even about ``center``, zero slope there."""
    return StationaryProfile(params=params, kernel=_kernel_of(params, kernel), center=center)


def _pulse_point(params: ModelParams, kernel: SourceKernel, v: float, w: float,
                 deriv: bool) -> float:
    ag = params.alpha * params.gamma
    b2 = params.beta ** 2
    av = params.alpha * v
    ximax = _cutoff(kernel, 1.0)

    def f(xi):
        one = 1.0 + b2 * xi * xi
        den = one * one + (av * xi) ** 2
        gh = kernel.fourier(xi)
        if not deriv:
            return gh * (one * np.cos(w * xi) - av * xi * np.sin(w * xi)) / den
        return gh * xi * (-one * np.sin(w * xi) - av * xi * np.cos(w * xi)) / den

    return (ag / math.pi) * _profile_integral(f, ximax, abs(w))


def pulse_profile(params: ModelParams, kernel: Optional[SourceKernel] = None,
                  v: float = 0.0) -> Callable[[np.ndarray], np.ndarray]:
    """Co-moving deformation profile ``w -> S(w)`` at wave speed ``v``.

    At ``v = 0`` this reduces pointwise to the stationary profile.
    """
    kern = _kernel_of(params, kernel)

    def evaluate(w):
        ws = np.atleast_1d(np.asarray(w, dtype=float))
        out = np.array([_pulse_point(params, kern, v, wi, deriv=False) for wi in ws])
        return out if np.ndim(w) else float(out[0])

    return evaluate


def pulse_profile_deriv(params: ModelParams, kernel: Optional[SourceKernel] = None,
                        v: float = 0.0) -> Callable[[np.ndarray], np.ndarray]:
    """Derivative of the co-moving profile (used for self-consistency checks)."""
    kern = _kernel_of(params, kernel)

    def evaluate(w):
        ws = np.atleast_1d(np.asarray(w, dtype=float))
        out = np.array([_pulse_point(params, kern, v, wi, deriv=True) for wi in ws])
        return out if np.ndim(w) else float(out[0])

    return evaluate


def _speed_integral(params: ModelParams, kernel: SourceKernel, v: float,
                    ) -> tuple[float, float]:
    """int_0^inf ghat xi^2 / ((1+beta^2 xi^2)^2 + alpha^2 v^2 xi^2) dxi."""
    b2 = params.beta ** 2
    av2 = (params.alpha * v) ** 2
    # rational factor peaks near xi ~ 1/beta with value <= 1/(4 beta^2)
    ximax = _cutoff(kernel, 1.0 / (4.0 * b2) if b2 > 0 else 1.0)

    def f(xi):
        one = 1.0 + b2 * xi * xi
        return kernel.fourier(xi) * xi * xi / (one * one + av2 * xi * xi)

    return adaptive_quad(f, 0.0, ximax, tol=QUAD_TOL, limit=40000)


def velocity_residual(params: ModelParams, kernel: Optional[SourceKernel] = None,
                      v: float = 0.0) -> float:
    """Left side of the implicit speed relation minus one.

    Strictly decreasing in ``v``; equals ``eta/eta* - 1`` at ``v = 0`` and
    tends to -1 as ``v -> inf``.
    """
    if v < 0.0:
        raise ValueError("v >= 0 required")
    kern = _kernel_of(params, kernel)
    integral, _ = _speed_integral(params, kern, v)
    lhs = (params.eta / math.pi) * params.alpha ** 2 * params.gamma * integral
    return lhs - 1.0


@dataclass(frozen=True)
class PulseSolution:
    """Self-consistent traveling pulse: wave speed plus co-moving profile."""

    v_c: float
    profile: Callable[[np.ndarray], np.ndarray]
    profile_deriv: Callable[[np.ndarray], np.ndarray]
    params: ModelParams
    kernel: SourceKernel
    direction: str = "right"


@dataclass(frozen=True)
class ThresholdResult:
    """Critical stiffness with the quadrature error bound of its integral."""

    eta_star: float
    quadrature_error: float


def critical_stiffness(params: ModelParams, kernel: Optional[SourceKernel] = None,
                       ) -> ThresholdResult:
    """Stiffness above which a traveling pulse exists.

    Monotone decreasing in the source width for the Gaussian family, with
    limit ``4 beta^3 / (alpha^2 gamma)`` as the source sharpens to a point.
    """
    if params.gamma == 0.0:
        raise ValueError("critical stiffness undefined for gamma = 0 (no production)")
    kern = _kernel_of(params, kernel)
    integral, err = _speed_integral(params, kern, 0.0)
    if integral <= 0.0:
        raise ValueError("kernel transform integrates to zero; no threshold")
    pref = math.pi / (params.alpha ** 2 * params.gamma)
    eta_star = pref / integral
    return ThresholdResult(eta_star=eta_star,
                           quadrature_error=pref * err / integral ** 2)


def pulse_velocity(params: ModelParams, kernel: Optional[SourceKernel] = None,
                   ) -> Optional[PulseSolution]:
    """Positive root of the speed relation, or ``None`` below threshold.

    The residual is strictly decreasing, so a sign bracket followed by
    bisection is globally convergent.  At ``eta = eta*`` only the resting
    state exists and ``None`` is returned.
    """
    kern = _kernel_of(params, kernel)
    r0 = velocity_residual(params, kern, 0.0)
    if r0 <= 0.0:
        return None
    v_hi = 1.0
    for _ in range(80):
        if velocity_residual(params, kern, v_hi) < 0.0:
            break
        v_hi *= 2.0
    else:
        raise RuntimeError(f"failed to bracket the wave speed (residual still "
                           f"positive at v={v_hi:g}); kernel={kern.label}")
    lo, hi = 0.0, v_hi
    while hi - lo > ROOT_TOL:
        mid = 0.5 * (lo + hi)
        if velocity_residual(params, kern, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    v = 0.5 * (lo + hi)
    return PulseSolution(v_c=v,
                         profile=pulse_profile(params, kern, v),
                         profile_deriv=pulse_profile_deriv(params, kern, v),
                         params=params, kernel=kern)


def a_integral(beta: float) -> float:
    """Quadrature value of ``int_0^inf xi^2/(1+beta^2 xi^2)^2 dxi``.

    The tail is handled exactly by the substitution ``xi -> 1/u``, which maps
    ``[1/beta, inf)`` onto ``(0, beta]`` with the smooth integrand
    ``1/(u^2 + beta^2)^2``.
    """
    if not beta > 0.0:
        raise ValueError("beta > 0 required")
    split = 1.0 / beta
    b2 = beta * beta
    head, _ = adaptive_quad(lambda x: x * x / (1.0 + b2 * x * x) ** 2,
                            0.0, split, tol=QUAD_TOL)
    tail, _ = adaptive_quad(lambda u: 1.0 / (u * u + b2) ** 2,
                            0.0, beta, tol=QUAD_TOL)
    return head + tail
