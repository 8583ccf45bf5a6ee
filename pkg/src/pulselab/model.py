"""Physical parameters, source kernels, and the normalizing rescale map.

The physical model couples a substrate deformation field ``S(t, x)`` to a
cluster position ``x_c(t)``::

    alpha dS/dt = -S + beta^2 S_xx + alpha*gamma * g_eps(x - x_c)
    dx_c/dt     = -eta * S_x(t, x_c)

Space/time/amplitude units can be chosen so that ``alpha = beta = gamma = 1``,
leaving a single dimensionless stiffness ``eta_r = eta * alpha^2 * gamma /
beta^2`` and a rescaled source profile ``z -> g(beta z)``.  This module owns
those maps and the kernel abstraction (profile + Fourier transform + decay
certificate) everything else consumes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "ModelParams", "SourceKernel", "ScalingExponents", "RescaledParams",
    "gaussian_kernel", "zero_kernel", "rescale", "unscale_trajectory",
    "scale_trajectory",
]

SQRT_PI = math.sqrt(math.pi)


class ParameterError(ValueError):
    """A model parameter violates its domain constraint."""


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the deformation/migration model.

    alpha:   relaxation time of the substrate (> 0)
    beta:    correlation length of the substrate (> 0)
    gamma:   production amplitude at the cluster (>= 0)
    eta:     stiffness / mobility coupling (>= 0)
    epsilon: width of the regularized production profile (> 0)
    """

    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    eta: float = 5.0
    epsilon: float = 1e-3

    def __post_init__(self):
        for name in ("alpha", "beta", "epsilon"):
            if not getattr(self, name) > 0.0:
                raise ParameterError(f"{name} > 0 required, got {getattr(self, name)!r}")
        for name in ("gamma", "eta"):
            if getattr(self, name) < 0.0:
                raise ParameterError(f"{name} >= 0 required, got {getattr(self, name)!r}")


@dataclass(frozen=True)
class SourceKernel:
    """Even, non-negative, decaying production profile with its transform.

    ``fourier`` follows the convention ``ghat(xi) = int g(x) exp(-i x xi) dx``
    (real-valued because the profile is even).  ``decay_certificate = (M, m)``
    certifies ``|g|, |g'|, |g''| <= M exp(-m x^2)`` pointwise, and
    ``fourier_decay = (Mf, mf)`` certifies ``|ghat(xi)| <= Mf exp(-mf xi^2)``;
    the latter is what makes truncated frequency integrals certifiable.
    ``deriv_sup[m]`` is a sup-norm bound for the m-th derivative.
    """

    profile: Callable[[np.ndarray], np.ndarray]
    fourier: Callable[[np.ndarray], np.ndarray]
    mass: float
    decay_certificate: tuple[float, float]
    fourier_decay: tuple[float, float]
    deriv_sup: tuple[float, ...]
    smoothness_order: int = 6
    label: str = "kernel"

    def is_zero(self) -> bool:
        return self.mass == 0.0 and self.decay_certificate[0] == 0.0


def gaussian_kernel(epsilon: float) -> SourceKernel:
    """Unit-mass Gaussian production profile of width ``epsilon``.

    profile(x) = exp(-x^2/eps^2) / (eps sqrt(pi)),  fourier(xi) = exp(-eps^2 xi^2 / 4).
    """
    if not epsilon > 0.0:
        raise ParameterError(f"epsilon > 0 required, got {epsilon!r}")
    eps = float(epsilon)

    def profile(x):
        return np.exp(-np.square(np.asarray(x, dtype=float) / eps)) / (eps * SQRT_PI)

    def fourier(xi):
        return np.exp(-np.square(eps * np.asarray(xi, dtype=float)) / 4.0)

    # Certificate at half the natural rate so the polynomial prefactors of the
    # first two derivatives are absorbed into a single constant M.
    m_rate = 0.5 / eps ** 2
    sup0 = 1.0 / (eps * SQRT_PI)
    sup1 = math.sqrt(2.0 / math.e) / (eps ** 2 * SQRT_PI)
    sup2 = 2.0 / (eps ** 3 * SQRT_PI)
    sup3 = 3.907 / (eps ** 4 * SQRT_PI)
    big_m = max(sup0,
                2.0 * math.exp(-0.5) / (eps ** 2 * SQRT_PI),
                8.0 * math.exp(-0.75) / (eps ** 3 * SQRT_PI))
    return SourceKernel(
        profile=profile,
        fourier=fourier,
        mass=1.0,
        decay_certificate=(big_m, m_rate),
        fourier_decay=(1.0, eps ** 2 / 4.0),
        deriv_sup=(sup0, sup1, sup2, sup3),
        smoothness_order=6,
        label=f"gaussian(eps={eps:g})",
    )


def zero_kernel() -> SourceKernel:
    """Identically-zero production profile (degenerate gamma = 0 dynamics)."""
    z = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return SourceKernel(profile=z, fourier=z, mass=0.0,
                        decay_certificate=(0.0, 1.0), fourier_decay=(0.0, 1.0),
                        deriv_sup=(0.0, 0.0, 0.0, 0.0), label="zero")


def _shrink_kernel(kernel: SourceKernel, beta: float) -> SourceKernel:
    """Kernel with profile ``z -> g(beta z)`` (mass scales by 1/beta)."""
    if beta == 1.0:
        return kernel
    big_m, m_rate = kernel.decay_certificate
    mf_amp, mf_rate = kernel.fourier_decay
    return SourceKernel(
        profile=lambda z, _k=kernel: _k.profile(beta * np.asarray(z, dtype=float)),
        fourier=lambda xi, _k=kernel: _k.fourier(np.asarray(xi, dtype=float) / beta) / beta,
        mass=kernel.mass / beta,
        decay_certificate=(big_m * max(1.0, beta) ** 2, m_rate * beta ** 2),
        fourier_decay=(mf_amp / beta, mf_rate / beta ** 2),
        deriv_sup=tuple(s * beta ** i for i, s in enumerate(kernel.deriv_sup)),
        smoothness_order=kernel.smoothness_order,
        label=f"{kernel.label}|shrunk(beta={beta:g})",
    )


@dataclass(frozen=True)
class ScalingExponents:
    """Scale factor and exponents of the normalizing substitution.

    s_r(t, x) = lam^a s(lam^b t, lam^c x),  x_cr(t) = lam^d x_c(lam^b t),
    with d + c = 0 so the rescaled position tracks the rescaled source.
    """

    lam: float
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if self.lam <= 0.0:
            raise ParameterError("scale factor lam must be positive")
        if abs(self.d + self.c) > 1e-12:
            raise ParameterError("exponents must satisfy d + c = 0")

    # factors mapping rescaled quantities back to physical ones
    @property
    def time_factor(self) -> float:
        return self.lam ** self.b

    @property
    def space_factor(self) -> float:
        return self.lam ** self.c

    @property
    def field_factor(self) -> float:
        return self.lam ** (-self.a)


@dataclass(frozen=True)
class RescaledParams:
    """Normalized model: unit relaxation/correlation/production, one stiffness."""

    eta_r: float
    kernel: SourceKernel
    degenerate: Optional[str] = None


def rescale(params: ModelParams, kernel: Optional[SourceKernel] = None,
            ) -> tuple[RescaledParams, ScalingExponents]:
    """Map physical parameters to the normalized model.

    Chooses lam, a, b, c with ``lam^b = alpha``, ``lam^c = beta``,
    ``lam^a = 1/(gamma*alpha)`` and ``d = -c``, which sets the rescaled
    relaxation/correlation/production constants to one and leaves
    ``eta_r = eta * alpha^2 * gamma / beta^2``.  The rescaled kernel keeps its
    physical mass (``int g(beta z) dz = mass/beta``); it is not renormalized.

    gamma = 0 is accepted but flagged degenerate: the sourceless dynamics decay
    to zero regardless of eta, and the amplitude exponent is undefined.
    """
    kernel = kernel if kernel is not None else gaussian_kernel(params.epsilon)
    if params.gamma == 0.0:
        # amplitude exponent is undefined (and immaterial: the sourceless
        # dynamics are linear homogeneous), so fix a = 0 and flag.
        exps = ScalingExponents(lam=math.e, a=0.0, b=math.log(params.alpha),
                                c=math.log(params.beta), d=-math.log(params.beta))
        return (RescaledParams(eta_r=0.0, kernel=zero_kernel(),
                               degenerate="degenerate: zero production"), exps)

    ga = params.gamma * params.alpha
    if params.alpha == 1.0 and params.beta == 1.0 and ga == 1.0:
        exps = ScalingExponents(lam=1.0, a=0.0, b=0.0, c=0.0, d=0.0)
    else:
        exps = ScalingExponents(lam=math.e,
                                a=-math.log(ga),
                                b=math.log(params.alpha),
                                c=math.log(params.beta),
                                d=-math.log(params.beta))
    eta_r = params.eta * params.alpha ** 2 * params.gamma / params.beta ** 2
    return RescaledParams(eta_r=eta_r, kernel=_shrink_kernel(kernel, params.beta)), exps


def unscale_trajectory(traj, exps: ScalingExponents):
    """Map a trajectory computed in rescaled variables to physical variables.

    Times scale by ``lam^b``, positions/lengths by ``lam^c``, field amplitudes
    by ``lam^(-a)``; derived columns scale accordingly.  The round trip with
    :func:`scale_trajectory` is the identity up to floating point.
    """
    tf, xf, sf = exps.time_factor, exps.space_factor, exps.field_factor
    return traj.scaled(time=tf, space=xf, amplitude=sf)


def scale_trajectory(traj, exps: ScalingExponents):
    """Inverse of :func:`unscale_trajectory` (physical -> rescaled)."""
    tf, xf, sf = exps.time_factor, exps.space_factor, exps.field_factor
    return traj.scaled(time=1.0 / tf, space=1.0 / xf, amplitude=1.0 / sf)
