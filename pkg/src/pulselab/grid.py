"""Periodic spectral grid and deformation-field container.

Fields are stored as rfft-layout coefficients in the *continuous transform*
normalization: ``hat[k] ~ int s(x) exp(-i xi_k x) dx`` over the box
``[-L, L)`` with ``xi_k = pi k / L``.  That convention makes the zero mode the
total deformation, makes analytic transforms directly usable as Galerkin
initial data, and keeps the exponential integrator's source term free of grid
bookkeeping.  The Nyquist mode is kept at zero (it has no sign-consistent
derivative and its retention breaks reflection symmetry).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

__all__ = ["SpectralGrid", "Field", "barycentric_interpolate"]


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform periodic grid on ``[-L, L)`` with ``N`` points (power of two)."""

    half_width: float
    n_points: int

    def __post_init__(self):
        if self.half_width <= 0.0:
            raise ValueError("half_width > 0 required")
        n = self.n_points
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError(f"n_points must be a power of two >= 16, got {n}")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.n_points

    @cached_property
    def x(self) -> np.ndarray:
        return -self.half_width + self.dx * np.arange(self.n_points)

    @cached_property
    def xi(self) -> np.ndarray:
        return (math.pi / self.half_width) * np.arange(self.n_points // 2 + 1)

    @cached_property
    def twiddle(self) -> np.ndarray:
        # phase alignment between the rfft origin (x = -L) and the box center
        return np.where(np.arange(self.n_points // 2 + 1) % 2 == 0, 1.0, -1.0)


class Field:
    """Real periodic field, held spectrally; samples reconstructed on demand."""

    __slots__ = ("grid", "hat", "_samples")

    def __init__(self, grid: SpectralGrid, hat: np.ndarray):
        if hat.shape != (grid.n_points // 2 + 1,):
            raise ValueError("coefficient array does not match grid")
        self.grid = grid
        self.hat = hat
        self._samples = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def zeros(cls, grid: SpectralGrid) -> "Field":
        return cls(grid, np.zeros(grid.n_points // 2 + 1, dtype=complex))

    @classmethod
    def from_samples(cls, grid: SpectralGrid, samples: np.ndarray) -> "Field":
        samples = np.asarray(samples, dtype=float)
        if samples.shape != (grid.n_points,):
            raise ValueError("sample array does not match grid")
        hat = grid.dx * grid.twiddle * np.fft.rfft(samples)
        hat[-1] = 0.0
        return cls(grid, hat)

    @classmethod
    def from_profile(cls, grid: SpectralGrid, profile: Callable) -> "Field":
        return cls.from_samples(grid, np.asarray(profile(grid.x), dtype=float))

    @classmethod
    def from_fourier(cls, grid: SpectralGrid, fourier: Callable) -> "Field":
        """Galerkin projection: sample a continuous transform on the mode set."""
        hat = np.asarray(fourier(grid.xi), dtype=complex).copy()
        hat[-1] = 0.0
        return cls(grid, hat)

    # -- reconstruction ----------------------------------------------------
    def samples(self) -> np.ndarray:
        if self._samples is None:
            g = self.grid
            self._samples = np.fft.irfft(g.twiddle * self.hat, g.n_points) * (g.n_points / (2.0 * g.half_width))
        return self._samples

    def derivative_samples(self, order: int = 1) -> np.ndarray:
        g = self.grid
        dhat = (1j * g.xi) ** order * self.hat
        dhat[-1] = 0.0
        return np.fft.irfft(g.twiddle * dhat, g.n_points) * (g.n_points / (2.0 * g.half_width))

    def norm_sup(self, order: int = 0) -> float:
        vals = self.samples() if order == 0 else self.derivative_samples(order)
        return float(np.abs(vals).max())

    @property
    def s_tot(self) -> float:
        """Spatial integral of the field (the zero mode)."""
        return float(self.hat[0].real)

    # -- algebra -----------------------------------------------------------
    def copy(self) -> "Field":
        return Field(self.grid, self.hat.copy())

    def __add__(self, other: "Field") -> "Field":
        if other.grid is not self.grid and other.grid != self.grid:
            raise ValueError("grid mismatch")
        return Field(self.grid, self.hat + other.hat)

    def __sub__(self, other: "Field") -> "Field":
        if other.grid is not self.grid and other.grid != self.grid:
            raise ValueError("grid mismatch")
        return Field(self.grid, self.hat - other.hat)

    def shifted(self, displacement: float) -> "Field":
        """Field translated so the new origin sits at ``displacement``."""
        return Field(self.grid, self.hat * np.exp(1j * self.grid.xi * displacement))

    def reflected(self) -> "Field":
        """Field mirrored about x = 0."""
        return Field(self.grid, np.conj(self.hat))

    def boundary_max(self, fraction: float = 0.9) -> float:
        """Largest |s| on the outer band |x| >= fraction * L."""
        s = self.samples()
        mask = np.abs(self.grid.x) >= fraction * self.grid.half_width
        return float(np.abs(s[mask]).max())


def barycentric_interpolate(x0: float, dx: float, values: np.ndarray,
                            x: float, order: int = 6) -> float:
    """Interpolate uniformly-sampled ``values`` at ``x`` with a local
    ``order``-degree barycentric stencil.

    ``x0`` is the coordinate of ``values[0]``.  Equispaced barycentric weights
    are the alternating binomial coefficients; an exact node hit returns the
    nodal value.
    """
    n = len(values)
    if order + 1 > n:
        raise ValueError("window larger than the sample array")
    pos = (x - x0) / dx
    if pos < -0.5 or pos > n - 0.5:
        raise ValueError(f"interpolation point {x!r} outside the sampled range")
    j0 = int(round(pos)) - (order + 1) // 2
    j0 = min(max(j0, 0), n - (order + 1))
    idx = np.arange(j0, j0 + order + 1)
    diff = pos - idx
    hit = np.abs(diff) < 1e-13
    if hit.any():
        return float(values[idx[np.argmax(hit)]])
    w = np.array([(-1.0) ** j * math.comb(order, j) for j in range(order + 1)])
    q = w / diff
    return float(np.dot(q, values[idx]) / q.sum())
