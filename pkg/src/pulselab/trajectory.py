"""Trajectory and snapshot records shared by dynamics, experiments, and io."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = ["Trajectory", "FieldSnapshot"]


@dataclass
class FieldSnapshot:
    """Field samples at one instant, in the lab frame."""

    t: float
    x: np.ndarray
    s: np.ndarray

    def scaled(self, time: float, space: float, amplitude: float) -> "FieldSnapshot":
        return FieldSnapshot(t=self.t * time, x=self.x * space, s=self.s * amplitude)


@dataclass
class Trajectory:
    """Sampled run history: times, lab-frame cluster path, and field monitors.

    ``norm_inf``/``norm_dx_inf``/``norm_ddx_inf`` are sup norms of the field
    and its first two spatial derivatives; they scale inhomogeneously under
    the normalizing substitution, so they are kept separate and only combined
    into a W^{1,inf} column at output time.
    """

    t: np.ndarray
    x_c: np.ndarray
    v_c: np.ndarray
    s_tot: np.ndarray
    norm_inf: np.ndarray
    norm_dx_inf: np.ndarray
    norm_ddx_inf: np.ndarray
    snapshots: list[FieldSnapshot] = field(default_factory=list)

    @property
    def norm_w1(self) -> np.ndarray:
        return self.norm_inf + self.norm_dx_inf

    def scaled(self, time: float, space: float, amplitude: float) -> "Trajectory":
        """Rescale every column by the exact substitution factors."""
        return Trajectory(
            t=self.t * time,
            x_c=self.x_c * space,
            v_c=self.v_c * (space / time),
            s_tot=self.s_tot * (amplitude * space),
            norm_inf=self.norm_inf * amplitude,
            norm_dx_inf=self.norm_dx_inf * (amplitude / space),
            norm_ddx_inf=self.norm_ddx_inf * (amplitude / space ** 2),
            snapshots=[snap.scaled(time, space, amplitude) for snap in self.snapshots],
        )
