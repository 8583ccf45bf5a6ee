"""pulselab: numerical laboratory for self-generated directional migration on
viscoelastic substrates.

A deformation field on the line relaxes, spreads, and is produced at a moving
cluster that in turn rides its own deformation gradient.  The package builds
the model's exact resting and traveling-pulse solutions, solves the implicit
wave-speed and critical-stiffness relations, integrates the coupled dynamics
with a spectral exponential scheme, and measures the stability and decay
behavior of both solution families.
"""
from .model import (ModelParams, RescaledParams, ScalingExponents, SourceKernel,
                    gaussian_kernel, rescale, scale_trajectory, unscale_trajectory,
                    zero_kernel)
from .analytic import (PulseSolution, StationaryProfile, ThresholdResult,
                       a_integral, critical_stiffness, pulse_profile,
                       pulse_velocity, stationary_profile, velocity_residual)
from .grid import Field, SpectralGrid, barycentric_interpolate
from .dynamics import (PicardDivergence, RunReport, SimState, SimSystem,
                       StepConfig, discrete_pulse, eval_gradient_at, new_state,
                       propagate_field, recenter, simulate, stationary_field,
                       step, wkinf_norms)
from .trajectory import FieldSnapshot, Trajectory
from . import backend

__version__ = "0.1.0"
