"""Spectral solver and verification laboratory for steady axisymmetric
perturbations of Hagen-Poiseuille flow in an infinite pipe (periodic
surrogate), in the stream-function / Fourier-mode formulation.
"""

from .config import ConfigError, FlowConfig, dumps_config, load_config, parse_config
from .fields import (ForcingField, StreamState, VelocityField,
                     azimuthal_vorticity, dealias_modes, divergence, flux,
                     forward_transform, inverse_transform, nonlinear_forcing,
                     velocity_from_stream, vorticity_from_velocity)
from .grid import ModeSet, RadialGrid, grids_from_config, mode_set, radial_grid
from .modesolve import (BaseFlow, ModeSolveError, StreamModeOperator,
                        SwirlModeOperator, axial_forcing_energy_residual,
                        energy_identity_residual, hagen_poiseuille,
                        solve_stream_mode, solve_swirl_mode, stream_rhs,
                        stream_apriori_functional, swirl_apriori_functional,
                        swirl_energy_residual,
                        swirl_gradient_forcing_energy_residual)
from .nonlinear import (IterationReport, ModeOperatorSet, SetMembership,
                        calibrate_constants, contraction_set_check,
                        fixed_point_defect, linear_solve_T,
                        momentum_curl_residual, picard_solve, uniqueness_probe)
from .norms import NormReport, hr3_norm, norm_report, sobolev_norm, state_l2r, weighted_l2
from .radial import RadialOperator, assemble_L, assemble_L_squared, axis_rows, wall_rows

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
