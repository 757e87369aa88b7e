"""Positive ground states of the pseudo-relativistic Hartree equation on a torus.

    sqrt(-Delta + m^2) u + V u = (W * |u|^theta) |u|^(theta-2) u

The operator acts as an exact Fourier multiplier; ground states are found by
preconditioned descent on the Nehari manifold of the energy functional.
"""

from .diagnostics import compare_to_limit, fit_decay_rate, symmetry_deviation
from .extension import SlabGrid, dtn_apply, extension_energy, harmonic_extension, trace_inequality_check
from .functional import ProblemSpec, energy, gradient, hartree_term, ray_coefficients
from .kernels import Constant, Gaussian, Newton, Tabulated, Yukawa, convolve, kernel_multiplier
from .lattice import Field, Lattice, forward_transform, inverse_transform, lp_norm, make_lattice, radial_profile
from .nehari import limit_level, nehari_scale, project_to_nehari
from .solver import SolveConfig, SolveReport, solve_ground_state, sweep
from .spectral import apply_sqrt_op, multiplier, precondition, quadratic_form

__version__ = "0.1.0"
