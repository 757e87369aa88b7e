"""Nehari manifold projection and the ground-state level of the limit problem."""

from __future__ import annotations

from dataclasses import dataclass

from .functional import DegenerateFieldError, ProblemSpec, RayCoefficients, _field, ray_coefficients
from .lattice import Field

__all__ = ["NehariState", "nehari_scale", "project_to_nehari", "nehari_energy", "limit_level"]


@dataclass
class NehariState:
    field: Field
    t_scale: float
    nehari_residual: float
    coefficients: RayCoefficients

    @property
    def relative_residual(self) -> float:
        c = self.coefficients
        return abs(self.nehari_residual) / max(c.A, c.B)


def _scale_from(c: RayCoefficients, theta: float) -> float:
    if not c.B > 0:
        raise DegenerateFieldError(f"Hartree term must be positive to project, got D = {c.B:.3e}")
    return (c.A / c.B) ** (1.0 / (2 * theta - 2))


def nehari_scale(spec: ProblemSpec, u) -> float:
    """The unique maximiser ``t_u = (A/B)^(1/(2 theta - 2))`` of ``t -> I(t u)``."""
    return _scale_from(ray_coefficients(spec, u), spec.theta)


def nehari_energy(c: RayCoefficients, theta: float) -> float:
    """``max_t I(t u) = (theta-1)/(2 theta) * A * t_u^2`` from the ray coefficients."""
    t = _scale_from(c, theta)
    return (theta - 1) / (2 * theta) * c.A * t * t


def project_to_nehari(spec: ProblemSpec, u) -> NehariState:
    u = _field(spec, u)
    c = ray_coefficients(spec, u)
    t = _scale_from(c, spec.theta)
    th = spec.theta
    scaled = RayCoefficients(c.A * t * t, c.B * t ** (2 * th))
    return NehariState(u * t, t, scaled.A - scaled.B, scaled)


def limit_level(alpha: float, spec: ProblemSpec, config=None) -> float:
    """Ground-state level ``E_alpha`` of the constant-potential problem ``V = alpha``.

    Solved on the same lattice and kernel as ``spec`` (its potential is ignored).
    Raises ``ValueError`` when ``alpha <= -m``.
    """
    return limit_report(alpha, spec, config).energy


def limit_report(alpha: float, spec: ProblemSpec, config=None):
    from .solver import SolveConfig, solve_ground_state

    if not alpha + spec.m > 0:
        raise ValueError(f"limit problem needs alpha > -m, got alpha = {alpha}, m = {spec.m}")
    lim = spec.limit_problem(alpha)
    if alpha <= 0:
        # V_inf > 0 is not part of the limit problem itself
        lim.v_inf = None
    return solve_ground_state(lim, config or SolveConfig())
