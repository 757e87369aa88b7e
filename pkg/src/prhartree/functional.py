"""Problem description and the energy functional in trace form.

For a real field ``u`` on the torus the energy is

.. math:: I(u) = \\tfrac12 \\langle u, \\sqrt{-\\Delta+m^2}\\,u\\rangle
                 + \\tfrac12 \\int V u^2 - \\tfrac{1}{2\\theta} D(u),
          \\qquad D(u) = \\int (W * |u|^\\theta) |u|^\\theta,

and its gradient is the residual of
``sqrt(-Delta+m^2) u + V u - (W * |u|^theta) |u|^(theta-2) u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .kernels import KernelSpec, KernelSplit, convolve, kernel_split, validate_assumption_W
from .lattice import Field, Lattice, check_same_lattice, irfft, lp_norm, rfft

__all__ = [
    "ProblemSpec",
    "HypothesisReport",
    "HypothesisError",
    "DegenerateFieldError",
    "RayCoefficients",
    "hartree_term",
    "energy",
    "gradient",
    "ray_coefficients",
    "ray_energy",
    "hls_bound_check",
    "constant_potential",
    "well_potential",
]


class HypothesisError(ValueError):
    """The problem violates the standing assumptions and no override was given."""


class DegenerateFieldError(ValueError):
    """Raised for a zero field or a nonpositive Hartree term where one is required."""


def constant_potential(lattice: Lattice, alpha: float) -> np.ndarray:
    return np.full(lattice.shape, float(alpha))


def well_potential(lattice: Lattice, v_inf: float, k: float, amplitude: float = 1.0, center=None) -> np.ndarray:
    """``V(y) = v_inf - amplitude * exp(-k |y|)`` with the torus distance."""
    return v_inf - amplitude * np.exp(-k * lattice.distance(center))


@dataclass
class HypothesisReport:
    v1_ok: bool
    v2_ok: bool | None
    v_inf_ok: bool | None
    w: object
    override: bool = False
    messages: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.v1_ok and self.v2_ok is not False and self.v_inf_ok is not False and self.w.admissible

    @property
    def accepted(self) -> bool:
        return self.ok or self.override

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "override": self.override,
            "V1": self.v1_ok,
            "V2": self.v2_ok,
            "V_inf_positive": self.v_inf_ok,
            "W": self.w.to_dict(),
            "messages": list(self.messages) + list(self.w.messages),
        }


@dataclass
class ProblemSpec:
    """A full instance of the equation on a lattice.

    ``potential`` is either a constant ``alpha`` or an array of grid values.
    ``v0`` defaults to the smallest admissible shift making ``V + V0 >= 0``.
    ``v2`` is an optional ``(k_decay, R)`` pair describing how ``V`` approaches
    ``v_inf`` from below.
    """

    lattice: Lattice
    m: float
    theta: float
    potential: float | np.ndarray
    kernel: KernelSpec
    v0: float | None = None
    v_inf: float | None = None
    v2: tuple | None = None
    override_hypotheses: bool = False

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"mass must be positive, got {self.m}")
        if self.theta < 2:
            raise ValueError(f"theta must be >= 2, got {self.theta}")
        self.kernel.validate(self.lattice.dim)
        if isinstance(self.potential, Field):
            check_same_lattice(self.potential, self.lattice.zeros())
            self.potential = self.potential.values
        if np.ndim(self.potential) == 0:
            self.potential = float(self.potential)
            if self.v_inf is None:
                self.v_inf = self.potential
        else:
            self.potential = np.asarray(self.potential, dtype=float).reshape(self.lattice.shape)
            if not np.all(np.isfinite(self.potential)):
                raise ValueError("potential must be finite")
        if self.v0 is None:
            vmin = self.potential_min
            self.v0 = -vmin if vmin < 0 else 0.5 * self.m

    @property
    def is_constant_potential(self) -> bool:
        return isinstance(self.potential, float)

    @property
    def alpha(self) -> float | None:
        return self.potential if self.is_constant_potential else None

    @property
    def potential_min(self) -> float:
        return float(np.min(self.potential))

    @property
    def potential_values(self) -> np.ndarray:
        if self.is_constant_potential:
            return constant_potential(self.lattice, self.potential)
        return self.potential

    def with_potential(self, potential, **changes) -> "ProblemSpec":
        kw = dict(
            lattice=self.lattice,
            m=self.m,
            theta=self.theta,
            potential=potential,
            kernel=self.kernel,
            v0=None,
            v_inf=None,
            v2=None,
            override_hypotheses=self.override_hypotheses,
        )
        kw.update(changes)
        return ProblemSpec(**kw)

    def limit_problem(self, alpha: float | None = None) -> "ProblemSpec":
        """The constant-potential problem ``V = alpha`` (default ``v_inf``)."""
        alpha = self.v_inf if alpha is None else alpha
        if alpha is None:
            raise ValueError("limit problem needs alpha or v_inf")
        return self.with_potential(float(alpha))

    def discretization_key(self) -> tuple:
        return (self.lattice, self.m, self.theta, self.kernel.kind, tuple(sorted(self.kernel.params().items())))

    def check_hypotheses(self) -> HypothesisReport:
        msgs = []
        v = self.potential_values
        v1 = 0 < self.v0 < self.m and bool(np.all(v + self.v0 >= 0))
        if not v1:
            msgs.append(
                f"V1 violated: need V + V0 >= 0 with V0 in (0, m); V0 = {self.v0:g}, min V = {v.min():g}, m = {self.m:g}"
            )
        v_inf_ok = None if self.v_inf is None else self.v_inf > 0
        if v_inf_ok is False:
            msgs.append(f"V_inf must be positive, got {self.v_inf:g}")
        v2 = None
        if self.v2 is not None:
            k, R = self.v2
            if self.v_inf is None:
                v2 = False
                msgs.append("V2 needs V_inf")
            else:
                r = self.lattice.radius
                far = r >= R
                v2 = 0 < k < 2 * self.m and R > 0 and bool(
                    np.all(v[far] <= self.v_inf - np.exp(-k * r[far]) + 1e-14 * abs(self.v_inf))
                )
                if not v2:
                    msgs.append(f"V2 violated for k = {k:g}, R = {R:g} (need k in (0, 2m) and V <= V_inf - exp(-k|x|))")
        w = validate_assumption_W(self.kernel, self.theta, self.lattice.dim, self.override_hypotheses)
        return HypothesisReport(v1, v2, v_inf_ok, w, self.override_hypotheses, msgs)

    def to_dict(self) -> dict:
        d = {
            "dim": self.lattice.dim,
            "n": self.lattice.n,
            "extent": self.lattice.extent,
            "m": self.m,
            "theta": self.theta,
            "kernel": self.kernel.to_dict(),
            "V0": self.v0,
            "V_inf": self.v_inf,
            "override_hypotheses": self.override_hypotheses,
        }
        if self.is_constant_potential:
            d["potential"] = {"kind": "constant", "alpha": self.potential}
        else:
            d["potential"] = {"kind": "array"}
        if self.v2 is not None:
            d["V2"] = {"k": self.v2[0], "R": self.v2[1]}
        return d


@dataclass(frozen=True)
class RayCoefficients:
    """``I(t u) = A t^2 / 2 - B t^(2 theta) / (2 theta)``."""

    A: float
    B: float


def _field(spec: ProblemSpec, u) -> Field:
    if isinstance(u, Field):
        check_same_lattice(u, spec.lattice.zeros())
        return u
    return Field(spec.lattice, u)


def _power(values: np.ndarray, theta: float) -> np.ndarray:
    a = np.abs(values)
    return a * a if theta == 2 else a**theta


def _odd_power(values: np.ndarray, theta: float) -> np.ndarray:
    """``|u|^(theta-2) u`` with value 0 at ``u = 0``."""
    if theta == 2:
        return values
    return np.abs(values) ** (theta - 2) * values


def _potential_term(spec: ProblemSpec, values: np.ndarray) -> float:
    h = spec.lattice.cell_volume
    if spec.is_constant_potential:
        return spec.potential * h * float(np.vdot(values, values))
    return h * float(np.sum(spec.potential * values * values))


def _convolved_power(spec: ProblemSpec, values: np.ndarray):
    p = _power(values, spec.theta)
    lat = spec.lattice
    conv = irfft(spec.kernel.multiplier(lat, half=True) * rfft(p, lat), lat)
    return p, conv


def hartree_term(spec: ProblemSpec, u) -> float:
    """``D(u) = int (W * |u|^theta) |u|^theta``."""
    u = _field(spec, u)
    p, conv = _convolved_power(spec, u.values)
    return spec.lattice.cell_volume * float(np.vdot(conv, p))


def ray_coefficients(spec: ProblemSpec, u) -> RayCoefficients:
    u = _field(spec, u)
    if not np.any(u.values):
        raise DegenerateFieldError("ray coefficients need a nonzero field")
    A = spectral.quadratic_form(u, spec.m) + _potential_term(spec, u.values)
    return RayCoefficients(A, hartree_term(spec, u))


def ray_energy(coeffs: RayCoefficients, t, theta: float):
    t = np.asarray(t, dtype=float)
    return 0.5 * coeffs.A * t**2 - coeffs.B * t ** (2 * theta) / (2 * theta)


def energy(spec: ProblemSpec, u) -> float:
    u = _field(spec, u)
    q = spectral.quadratic_form(u, spec.m)
    return 0.5 * q + 0.5 * _potential_term(spec, u.values) - hartree_term(spec, u) / (2 * spec.theta)


def gradient(spec: ProblemSpec, u) -> Field:
    """Residual ``T u + V u - (W * |u|^theta) |u|^(theta-2) u``; the L^2 gradient of :func:`energy`."""
    u = _field(spec, u)
    v = u.values
    _, conv = _convolved_power(spec, v)
    tu = spectral.apply_sqrt_op(u, spec.m).values
    return Field(spec.lattice, tu + spec.potential * v - conv * _odd_power(v, spec.theta))


@dataclass
class HLSReport:
    lhs: float
    rhs: float
    w1_term: float
    w2_term: float
    split: KernelSplit
    exponent: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1 + 1e-8) + 1e-300

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


def hls_bound_check(spec: ProblemSpec, u, r: float = 2.0, radius: float = 1.0, split: KernelSplit | None = None) -> HLSReport:
    """Compare ``D(u)`` with ``|W1|_r |u|_q^(2 theta) + |W2|_inf |u|_theta^(2 theta)``.

    ``q = 2 r theta / (2 r - 1)``.  Tabulated kernels need an explicit ``split``.
    """
    from .kernels import Constant, Tabulated

    u = _field(spec, u)
    if split is None:
        if isinstance(spec.kernel, Tabulated):
            raise ValueError("tabulated kernel needs an explicit split")
        if isinstance(spec.kernel, Constant):
            lat = spec.lattice
            split = KernelSplit(r, 0.0, lat.zeros(), lat.zeros() + spec.kernel.value, 0.0, spec.kernel.value)
        else:
            split = kernel_split(spec.kernel, spec.lattice, r=r, radius=radius)
    q = 2 * split.r * spec.theta / (2 * split.r - 1)
    two_t = 2 * spec.theta
    w1 = split.w1_norm_r * lp_norm(u, q) ** two_t
    w2 = split.w2_sup * lp_norm(u, spec.theta) ** two_t
    return HLSReport(hartree_term(spec, u), w1 + w2, w1, w2, split, q)
