"""Local realisation of ``sqrt(-Delta+m^2)`` through the half-space extension.

Boundary data ``g`` on the torus is extended into the slab ``[0, X] x T^N`` by
solving ``-Delta v + m^2 v = 0``.  In the tangential Fourier basis this is the
ODE ``v'' = rho^2 v`` per mode, ``rho = sqrt(m^2 + |k|^2)``, discretised with
second-order differences on ``M`` uniform layers and closed at ``x = X`` by the
decaying Robin condition ``v' = -rho v``.

The discretisation is the minimiser of the slab energy (trapezoid rule in
``x``, forward differences for ``dv/dx``, exact decaying tail beyond ``X``),
so the discrete Dirichlet-to-Neumann map and energy satisfy
``E(ext g) = <g, DtN g>`` exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import spectral
from .functional import ProblemSpec, _potential_term, hartree_term
from .lattice import Field, Lattice, check_same_lattice, lp_norm

__all__ = [
    "SlabGrid",
    "SlabField",
    "harmonic_extension",
    "dtn_apply",
    "extension_energy",
    "extension_form_energy",
    "trace_inequality_check",
    "validate_operator",
]


@dataclass(frozen=True)
class SlabGrid:
    base: Lattice
    depth: float
    layers: int

    def __post_init__(self):
        if not self.depth > 0:
            raise ValueError(f"slab depth must be positive, got {self.depth}")
        if int(self.layers) != self.layers or self.layers < 8:
            raise ValueError(f"need at least 8 layers, got {self.layers}")

    @property
    def dx(self) -> float:
        return self.depth / self.layers

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.depth, self.layers + 1)

    @property
    def shape(self) -> tuple:
        return (self.layers + 1,) + self.base.shape

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.layers + 1, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        return w


@dataclass
class SlabField:
    """Values on the slab, layer ``i`` at ``x = i * dx``; layer 0 is the trace."""

    slab: SlabGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.slab.shape:
            raise ValueError(f"slab field shape {self.values.shape} != {self.slab.shape}")

    def trace(self) -> Field:
        return Field(self.slab.base, self.values[0])

    def layer(self, i: int) -> Field:
        return Field(self.slab.base, self.values[i])

    def __add__(self, other):
        return SlabField(self.slab, self.values + (other.values if isinstance(other, SlabField) else other))

    def __mul__(self, c):
        return SlabField(self.slab, self.values * c)

    __rmul__ = __mul__


def _mode_profiles(rho: np.ndarray, slab: SlabGrid) -> np.ndarray:
    """Discrete decaying solutions ``s_i(rho)`` with ``s_0 = 1``, shape ``(M+1,) + rho.shape``.

    Vectorised Thomas algorithm over all modes.
    """
    h = slab.dx
    M = slab.layers
    diag = -(2.0 + (h * rho) ** 2)
    last = -(2.0 + 2.0 * h * rho + (h * rho) ** 2)
    # unknowns s_1..s_M; sub/super diagonals are 1 except the last sub entry (2)
    cp = np.empty((M,) + rho.shape)
    dp = np.empty((M,) + rho.shape)
    cp[0] = 1.0 / diag
    dp[0] = -1.0 / diag
    for i in range(1, M):
        a = 2.0 if i == M - 1 else 1.0
        b = last if i == M - 1 else diag
        denom = b - a * cp[i - 1]
        cp[i] = 1.0 / denom
        dp[i] = (0.0 - a * dp[i - 1]) / denom
    s = np.empty((M + 1,) + rho.shape)
    s[0] = 1.0
    s[M] = dp[M - 1]
    for i in range(M - 2, -1, -1):
        s[i + 1] = dp[i] - cp[i] * s[i + 2]
    return s


def _y_axes(lattice: Lattice) -> tuple:
    return tuple(range(1, lattice.dim + 1))


def harmonic_extension(g: Field, m: float, slab: SlabGrid) -> SlabField:
    """Solve ``-Delta v + m^2 v = 0`` in the slab with trace ``g``."""
    check_same_lattice(g, slab.base.zeros())
    lat = slab.base
    rho = spectral.multiplier(lat, m, half=True)
    s = _mode_profiles(rho, slab)
    G = np.fft.rfftn(g.values)
    V = s * G[None]
    vals = np.fft.irfftn(V, s=lat.shape, axes=_y_axes(lat))
    return SlabField(slab, vals)


def dtn_apply(g: Field, m: float, slab: SlabGrid) -> Field:
    """``-dv/dx`` at ``x = 0``: ``(v_0 - v_1)/dx + (dx/2)(-Delta_y + m^2) v_0``.

    The second term replaces ``v''(0)`` using the equation, which makes the
    one-sided difference second order.
    """
    v = harmonic_extension(g, m, slab)
    h = slab.dx
    v0, v1 = v.values[0], v.values[1]
    return Field(slab.base, (v0 - v1) / h + 0.5 * h * spectral.apply_helmholtz(Field(slab.base, v0), m).values)


def _slab_parts(v: SlabField, m: float):
    """Per-layer ``int |grad_y v|^2``, ``int v^2``, x-difference energy and tail pieces."""
    slab = v.slab
    lat = slab.base
    V = np.fft.rfftn(v.values, axes=_y_axes(lat)) * lat.cell_volume
    wts = lat.half_weights
    k2 = lat.k_squared_half
    power = wts * np.abs(V) ** 2 / lat.volume
    sum_axes = tuple(range(1, lat.dim + 1))
    grad_y = np.sum(power * k2, axis=sum_axes)
    mass = np.sum(power, axis=sum_axes)
    dvals = np.diff(v.values, axis=0)
    dx_energy = lat.cell_volume * float(np.sum(dvals * dvals)) / slab.dx
    rho = np.sqrt(m * m + k2)
    tail = power[-1]
    tail_mass = float(np.sum(tail / (2 * rho)))
    tail_dx = float(np.sum(tail * rho / 2))
    tail_grad_y = float(np.sum(tail * k2 / (2 * rho)))
    return grad_y, mass, dx_energy, tail_mass, tail_dx, tail_grad_y


def extension_energy(v: SlabField, m: float) -> float:
    """``iint |grad v|^2 + m^2 v^2`` over the slab plus the exact decaying tail beyond ``X``."""
    if not m > 0:
        raise ValueError(f"mass must be positive, got {m}")
    w = v.slab.trapezoid_weights()
    grad_y, mass, dx_energy, tail_mass, tail_dx, tail_grad_y = _slab_parts(v, m)
    body = float(np.sum(w * (grad_y + m * m * mass))) + dx_energy
    return body + tail_dx + tail_grad_y + m * m * tail_mass


def extension_form_energy(spec: ProblemSpec, g: Field, slab: SlabGrid) -> float:
    """The energy with the quadratic part taken from the harmonic extension of ``g``."""
    v = harmonic_extension(g, spec.m, slab)
    return (
        0.5 * extension_energy(v, spec.m)
        + 0.5 * _potential_term(spec, g.values)
        - hartree_term(spec, g) / (2 * spec.theta)
    )


@dataclass
class TraceInequality:
    lhs: float
    rhs: float
    lam: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + 1e-10 * max(abs(self.rhs), abs(self.lhs))


def trace_inequality_check(v: SlabField, lam: float, m: float | None = None, full_gradient: bool = True) -> TraceInequality:
    """``int g^2 <= lam iint v^2 + (1/lam) iint |grad v|^2`` on the slab plus its tail.

    With ``full_gradient=False`` only ``dv/dx`` enters the right side.  The
    tail continues each mode as ``exp(-rho (x - X))`` with the ``rho`` of mass
    ``m`` (default ``lam``).
    """
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    m = lam if m is None else m
    w = v.slab.trapezoid_weights()
    grad_y, mass, dx_energy, tail_mass, tail_dx, tail_grad_y = _slab_parts(v, m)
    l2 = float(np.sum(w * mass)) + tail_mass
    grad = dx_energy + tail_dx
    if full_gradient:
        grad += float(np.sum(w * grad_y)) + tail_grad_y
    lhs = float(mass[0])
    return TraceInequality(lhs, lam * l2 + grad / lam, lam)


def validate_operator(
    lattice: Lattice,
    m: float,
    layers=(64, 128),
    depth: float | None = None,
    seed: int = 0,
    g: Field | None = None,
) -> dict:
    """Compare the discrete DtN map with the spectral operator under layer refinement."""
    depth = 8.0 / m if depth is None else depth
    if g is None:
        rng = np.random.default_rng(seed)
        g = Field(lattice, rng.standard_normal(lattice.shape))
    exact = spectral.apply_sqrt_op(g, m)
    twice = spectral.apply_helmholtz(g, m)
    norm = lp_norm(exact, 2)
    rows = []
    for M in layers:
        slab = SlabGrid(lattice, depth, M)
        d = dtn_apply(g, m, slab)
        dd = dtn_apply(d, m, slab)
        rows.append(
            {
                "layers": int(M),
                "dx": slab.dx,
                "rel_l2_error": lp_norm(d - exact, 2) / norm,
                "square_rel_l2_error": lp_norm(dd - twice, 2) / lp_norm(twice, 2),
            }
        )
    orders = []
    for a, b in zip(rows, rows[1:]):
        ratio = b["layers"] / a["layers"]
        orders.append(math.log(a["rel_l2_error"] / b["rel_l2_error"]) / math.log(ratio))
    return {
        "dim": lattice.dim,
        "n": lattice.n,
        "extent": lattice.extent,
        "m": m,
        "depth": depth,
        "seed": seed,
        "levels": rows,
        "observed_orders": orders,
    }
