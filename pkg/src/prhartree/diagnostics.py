"""Post-solve checks: exponential decay, lattice symmetry, energy margins."""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass

import numpy as np

from .lattice import Field, irfft, lp_norm, radial_profile, rfft

__all__ = [
    "DecayFit",
    "MarginReport",
    "fit_decay_rate",
    "reference_decay_rate",
    "center_of_mass",
    "recenter",
    "symmetry_deviation",
    "compare_to_limit",
]

DECAY_TOLERANCE = 0.15


@dataclass
class DecayFit:
    fitted_rate: float
    intercept: float
    window: tuple
    r_squared: float
    reference_rate: float
    within_tolerance: bool
    bins_used: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window)
        return d


def reference_decay_rate(m: float, alpha: float | None) -> float:
    """Sharpest boundary decay rate: ``m`` for ``alpha > 0``, else the bound ``m + alpha``."""
    if alpha is None or alpha > 0:
        return m
    return m + alpha


def fit_decay_rate(u: Field, window, reference_rate: float, bins: int | None = None, center=None) -> DecayFit:
    """Least-squares slope of ``log(radial mean |u|)`` against radius over ``window``.

    Bins have width ``h/2`` unless ``bins`` is given.  Raises ``ValueError`` if
    fewer than 6 nonempty bins fall in the window or any of them has a
    nonpositive mean.
    """
    lat = u.lattice
    r_min, r_max = map(float, window)
    if not 0 <= r_min < r_max <= lat.extent / 2 + 1e-12:
        raise ValueError(f"window must satisfy 0 <= r_min < r_max <= L/2, got {window}")
    bins = bins or lat.n
    prof = radial_profile(u, bins, center=center)
    sel = [(r, a) for r, a, c in prof if c > 0 and r_min <= r <= r_max]
    if len(sel) < 6:
        raise ValueError(f"window {window} holds only {len(sel)} radial bins; need at least 6")
    r, a = map(np.array, zip(*sel))
    if np.any(a <= 0):
        raise ValueError("radial means must be positive inside the fit window")
    y = np.log(a)
    slope, intercept = np.polyfit(r, y, 1)
    resid = y - (slope * r + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 0.0
    rate = -float(slope)
    ok = abs(rate - reference_rate) <= DECAY_TOLERANCE * reference_rate
    return DecayFit(rate, float(intercept), (r_min, r_max), float(r2), float(reference_rate), bool(ok), len(sel))


def center_of_mass(u: Field) -> np.ndarray:
    """Circular mean position of ``|u|`` along each axis."""
    lat = u.lattice
    a = np.abs(u.values)
    phase = 2 * np.pi / lat.extent
    out = []
    for x in lat.coordinates:
        z = np.sum(a * np.exp(1j * phase * x))
        out.append(np.angle(z) / phase if abs(z) > 0 else 0.0)
    return np.array(out)


def recenter(u: Field, center=None) -> Field:
    """Spectrally translate ``u`` so ``center`` (default: centre of mass) moves to the origin."""
    lat = u.lattice
    c = center_of_mass(u) if center is None else np.asarray(center, dtype=float)
    if not np.any(c):
        return u
    U = rfft(u)
    ks = [lat.wavenumbers] * (lat.dim - 1) + [2 * np.pi * np.fft.rfftfreq(lat.n, d=1.0 / lat.n) / lat.extent]
    grids = np.meshgrid(*ks, indexing="ij", sparse=True)
    phase = sum(k * ci for k, ci in zip(grids, c))
    return Field(lat, irfft(U * np.exp(1j * phase), lat))


def _group_elements(dim):
    for perm in itertools.permutations(range(dim)):
        for flips in itertools.product((False, True), repeat=dim):
            if perm == tuple(range(dim)) and not any(flips):
                continue
            yield perm, flips


def _apply(v: np.ndarray, perm, flips) -> np.ndarray:
    w = np.transpose(v, perm)
    for ax, f in enumerate(flips):
        if f:
            # reflection about index n/2
            w = np.roll(np.flip(w, axis=ax), 1, axis=ax)
    return w


def symmetry_deviation(u: Field, recentre: bool = True) -> float:
    """Max over axis permutations and reflections of ``|u - u o R|_2 / |u|_2``."""
    norm = lp_norm(u, 2)
    if norm == 0:
        raise ValueError("symmetry deviation of the zero field is undefined")
    v = recenter(u).values if recentre else u.values
    h = u.lattice.cell_volume
    worst = 0.0
    for perm, flips in _group_elements(u.lattice.dim):
        d = v - _apply(v, perm, flips)
        worst = max(worst, float(np.sqrt(h * np.vdot(d, d))) / norm)
    return worst


@dataclass
class MarginReport:
    margin: float
    E_inf: float
    energy: float
    below_threshold: bool
    consistency_failure: bool
    note: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def compare_to_limit(report, E_inf, limit_spec=None) -> MarginReport:
    """Margin ``E_inf - I(u*)`` of a solve against the limit-problem level.

    ``E_inf`` may be a float or the limit problem's ``SolveReport``; pass
    ``limit_spec`` (or a report) to have the discretisations checked for
    equality.  A nonpositive margin is flagged as a consistency failure when
    the potential satisfies the approach-from-below condition and is not
    identically ``V_inf``.
    """
    spec = report.spec
    if hasattr(E_inf, "energy") and hasattr(E_inf, "spec"):
        limit_spec = E_inf.spec
        E_inf = E_inf.energy
    if limit_spec is not None and limit_spec.discretization_key() != spec.discretization_key():
        raise ValueError("limit level was computed on a different discretisation")
    margin = float(E_inf) - report.energy
    trivial = spec.is_constant_potential and spec.v_inf is not None and spec.potential == spec.v_inf
    v2_ok = spec.v2 is not None and spec.check_hypotheses().v2_ok
    failure = margin <= 0 and v2_ok and not trivial
    note = ""
    if trivial:
        note = "potential is identically V_inf; margin should vanish"
    elif not v2_ok:
        note = "potential does not satisfy V2; margin reported only"
    return MarginReport(margin, float(E_inf), report.energy, margin > 0, bool(failure), note)
