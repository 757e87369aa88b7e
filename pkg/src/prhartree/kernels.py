"""Radial convolution kernels ``W`` and periodic convolution on the torus.

Every kernel is defined by its Fourier multiplier on the lattice (the continuum
transform sampled at the lattice wavenumbers).  Real-space samples, when
needed, are the inverse transform of that multiplier, so singular kernels are
never sampled at ``x = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import Field, Lattice, check_same_lattice, irfft, rfft

__all__ = [
    "KernelSpec",
    "Newton",
    "Yukawa",
    "Gaussian",
    "Constant",
    "Tabulated",
    "KernelSplit",
    "WAssumptionReport",
    "kernel_multiplier",
    "convolve",
    "implied_samples",
    "kernel_split",
    "validate_assumption_W",
    "kernel_from_dict",
    "theta_upper_bound",
]


@dataclass(frozen=True)
class KernelSpec:
    """Base class; subclasses supply the multiplier on a lattice."""

    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    kind = "abstract"

    def validate(self, dim: int) -> None:
        raise NotImplementedError

    def _multiplier(self, lattice: Lattice, k2: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def multiplier(self, lattice: Lattice, half: bool = False) -> np.ndarray:
        key = (lattice, half)
        if key not in self._cache:
            self.validate(lattice.dim)
            k2 = lattice.k_squared_half if half else lattice.k_squared
            w = np.asarray(self._multiplier(lattice, k2), dtype=float)
            w = np.broadcast_to(w, k2.shape).copy()
            w.setflags(write=False)
            self._cache[key] = w
        return self._cache[key]

    def l_r_upper(self, dim: int) -> float:
        """Supremum of ``r`` with ``W 1_{|x|<1}`` in ``L^r``."""
        return math.inf

    @property
    def vanishes_at_infinity(self) -> bool:
        return True

    def params(self) -> dict:
        return {}

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params()}


@dataclass(frozen=True)
class Newton(KernelSpec):
    """``|x|^{-lam}``.  The zero mode is set to 0 (mean-zero convention)."""

    lam: float = 1.0
    kind = "newton"

    def validate(self, dim):
        if not 0 < self.lam < min(dim, 2):
            raise ValueError(f"Newton exponent must lie in (0, min(N, 2)) = (0, {min(dim, 2)}), got {self.lam}")

    def _multiplier(self, lattice, k2):
        n, lam = lattice.dim, self.lam
        c = math.pi ** (n / 2) * 2 ** (n - lam) * math.gamma((n - lam) / 2) / math.gamma(lam / 2)
        with np.errstate(divide="ignore"):
            w = c * k2 ** ((lam - n) / 2)
        w[k2 == 0] = 0.0
        return w

    def l_r_upper(self, dim):
        return dim / self.lam

    def params(self):
        return {"lam": self.lam}


@dataclass(frozen=True)
class Yukawa(KernelSpec):
    """``exp(-mu |x|) / |x|`` (dimensions 2 and 3)."""

    mu: float = 1.0
    kind = "yukawa"

    def validate(self, dim):
        if not self.mu > 0:
            raise ValueError(f"Yukawa screening must be positive, got {self.mu}")
        if dim == 1:
            raise ValueError("Yukawa kernel is not locally integrable in dimension 1")

    def _multiplier(self, lattice, k2):
        if lattice.dim == 3:
            return 4 * math.pi / (self.mu**2 + k2)
        return 2 * math.pi / np.sqrt(self.mu**2 + k2)

    def l_r_upper(self, dim):
        return float(dim)

    def params(self):
        return {"mu": self.mu}


@dataclass(frozen=True)
class Gaussian(KernelSpec):
    """``amplitude * exp(-|x|^2 / (2 width^2))``."""

    width: float = 1.0
    amplitude: float = 1.0
    kind = "gaussian"

    def validate(self, dim):
        if not (self.width > 0 and self.amplitude > 0):
            raise ValueError("Gaussian width and amplitude must be positive")

    def _multiplier(self, lattice, k2):
        s = self.width
        return self.amplitude * (2 * math.pi * s * s) ** (lattice.dim / 2) * np.exp(-0.5 * s * s * k2)

    def params(self):
        return {"width": self.width, "amplitude": self.amplitude}


@dataclass(frozen=True)
class Constant(KernelSpec):
    """``W = value`` everywhere (a pure ``L^inf`` kernel; does not decay)."""

    value: float = 1.0
    kind = "constant"

    def validate(self, dim):
        if not self.value >= 0:
            raise ValueError(f"constant kernel must be nonnegative, got {self.value}")

    def _multiplier(self, lattice, k2):
        w = np.zeros(k2.shape)
        w[(0,) * lattice.dim] = self.value * lattice.volume
        return w

    @property
    def vanishes_at_infinity(self):
        return self.value == 0

    def params(self):
        return {"value": self.value}


@dataclass(frozen=True)
class Tabulated(KernelSpec):
    """Real-space samples of ``W`` on a lattice, origin at index ``n/2``."""

    samples: Field = None
    kind = "tabulated"

    def validate(self, dim):
        if self.samples is None:
            raise ValueError("tabulated kernel needs samples")
        if self.samples.lattice.dim != dim:
            raise ValueError("tabulated kernel dimension does not match the lattice")
        v = self.samples.values
        if v.min() < 0:
            raise ValueError("tabulated kernel must be nonnegative")
        dev = _lattice_symmetry_deviation(v)
        if dev >= 1e-8:
            raise ValueError(f"tabulated kernel is not radially symmetric (deviation {dev:.2e})")

    def _multiplier(self, lattice, k2):
        if lattice != self.samples.lattice:
            raise ValueError("tabulated kernel lives on a different lattice")
        shifted = np.fft.ifftshift(self.samples.values)
        half = k2.shape[-1] != lattice.n
        w = (np.fft.rfftn(shifted) if half else np.fft.fftn(shifted)).real * lattice.cell_volume
        scale = max(np.abs(w).max(), np.finfo(float).tiny)
        if w.min() < -1e-10 * scale:
            raise ValueError("tabulated kernel has a negative Fourier multiplier")
        return np.maximum(w, 0.0)

    def params(self):
        return {}


def _lattice_symmetry_deviation(v: np.ndarray) -> float:
    """Relative deviation under reflections and axis swaps about index ``n/2``."""
    norm = np.linalg.norm(v)
    if norm == 0:
        return 0.0
    worst = 0.0
    for ax in range(v.ndim):
        refl = np.roll(np.flip(v, axis=ax), 1, axis=ax)
        worst = max(worst, np.linalg.norm(v - refl) / norm)
    for a in range(v.ndim):
        for b in range(a + 1, v.ndim):
            worst = max(worst, np.linalg.norm(v - np.swapaxes(v, a, b)) / norm)
    return float(worst)


def kernel_multiplier(spec: KernelSpec, lattice: Lattice) -> np.ndarray:
    return spec.multiplier(lattice)


def convolve(spec: KernelSpec, f: Field) -> Field:
    """Periodic convolution ``W * f``."""
    lat = f.lattice
    w = spec.multiplier(lat, half=True)
    return Field(lat, irfft(w * rfft(f), lat))


def implied_samples(spec: KernelSpec, lattice: Lattice) -> Field:
    """Real-space kernel on the lattice, origin at index ``n/2``."""
    w = spec.multiplier(lattice, half=True)
    vals = np.fft.irfftn(w, s=lattice.shape, axes=tuple(range(lattice.dim))) / lattice.cell_volume
    return Field(lattice, np.fft.fftshift(vals))


@dataclass
class KernelSplit:
    """``W = W1 + W2`` with ``W1`` supported in ``|x| < radius``."""

    r: float
    radius: float
    w1: Field
    w2: Field
    w1_norm_r: float
    w2_sup: float


def kernel_split(spec: KernelSpec, lattice: Lattice, r: float = 2.0, radius: float = 1.0) -> KernelSplit:
    """Split the lattice kernel at ``radius`` and take discrete norms.

    Norms use absolute values of the implied samples, so the discrete Young
    bound holds even where band-limiting makes the samples slightly negative.
    """
    from .lattice import lp_norm

    if not r >= 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if isinstance(spec, Tabulated):
        w = spec.samples
    else:
        w = implied_samples(spec, lattice)
    inner = lattice.radius < radius
    w1 = Field(lattice, np.where(inner, w.values, 0.0))
    w2 = Field(lattice, np.where(inner, 0.0, w.values))
    return KernelSplit(r, radius, w1, w2, lp_norm(w1, r), lp_norm(w2, np.inf))


def theta_upper_bound(dim: int) -> float:
    return math.inf if dim == 1 else 2 * dim / (dim - 1)


@dataclass
class WAssumptionReport:
    theta: float
    dim: int
    theta_admissible: bool
    theta_range: tuple
    r_lower: float
    r_upper: float
    r_admissible: bool
    decays_at_infinity: bool
    dim_in_theory_range: bool
    override: bool = False
    messages: list = field(default_factory=list)

    @property
    def admissible(self) -> bool:
        return self.theta_admissible and self.r_admissible

    @property
    def accepted(self) -> bool:
        return self.admissible or self.override

    @property
    def r_admissible_range(self) -> tuple:
        return (self.r_lower, self.r_upper)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "dim": self.dim,
            "theta_admissible": self.theta_admissible,
            "theta_range": [self.theta_range[0], _json_float(self.theta_range[1])],
            "r_admissible_range": [self.r_lower, _json_float(self.r_upper)],
            "r_admissible": self.r_admissible,
            "decays_at_infinity": self.decays_at_infinity,
            "dim_in_theory_range": self.dim_in_theory_range,
            "override": self.override,
            "messages": list(self.messages),
        }


def _json_float(x):
    return None if math.isinf(x) else x


def validate_assumption_W(spec: KernelSpec, theta: float, dim: int, override: bool = False) -> WAssumptionReport:
    """Check ``2 <= theta < 2N/(N-1)`` and the ``L^r + L^inf`` split of ``W``.

    ``W1 = W 1_{|x|<1}`` must lie in ``L^r`` for some
    ``r > max(1, N / (N (2 - theta) + theta))``.
    """
    if theta < 2:
        raise ValueError(f"theta must be >= 2, got {theta}")
    top = theta_upper_bound(dim)
    theta_ok = theta < top
    msgs = []
    if not theta_ok:
        msgs.append(f"theta = {theta} outside the admissible range [2, {top:g}) for N = {dim}")
    denom = dim * (2 - theta) + theta
    r_lo = max(1.0, dim / denom) if denom > 0 else math.inf
    r_hi = spec.l_r_upper(dim)
    r_ok = r_lo < r_hi
    if not r_ok:
        msgs.append(f"no admissible r: need r > {r_lo:g} but W 1_(|x|<1) is in L^r only for r < {r_hi:g}")
    if dim < 3:
        msgs.append(f"N = {dim} is outside the N >= 3 setting; results are exploratory")
    if not spec.vanishes_at_infinity:
        msgs.append("kernel does not vanish at infinity")
    return WAssumptionReport(
        theta=theta,
        dim=dim,
        theta_admissible=theta_ok,
        theta_range=(2.0, top),
        r_lower=r_lo,
        r_upper=r_hi,
        r_admissible=r_ok,
        decays_at_infinity=spec.vanishes_at_infinity,
        dim_in_theory_range=dim >= 3,
        override=override,
        messages=msgs,
    )


_KINDS = {
    "newton": (Newton, ("lam",)),
    "yukawa": (Yukawa, ("mu",)),
    "gaussian": (Gaussian, ("width", "amplitude")),
    "constant": (Constant, ("value",)),
}


def kernel_from_dict(d: dict, lattice: Lattice | None = None, load_field=None) -> KernelSpec:
    """Build a kernel from ``{"kind": ..., <params>}``.

    Raises ``KeyError`` naming the missing parameter and ``ValueError`` for
    unknown kinds.
    """
    kind = str(d.get("kind", "")).lower()
    if kind == "tabulated":
        if "path" not in d:
            raise KeyError("path")
        samples = load_field(d["path"])
        if lattice is not None and samples.lattice != lattice:
            raise ValueError("tabulated kernel lattice does not match the problem lattice")
        return Tabulated(samples=samples)
    if kind not in _KINDS:
        raise ValueError(f"unknown kernel kind {d.get('kind')!r}; expected one of {sorted(_KINDS) + ['tabulated']}")
    cls, names = _KINDS[kind]
    params = {}
    for name in names:
        if name not in d:
            if name == "amplitude":
                continue
            raise KeyError(name)
        params[name] = float(d[name])
    unknown = set(d) - set(names) - {"kind"}
    if unknown:
        raise ValueError(f"unexpected kernel parameters {sorted(unknown)}")
    return cls(**params)
