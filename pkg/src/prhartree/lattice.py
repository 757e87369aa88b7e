"""Periodic grids, real fields on them, and the Fourier transform pair.

Grid points along each axis are ``y_j = (j - n/2) * h`` for ``j = 0..n-1`` with
``h = L/n``, so the origin sits at index ``n/2``.  The transform convention is

.. math:: F(k) = h^N \\sum_j f_j e^{-i k \\cdot j h}, \\qquad
          f_j = L^{-N} \\sum_k F(k) e^{i k \\cdot j h}

which makes ``F`` approximate the continuum Fourier transform, so that operator
multipliers such as ``sqrt(m^2 + |k|^2)`` apply verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Lattice",
    "Field",
    "SpectralField",
    "make_lattice",
    "forward_transform",
    "inverse_transform",
    "lp_norm",
    "radial_profile",
]


@dataclass(frozen=True)
class Lattice:
    """Uniform periodic grid on the torus ``[-L/2, L/2)^N``."""

    dim: int
    n: int
    extent: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if int(self.n) != self.n or self.n < 4 or self.n % 2:
            raise ValueError(f"points per axis must be an even integer >= 4, got {self.n}")
        if not np.isfinite(self.extent) or self.extent <= 0:
            raise ValueError(f"extent must be positive, got {self.extent}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "extent", float(self.extent))

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n**self.dim

    @property
    def spacing(self) -> float:
        return self.extent / self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def volume(self) -> float:
        return self.extent**self.dim

    @property
    def origin_index(self) -> tuple[int, ...]:
        return (self.n // 2,) * self.dim

    @cached_property
    def axis(self) -> np.ndarray:
        """Coordinates of the grid points along one axis."""
        return (np.arange(self.n) - self.n // 2) * self.spacing

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Wavenumbers ``2*pi*j/L`` in FFT storage order, ``j`` in ``[-n/2, n/2)``."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=1.0 / self.n) / self.extent

    def mode_index(self, j: int) -> int:
        """Storage index of integer wavenumber ``j`` in ``[-n/2, n/2)``."""
        if not -self.n // 2 <= j < self.n // 2:
            raise ValueError(f"mode {j} outside [-{self.n // 2}, {self.n // 2})")
        return j % self.n

    @cached_property
    def k_squared(self) -> np.ndarray:
        """``|k|^2`` on the full (complex FFT) spectral grid."""
        return _k_squared([self.wavenumbers] * self.dim)

    @cached_property
    def k_squared_half(self) -> np.ndarray:
        """``|k|^2`` on the half spectrum used by ``rfftn``."""
        half = 2.0 * np.pi * np.fft.rfftfreq(self.n, d=1.0 / self.n) / self.extent
        return _k_squared([self.wavenumbers] * (self.dim - 1) + [half])

    @cached_property
    def half_weights(self) -> np.ndarray:
        """Multiplicity of each ``rfftn`` coefficient in the full spectrum."""
        w = np.full(self.n // 2 + 1, 2.0)
        w[0] = w[-1] = 1.0
        return np.broadcast_to(w, self.k_squared_half.shape)

    @cached_property
    def coordinates(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.axis] * self.dim), indexing="ij"))

    def distance(self, center=None) -> np.ndarray:
        """Minimum-image distance of every grid point to ``center`` (default origin).

        A scalar ``center`` is used on every axis.
        """
        center = np.zeros(self.dim) if center is None else np.asarray(center, dtype=float)
        center = np.broadcast_to(center, (self.dim,))
        sq = np.zeros(self.shape)
        for c, x in zip(center, self.coordinates):
            d = x - c
            d -= self.extent * np.round(d / self.extent)
            sq += d * d
        return np.sqrt(sq)

    @cached_property
    def radius(self) -> np.ndarray:
        return self.distance()

    def zeros(self) -> "Field":
        return Field(self, np.zeros(self.shape))

    def field(self, values) -> "Field":
        return Field(self, values)


def _k_squared(axes) -> np.ndarray:
    grids = np.meshgrid(*axes, indexing="ij", sparse=True)
    return sum(g * g for g in grids)


def make_lattice(dim: int, n: int, extent: float) -> Lattice:
    return Lattice(dim, n, extent)


class Field:
    """Real samples of a function on a :class:`Lattice`.

    Values are stored as an ``n x ... x n`` array (row-major over the axes).
    Fields behave as immutable values: arithmetic returns new fields.
    """

    __slots__ = ("lattice", "values")

    def __init__(self, lattice: Lattice, values):
        values = np.asarray(values, dtype=float)
        if values.shape != lattice.shape:
            if values.size != lattice.size:
                raise ValueError(
                    f"field has {values.size} values, lattice needs {lattice.size}"
                )
            values = values.reshape(lattice.shape)
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        self.lattice = lattice
        self.values = values

    def __repr__(self):
        return f"Field({self.lattice!r}, max|u|={np.max(np.abs(self.values)):.3g})"

    def _other(self, other):
        if isinstance(other, Field):
            check_same_lattice(self, other)
            return other.values
        return other

    def __add__(self, other):
        return Field(self.lattice, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Field(self.lattice, self.values - self._other(other))

    def __rsub__(self, other):
        return Field(self.lattice, self._other(other) - self.values)

    def __mul__(self, other):
        return Field(self.lattice, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Field(self.lattice, self.values / self._other(other))

    def __neg__(self):
        return Field(self.lattice, -self.values)

    def __abs__(self):
        return Field(self.lattice, np.abs(self.values))

    def copy(self) -> "Field":
        return Field(self.lattice, self.values.copy())

    def inner(self, other: "Field") -> float:
        """Quadrature inner product ``h^N * sum(f * g)``."""
        return float(self.lattice.cell_volume * np.vdot(self.values, self._other(other)))

    def max(self) -> float:
        return float(self.values.max())

    def min(self) -> float:
        return float(self.values.min())


def check_same_lattice(a, b):
    if a.lattice != b.lattice:
        raise ValueError(f"lattice mismatch: {a.lattice} vs {b.lattice}")


@dataclass(frozen=True)
class SpectralField:
    """Conjugate-symmetric Fourier coefficients of a real field (full layout)."""

    lattice: Lattice
    coefficients: np.ndarray


def forward_transform(f: Field) -> SpectralField:
    lat = f.lattice
    return SpectralField(lat, np.fft.fftn(f.values) * lat.cell_volume)


def inverse_transform(F: SpectralField, lattice: Lattice | None = None) -> Field:
    lat = F.lattice
    if lattice is not None and lattice != lat:
        raise ValueError(f"lattice mismatch: {lattice} vs {lat}")
    values = np.fft.ifftn(F.coefficients) / lat.cell_volume
    scale = np.max(np.abs(values)) if values.size else 0.0
    if np.max(np.abs(values.imag), initial=0.0) > 1e-10 * max(scale, np.finfo(float).tiny):
        raise ValueError("coefficients do not represent a real field")
    return Field(lat, values.real)


def rfft(f: Field | np.ndarray, lattice: Lattice | None = None) -> np.ndarray:
    """Half-spectrum transform with the same normalisation as :func:`forward_transform`."""
    if isinstance(f, Field):
        lattice, f = f.lattice, f.values
    return np.fft.rfftn(f) * lattice.cell_volume


def irfft(F: np.ndarray, lattice: Lattice) -> np.ndarray:
    return np.fft.irfftn(F, s=lattice.shape, axes=tuple(range(lattice.dim))) / lattice.cell_volume


def lp_norm(f: Field, p: float = 2.0) -> float:
    """Discrete ``L^p`` norm ``(h^N * sum|f|^p)^(1/p)``; ``p = inf`` gives the max norm."""
    if p == np.inf:
        return float(np.max(np.abs(f.values)))
    if not p >= 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    a = np.abs(f.values)
    scale = a.max()
    if scale == 0.0:
        return 0.0
    # scaled to keep large p from overflowing
    return float(scale * (f.lattice.cell_volume * np.sum((a / scale) ** p)) ** (1.0 / p))


def radial_profile(f: Field, bins: int, center=None):
    """Bin ``|f|`` by torus distance to ``center`` over ``[0, L/2]``.

    Returns a list of ``(radius, mean |f|, count)`` with one entry per bin.  The
    radius is the mean distance of the samples in the bin (the bin midpoint for
    empty bins, whose mean is ``nan``).  Points farther than ``L/2`` are dropped.
    """
    if bins < 2:
        raise ValueError(f"need at least 2 bins, got {bins}")
    lat = f.lattice
    r = lat.radius if center is None else lat.distance(center)
    r_max = lat.extent / 2
    inside = r <= r_max * (1 + 1e-12)
    r = r[inside]
    a = np.abs(f.values)[inside]
    idx = np.minimum((r / r_max * bins).astype(int), bins - 1)
    count = np.bincount(idx, minlength=bins)
    rsum = np.bincount(idx, weights=r, minlength=bins)
    asum = np.bincount(idx, weights=a, minlength=bins)
    edges = np.linspace(0.0, r_max, bins + 1)
    out = []
    for b in range(bins):
        if count[b]:
            out.append((rsum[b] / count[b], asum[b] / count[b], int(count[b])))
        else:
            out.append((0.5 * (edges[b] + edges[b + 1]), float("nan"), 0))
    return out
