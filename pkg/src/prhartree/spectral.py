"""The massive half-Laplacian ``sqrt(-Delta + m^2)`` as a Fourier multiplier."""

from __future__ import annotations

import numpy as np

from .lattice import Field, Lattice, irfft, rfft

__all__ = [
    "multiplier",
    "apply_sqrt_op",
    "apply_helmholtz",
    "quadratic_form",
    "bilinear_form",
    "precondition",
]


def _check_mass(m):
    if not m > 0:
        raise ValueError(f"mass must be positive, got {m}")


def multiplier(lattice: Lattice, m: float, half: bool = False) -> np.ndarray:
    """``sqrt(m^2 + |k|^2)`` on the spectral grid (full layout unless ``half``)."""
    _check_mass(m)
    k2 = lattice.k_squared_half if half else lattice.k_squared
    return np.sqrt(m * m + k2)


def apply_sqrt_op(f: Field, m: float) -> Field:
    rho = multiplier(f.lattice, m, half=True)
    return Field(f.lattice, irfft(rho * rfft(f), f.lattice))


def apply_helmholtz(f: Field, m: float) -> Field:
    """``(-Delta + m^2) f`` via the multiplier ``m^2 + |k|^2``."""
    _check_mass(m)
    lat = f.lattice
    return Field(lat, irfft((m * m + lat.k_squared_half) * rfft(f), lat))


def bilinear_form(f: Field, g: Field, m: float) -> float:
    """``L^{-N} sum_k sqrt(m^2+|k|^2) Re(F(k) conj G(k))``."""
    lat = f.lattice
    rho = multiplier(lat, m, half=True)
    F, G = rfft(f), rfft(g)
    return float(np.sum(lat.half_weights * rho * (F * G.conj()).real) / lat.volume)


def quadratic_form(f: Field, m: float) -> float:
    """``<f, sqrt(-Delta+m^2) f>`` evaluated as a spectral sum."""
    return bilinear_form(f, f, m)


def precondition(g: Field, m: float, shift: float = 1.0) -> Field:
    """Divide by ``sqrt(m^2+|k|^2) + shift`` in frequency space."""
    if not shift >= 0:
        raise ValueError(f"preconditioner shift must be >= 0, got {shift}")
    lat = g.lattice
    rho = multiplier(lat, m, half=True)
    return Field(lat, irfft(rfft(g) / (rho + shift), lat))
