import numpy as np
import pytest

from conftest import random_field
from prhartree import Field, Lattice, apply_sqrt_op, multiplier, precondition, quadratic_form
from prhartree.spectral import apply_helmholtz, bilinear_form


def test_multiplier_values():
    lat = Lattice(1, 8, 2 * np.pi)
    rho = multiplier(lat, 3.0)
    # wavenumbers are integers on a 2 pi torus
    np.testing.assert_allclose(rho, np.sqrt(9.0 + np.fft.fftfreq(8, 1 / 8) ** 2))
    with pytest.raises(ValueError):
        multiplier(lat, 0.0)


def test_plane_wave_eigenfunction():
    lat = Lattice(2, 16, 4.0)
    x, y = lat.coordinates
    k = 2 * np.pi / 4.0 * np.array([2, 3])
    f = Field(lat, np.cos(k[0] * x + k[1] * y))
    out = apply_sqrt_op(f, 0.7)
    np.testing.assert_allclose(out.values, np.sqrt(0.49 + k @ k) * f.values, atol=1e-12)


def test_constant_gets_mass(rng):
    lat = Lattice(3, 8, 3.0)
    f = lat.zeros() + 2.5
    np.testing.assert_allclose(apply_sqrt_op(f, 1.3).values, 1.3 * 2.5, rtol=1e-13)


def test_square_root_identity(rng):
    lat = Lattice(3, 16, 8.0)
    for _ in range(3):
        f = random_field(lat, rng, smooth=False)
        twice = apply_sqrt_op(apply_sqrt_op(f, 1.0), 1.0)
        ref = apply_helmholtz(f, 1.0)
        assert np.linalg.norm((twice - ref).values) / np.linalg.norm(ref.values) < 1e-12


def test_quadratic_form_matches_inner_product(rng):
    lat = Lattice(2, 16, 5.0)
    f = random_field(lat, rng, smooth=False)
    g = random_field(lat, rng, smooth=False)
    assert quadratic_form(f, 1.2) == pytest.approx(f.inner(apply_sqrt_op(f, 1.2)), rel=1e-12)
    assert bilinear_form(f, g, 1.2) == pytest.approx(g.inner(apply_sqrt_op(f, 1.2)), rel=1e-12)
    # coercivity: Q(f) >= m |f|^2
    assert quadratic_form(f, 1.2) >= 1.2 * f.inner(f)


def test_precondition_is_inverse_shifted_operator(rng):
    lat = Lattice(2, 16, 5.0)
    g = random_field(lat, rng, smooth=False)
    p = precondition(g, 1.0, shift=0.5)
    back = apply_sqrt_op(p, 1.0) + 0.5 * p
    np.testing.assert_allclose(back.values, g.values, atol=1e-12)
    with pytest.raises(ValueError):
        precondition(g, 1.0, shift=-1.0)
