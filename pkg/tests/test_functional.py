import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gaussian_bump, random_field
from prhartree import Constant, Field, Gaussian, Lattice, Newton, ProblemSpec, Yukawa, energy, gradient
from prhartree.functional import (
    DegenerateFieldError,
    hartree_term,
    hls_bound_check,
    ray_coefficients,
    ray_energy,
    well_potential,
)
from prhartree.kernels import Tabulated, implied_samples, kernel_split

LAT = Lattice(3, 16, 8.0)
KERNELS = [Yukawa(1.0), Newton(1.0), Gaussian(0.7, 1.0), Constant(0.05)]


def spec_for(kernel, theta, potential=1.0, lat=LAT):
    return ProblemSpec(lat, 1.0, theta, potential, kernel, override_hypotheses=True)


def fd_check(spec, u, h, eps=1e-4):
    scale = eps / np.abs(h.values).max() * np.abs(u.values).max()
    fd = (energy(spec, u + scale * h) - energy(spec, u - scale * h)) / (2 * scale)
    an = gradient(spec, u).inner(h)
    return abs(fd - an) / abs(an)


@pytest.mark.parametrize("theta", [2.0, 2.5])
@pytest.mark.parametrize("kernel", KERNELS, ids=lambda k: k.kind)
def test_gradient_matches_finite_differences(kernel, theta, rng):
    pot = well_potential(LAT, 1.0, 0.5)
    spec = spec_for(kernel, theta, pot)
    for _ in range(3):
        u = random_field(LAT, rng) + gaussian_bump(LAT)
        h = random_field(LAT, rng)
        assert fd_check(spec, u, h) < 1e-6


def test_constant_field_closed_form():
    lat = Lattice(3, 8, 4.0)
    c, alpha, w, theta, m = 0.6, 0.3, 0.02, 2.5, 1.4
    spec = ProblemSpec(lat, m, theta, alpha, Constant(w), override_hypotheses=True)
    u = lat.zeros() + c
    vol = lat.volume
    ref = 0.5 * (m + alpha) * c * c * vol - w * c ** (2 * theta) * vol**2 / (2 * theta)
    assert energy(spec, u) == pytest.approx(ref, rel=1e-13)
    assert hartree_term(spec, u) == pytest.approx(w * c ** (2 * theta) * vol**2, rel=1e-13)
    g = gradient(spec, u)
    np.testing.assert_allclose(g.values, (m + alpha) * c - w * vol * c ** (2 * theta - 1), rtol=1e-12)


@settings(max_examples=20, deadline=None)
@given(t=st.floats(0.05, 5.0), theta=st.sampled_from([2.0, 2.3, 2.9]))
def test_ray_polynomial(t, theta):
    spec = spec_for(Yukawa(1.0), theta)
    u = gaussian_bump(LAT, 1.2) + 0.1 * Field(LAT, np.cos(LAT.coordinates[0]))
    c = ray_coefficients(spec, u)
    assert energy(spec, u * t) == pytest.approx(float(ray_energy(c, t, theta)), rel=1e-10, abs=1e-12)


def test_hartree_homogeneity(rng):
    spec = spec_for(Gaussian(1.0), 2.4)
    u = random_field(LAT, rng)
    assert hartree_term(spec, u * 1.7) == pytest.approx(1.7 ** (2 * 2.4) * hartree_term(spec, u), rel=1e-12)
    # D depends on |u| only
    assert hartree_term(spec, -u) == pytest.approx(hartree_term(spec, u), rel=1e-14)


def test_coercivity(rng):
    pot = well_potential(LAT, 1.0, 0.5)
    spec = spec_for(Yukawa(1.0), 2.0, pot)
    u = random_field(LAT, rng, smooth=False)
    A = ray_coefficients(spec, u).A
    assert A >= (spec.m - spec.v0) * u.inner(u)


def test_zero_field_rejected():
    with pytest.raises(DegenerateFieldError):
        ray_coefficients(spec_for(Yukawa(1.0), 2.0), LAT.zeros())


def test_problem_spec_defaults_and_errors():
    spec = ProblemSpec(LAT, 1.0, 2.0, 0.7, Yukawa(1.0))
    assert spec.is_constant_potential and spec.v_inf == 0.7 and spec.v0 == 0.5
    well = ProblemSpec(LAT, 1.0, 2.0, well_potential(LAT, 1.0, 0.5, 1.2), Yukawa(1.0))
    assert well.v0 == pytest.approx(0.2, abs=1e-12)
    with pytest.raises(ValueError):
        ProblemSpec(LAT, 0.0, 2.0, 1.0, Yukawa(1.0))
    with pytest.raises(ValueError):
        ProblemSpec(LAT, 1.0, 1.5, 1.0, Yukawa(1.0))
    with pytest.raises(ValueError):
        ProblemSpec(LAT, 1.0, 2.0, np.full(LAT.shape, np.inf), Yukawa(1.0))


def test_hypothesis_checks():
    ok = ProblemSpec(LAT, 1.0, 2.0, well_potential(LAT, 1.0, 0.5), Yukawa(1.0), v_inf=1.0, v2=(0.5, 1.0))
    rep = ok.check_hypotheses()
    assert rep.ok and rep.v2_ok and rep.v1_ok
    # V too negative for V0 < m
    deep = ProblemSpec(LAT, 1.0, 2.0, well_potential(LAT, 1.0, 0.5, 2.5), Yukawa(1.0), v_inf=1.0)
    assert not deep.check_hypotheses().v1_ok
    # k outside (0, 2m)
    fast = ProblemSpec(LAT, 1.0, 2.0, well_potential(LAT, 1.0, 2.5), Yukawa(1.0), v_inf=1.0, v2=(2.5, 1.0))
    assert fast.check_hypotheses().v2_ok is False
    bad_theta = ProblemSpec(LAT, 1.0, 3.0, 1.0, Yukawa(1.0))
    assert not bad_theta.check_hypotheses().accepted
    assert ProblemSpec(LAT, 1.0, 3.0, 1.0, Yukawa(1.0), override_hypotheses=True).check_hypotheses().accepted


@pytest.mark.parametrize("kernel", [Yukawa(1.0), Yukawa(0.5), Gaussian(0.8), Constant(0.1)], ids=lambda k: repr(k))
def test_hls_bound(kernel, rng):
    spec = spec_for(kernel, 2.0)
    for _ in range(5):
        u = random_field(LAT, rng, smooth=False)
        rep = hls_bound_check(spec, u)
        assert rep.holds, (rep.lhs, rep.rhs)
        assert rep.exponent == pytest.approx(8 / 3)


def test_hls_tabulated_needs_split(rng):
    samples = implied_samples(Gaussian(0.8), LAT)
    spec = spec_for(Tabulated(samples=samples), 2.0)
    u = random_field(LAT, rng)
    with pytest.raises(ValueError):
        hls_bound_check(spec, u)
    split = kernel_split(spec.kernel, LAT)
    assert hls_bound_check(spec, u, split=split).holds
