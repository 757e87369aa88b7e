import numpy as np
import pytest

from conftest import gaussian_bump, random_field
from prhartree import Gaussian, Lattice, Newton, ProblemSpec, SolveConfig, Yukawa, energy, nehari_scale, project_to_nehari
from prhartree.functional import DegenerateFieldError, RayCoefficients, hartree_term, ray_coefficients
from prhartree.nehari import _scale_from, limit_level, limit_report, nehari_energy

LAT = Lattice(3, 16, 8.0)


@pytest.fixture
def spec():
    return ProblemSpec(LAT, 1.0, 2.0, 1.0, Yukawa(1.0))


def test_scale_formula():
    assert _scale_from(RayCoefficients(3.0, 3.0), 2.5) == 1.0
    assert _scale_from(RayCoefficients(16.0, 1.0), 2.0) == pytest.approx(4.0)
    with pytest.raises(DegenerateFieldError):
        _scale_from(RayCoefficients(1.0, 0.0), 2.0)


@pytest.mark.parametrize("theta", [2.0, 2.5])
def test_projection_lands_on_manifold(theta, rng):
    spec = ProblemSpec(LAT, 1.0, theta, 1.0, Yukawa(1.0))
    for _ in range(5):
        u = random_field(LAT, rng)
        st = project_to_nehari(spec, u)
        c = ray_coefficients(spec, st.field)
        assert abs(c.A - c.B) / max(c.A, c.B) < 1e-10
        assert st.relative_residual < 1e-10
        e = energy(spec, st.field)
        assert e == pytest.approx((theta - 1) / (2 * theta) * hartree_term(spec, st.field), rel=1e-10)
        assert e == pytest.approx(nehari_energy(ray_coefficients(spec, u), theta), rel=1e-10)


def test_ray_maximum(spec, rng):
    u = random_field(LAT, rng)
    t = nehari_scale(spec, u)
    peak = energy(spec, u * t)
    assert peak >= energy(spec, u * 0.9 * t) and peak >= energy(spec, u * 1.1 * t)
    ts = np.linspace(0.2, 2.0, 10) * t
    vals = [energy(spec, u * s) for s in ts]
    below = [v for s, v in zip(ts, vals) if s < t]
    above = [v for s, v in zip(ts, vals) if s > t]
    assert np.all(np.diff(below) > 0) and np.all(np.diff(above) < 0)


def test_ray_invariance(spec):
    u = gaussian_bump(LAT, 1.3)
    a = project_to_nehari(spec, u).field
    b = project_to_nehari(spec, u * 3.0).field
    np.testing.assert_allclose(a.values, b.values, atol=1e-12)
    on = project_to_nehari(spec, a)
    assert on.t_scale == pytest.approx(1.0, abs=1e-12)


def test_newton_negative_hartree_is_reported():
    # mean-zero Newton kernel: a constant field has D = 0
    spec = ProblemSpec(LAT, 1.0, 2.0, 1.0, Newton(1.0))
    with pytest.raises(DegenerateFieldError):
        nehari_scale(spec, LAT.zeros() + 1.0)


def test_limit_level_positive_and_consistent():
    lat = Lattice(3, 16, 10.0)
    spec = ProblemSpec(lat, 1.0, 2.0, 1.0, Gaussian(1.0, 1.0))
    rep = limit_report(1.0, spec, SolveConfig(grad_tol=1e-9))
    assert rep.energy > 0
    on_manifold = 0.25 * hartree_term(rep.spec, rep.field)
    assert on_manifold == pytest.approx(rep.energy, rel=1e-8)
    with pytest.raises(ValueError):
        limit_level(-1.0, spec)


def test_limit_level_monotone():
    lat = Lattice(3, 16, 10.0)
    spec = ProblemSpec(lat, 1.0, 2.0, 1.0, Yukawa(1.0))
    levels = [limit_level(a, spec) for a in (-0.5, 0.5, 1.0)]
    assert levels[0] < levels[1] < levels[2]
