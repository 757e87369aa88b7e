import numpy as np
import pytest

from conftest import gaussian_bump, random_field
from prhartree import Lattice, ProblemSpec, SlabGrid, Yukawa, dtn_apply, energy, extension_energy, harmonic_extension
from prhartree.extension import SlabField, extension_form_energy, trace_inequality_check, validate_operator
from prhartree.spectral import apply_helmholtz, apply_sqrt_op, quadratic_form

LAT = Lattice(2, 16, 8.0)


def test_slab_grid_checks():
    with pytest.raises(ValueError):
        SlabGrid(LAT, 0.0, 32)
    with pytest.raises(ValueError):
        SlabGrid(LAT, 4.0, 4)
    s = SlabGrid(LAT, 4.0, 32)
    assert s.shape == (33, 16, 16) and s.trapezoid_weights().sum() == pytest.approx(4.0)


def test_extension_has_the_trace_and_solves_the_difference_equation(rng):
    g = random_field(LAT, rng)
    slab = SlabGrid(LAT, 6.0, 64)
    v = harmonic_extension(g, 1.0, slab)
    np.testing.assert_allclose(v.trace().values, g.values, atol=1e-13)
    # interior rows: (v_{i-1} - 2 v_i + v_{i+1}) / dx^2 = (-Delta_y + m^2) v_i
    h = slab.dx
    i = 10
    lap_x = (v.values[i - 1] - 2 * v.values[i] + v.values[i + 1]) / h**2
    rhs = apply_helmholtz(v.layer(i), 1.0).values
    np.testing.assert_allclose(lap_x, rhs, atol=1e-10 * np.abs(rhs).max())


def test_single_mode_profile_decays_like_exponential():
    x = LAT.coordinates[0]
    k = 2 * np.pi / LAT.extent * 2
    g = LAT.field(np.cos(k * x))
    slab = SlabGrid(LAT, 4.0, 512)
    v = harmonic_extension(g, 1.0, slab)
    rho = np.sqrt(1.0 + k * k)
    amp = v.values[:, 0, 0]
    np.testing.assert_allclose(amp, np.exp(-rho * slab.x), atol=2e-4)


def test_dtn_second_order(rng):
    g = random_field(LAT, rng, smooth=False)
    exact = apply_sqrt_op(g, 1.0)
    errs = []
    for M in (32, 64, 128):
        d = dtn_apply(g, 1.0, SlabGrid(LAT, 8.0, M))
        errs.append(np.linalg.norm((d - exact).values) / np.linalg.norm(exact.values))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - 2.0) < 0.2)


def test_energy_identity_and_minimality(rng):
    g = random_field(LAT, rng)
    slab = SlabGrid(LAT, 6.0, 48)
    v = harmonic_extension(g, 1.0, slab)
    e = extension_energy(v, 1.0)
    assert e == pytest.approx(g.inner(dtn_apply(g, 1.0, slab)), rel=1e-12)
    # close to the spectral form for a well-resolved slab
    assert e == pytest.approx(quadratic_form(g, 1.0), rel=2e-2)
    # any competitor with the same trace has larger energy
    bump = np.zeros(slab.shape)
    bump[1:-1] = rng.standard_normal((slab.layers - 1,) + LAT.shape)
    assert extension_energy(v + SlabField(slab, 0.01 * bump), 1.0) > e


def test_extension_form_energy_matches_trace_form():
    spec = ProblemSpec(LAT, 1.0, 2.0, 1.0, Yukawa(1.0), override_hypotheses=True)
    u = gaussian_bump(LAT, 1.5)
    coarse = extension_form_energy(spec, u, SlabGrid(LAT, 8.0, 64))
    fine = extension_form_energy(spec, u, SlabGrid(LAT, 8.0, 256))
    exact = energy(spec, u)
    assert abs(fine - exact) < abs(coarse - exact) / 10


@pytest.mark.parametrize("full", [True, False])
def test_trace_inequality(full, rng):
    slab = SlabGrid(LAT, 3.0, 16)
    for _ in range(5):
        v = SlabField(slab, rng.standard_normal(slab.shape))
        rep = trace_inequality_check(v, 1.0, full_gradient=full)
        assert rep.holds, rep
    with pytest.raises(ValueError):
        trace_inequality_check(v, 0.0)


def test_validate_operator_report(rng):
    rep = validate_operator(Lattice(3, 8, 16.0), 1.0, layers=(32, 64), seed=3)
    assert [lv["layers"] for lv in rep["levels"]] == [32, 64]
    assert rep["observed_orders"][0] == pytest.approx(2.0, abs=0.2)
