import numpy as np
import pytest

from prhartree import Gaussian, Lattice, ProblemSpec, SolveConfig, Yukawa, energy, gradient, solve_ground_state, sweep
from prhartree.functional import HypothesisError, well_potential
from prhartree.nehari import project_to_nehari
from prhartree.solver import DegenerateInit, NonConvergence, initial_field

LAT = Lattice(3, 16, 8.0)


@pytest.fixture(scope="module")
def solved():
    spec = ProblemSpec(LAT, 1.0, 2.0, 1.0, Yukawa(1.0))
    return solve_ground_state(spec, SolveConfig(grad_tol=1e-9))


def test_converges_to_critical_point(solved):
    assert solved.converged
    g = gradient(solved.spec, solved.field)
    assert np.linalg.norm(g.values) / np.linalg.norm(solved.field.values) < 1e-8
    assert solved.nehari_residual < 1e-10


def test_energy_trace_is_monotone(solved):
    e = np.array([t[1] for t in solved.trace])
    assert np.all(np.diff(e) <= 1e-13 * np.abs(e[1:]))
    assert solved.trace[-1][2] <= 1e-9


def test_critical_point_is_fixed(solved):
    again = solve_ground_state(solved.spec, SolveConfig(grad_tol=1e-9, init=solved.field))
    assert again.iterations == 0
    assert again.energy == solved.energy


def test_ground_state_beats_other_nehari_points(solved, rng):
    for _ in range(3):
        w = project_to_nehari(solved.spec, solved.field + 0.2 * rng.standard_normal(LAT.shape))
        assert energy(solved.spec, w.field) > solved.energy


def test_deterministic_with_seed():
    spec = ProblemSpec(LAT, 1.0, 2.0, 1.0, Yukawa(1.0))
    cfg = SolveConfig(init="random", seed=7, grad_tol=1e-8)
    a = solve_ground_state(spec, cfg)
    b = solve_ground_state(spec, cfg)
    assert a.energy == b.energy and np.array_equal(a.field.values, b.field.values)
    assert a.seed == 7


def test_random_init_depends_on_seed():
    spec = ProblemSpec(LAT, 1.0, 2.0, 1.0, Yukawa(1.0))
    a = initial_field(spec, SolveConfig(init="random", seed=1))
    b = initial_field(spec, SolveConfig(init="random", seed=2))
    assert not np.array_equal(a.values, b.values)


def test_nonconvergence_carries_report():
    spec = ProblemSpec(LAT, 1.0, 2.0, 1.0, Yukawa(1.0))
    with pytest.raises(NonConvergence) as info:
        solve_ground_state(spec, SolveConfig(max_iters=2, grad_tol=1e-12))
    rep = info.value.report
    assert rep.status == "max_iters" and rep.iterations == 2


def test_hypothesis_violation_refused():
    spec = ProblemSpec(LAT, 1.0, 3.0, 1.0, Yukawa(1.0))
    with pytest.raises(HypothesisError, match="admissible range"):
        solve_ground_state(spec)


def test_zero_init_rejected():
    spec = ProblemSpec(LAT, 1.0, 2.0, 1.0, Yukawa(1.0))
    with pytest.raises(DegenerateInit):
        solve_ground_state(spec, SolveConfig(init=LAT.zeros()))


def test_bad_config_values():
    for kw in ({"max_iters": 0}, {"grad_tol": 0}, {"backtrack_factor": 1.0}, {"init": "zeros"}):
        with pytest.raises(ValueError):
            SolveConfig(**kw)


def test_report_dict(solved):
    d = solved.to_dict("u.prhf")
    assert d["status"] == "converged" and d["field_path"] == "u.prhf"
    assert d["problem"]["kernel"] == {"kind": "yukawa", "mu": 1.0}
    assert d["diagnostics"]["dimension_flag"] is None


def test_sweep_serial_matches_parallel():
    specs = [ProblemSpec(LAT, 1.0, 2.0, a, Gaussian(1.0)) for a in (0.5, 1.0)]
    specs.append(ProblemSpec(LAT, 1.0, 3.0, 1.0, Yukawa(1.0)))
    serial = sweep(specs, SolveConfig(grad_tol=1e-8))
    parallel = sweep(specs, SolveConfig(grad_tol=1e-8), workers=2)
    assert serial[0].energy == parallel[0].energy and serial[1].energy == parallel[1].energy
    assert serial[0].energy < serial[1].energy
    assert isinstance(serial[2], HypothesisError) and isinstance(parallel[2], HypothesisError)


def test_well_potential_lowers_energy():
    pot = well_potential(LAT, 1.0, 0.5)
    well = ProblemSpec(LAT, 1.0, 2.0, pot, Yukawa(1.0), v_inf=1.0, v2=(0.5, 1.0))
    flat = ProblemSpec(LAT, 1.0, 2.0, 1.0, Yukawa(1.0))
    assert solve_ground_state(well).energy < solve_ground_state(flat).energy
