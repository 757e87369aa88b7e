"""A potential well lowers the ground-state level below the limit level.

With V = V_inf - exp(-k|y|) approaching V_inf from below, the ground-state
energy sits strictly under E_{V_inf}, the level of the constant-potential
problem on the same grid.  The limit level itself increases with the constant.
"""

from prhartree import Lattice, ProblemSpec, SolveConfig, Yukawa, compare_to_limit, solve_ground_state, sweep
from prhartree.functional import well_potential

lat = Lattice(3, 32, 16.0)
cfg = SolveConfig(grad_tol=1e-8)

well = ProblemSpec(
    lat, m=1.0, theta=2.0, potential=well_potential(lat, 1.0, 0.5), kernel=Yukawa(1.0), v_inf=1.0, v2=(0.5, 1.0)
)
rep = solve_ground_state(well, cfg)
lim = solve_ground_state(well.limit_problem(), cfg)
margin = compare_to_limit(rep, lim)
print(f"I(u*)     {rep.energy:.6f}")
print(f"E_Vinf    {lim.energy:.6f}")
print(f"margin    {margin.margin:.6f}")

# Shallower wells close the gap.
for amp in (0.5, 0.25, 0.1):
    shallow = well.with_potential(well_potential(lat, 1.0, 0.5, amp), v_inf=1.0)
    print(f"amplitude {amp:4.2f}: margin {lim.energy - solve_ground_state(shallow, cfg).energy:.6f}")

print("\n alpha   E_alpha")
alphas = [0.25, 0.5, 1.0, 2.0]
specs = [well.limit_problem(a) for a in alphas]
for a, r in zip(alphas, sweep(specs, cfg)):
    print(f"{a:6.2f}   {r.energy:.6f}")
