# %% [markdown]
# # Checking the solvers with exact arithmetic
#
# For small instances the feasibility of each fixed-step system can be decided
# with rational Fourier-Motzkin elimination, independent of the simplex code.

# %%
from deaorient import Orientation, brute_beta, fm_feasible, feasible, monotonicity_scan, solve_lo, solve_qo, five_unit_example
from deaorient.qo import fixed_beta_lp

tech = five_unit_example()
d = Orientation.uniform(2, 2)
b = tech.activity("B")

# %%
for model, solve in (("lo", solve_lo), ("qo", solve_qo)):
    exact = brute_beta(tech, b, d, model)
    print(model, float(exact), solve(tech, "B", d).beta)

# %% [markdown]
# Both feasibility deciders agree on either side of the quadratic optimum.

# %%
best = solve_qo(tech, "B", d).beta
for step in (best - 1e-6, best + 1e-6):
    p = fixed_beta_lp(tech, b, d, step)
    print(f"{step:.8f}", feasible(p), fm_feasible(p.A, p.relations, p.b))

# %% [markdown]
# Moving a unit towards a better one never makes its step larger. An inverted
# comparator shows the scan does catch violations.

# %%
print(len(monotonicity_scan(tech, d, "qo", samples=100, seed=0)))
print(len(monotonicity_scan(tech, d, "qo", samples=10, seed=0, invert=True)))
