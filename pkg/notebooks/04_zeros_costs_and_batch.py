# %% [markdown]
# # Zeros in the data, cost-based orientations and batch runs

# %%
import numpy as np

from deaorient import (
    CostGradient,
    RunConfig,
    Technology,
    emit_bars,
    evaluate_dmus,
    orientation_from_cost_gradient,
    preprocess_zeros,
    solve_qo,
    five_unit_example,
)
from deaorient.batch import bars_table, report_table

# %% [markdown]
# A zero output can be treated as a potential output (replaced by a small
# positive value) or as impossible (kept at zero and left out of the score).

# %%
X = np.array([[2.0, 3.0, 4.0, 2.5]])
Y = np.array([[1.0, 0.0, 3.0, 2.0], [2.0, 1.0, 1.0, 2.0]])
tech = Technology(X, Y, names=["P", "Q", "R", "S"])
for policy in ("potential", "impossible"):
    adjusted, log = preprocess_zeros(tech, policy)
    print(policy, adjusted.Y[0], log.entries())

# %% [markdown]
# Orientation from marginal costs: cheap variables get larger weights.

# %%
cg = CostGradient.all_controllable([2.0, 1.0, 4.0, 1.0], n_inputs=2)
for how in ("count", "inf_norm"):
    d, mult = orientation_from_cost_gradient(cg, how)
    ev = solve_qo(five_unit_example(), "C", d)
    print(how, d, f"beta={ev.beta:.4f}", f"cost~{ev.beta * mult:.4f}")

# %% [markdown]
# The batch layer used by the command line.

# %%
run = evaluate_dmus(five_unit_example(), RunConfig(model="both"))
print(report_table(run, 3))
for row in emit_bars(solve_qo(five_unit_example(), "B", RunConfig().orientation_for(five_unit_example()))):
    print(row)
print(bars_table(run, 3))
