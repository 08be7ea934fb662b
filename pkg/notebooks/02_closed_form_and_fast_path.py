# %% [markdown]
# # Closed form for constant returns with uniform weights
#
# Under constant returns and one weight for all inputs and another for all
# outputs, the quadratic step follows from the linear one, and both scores
# equal the classical input-oriented radial score.

# %%
import numpy as np

from deaorient import Orientation, ReturnsToScale, Technology, beta_q_from_beta_l, solve_lo, solve_qo

rng = np.random.default_rng(3)
tech = Technology(rng.uniform(0.5, 5, (2, 6)), rng.uniform(0.5, 5, (2, 6)), rts=ReturnsToScale.parse("crs"))
d = Orientation.uniform(2, 2, 0.8, 0.3)

# %%
for j in range(tech.n):
    bl = solve_lo(tech, j, d).beta
    slow = solve_qo(tech, j, d, method="bisection")
    fast = solve_qo(tech, j, d, method="fast")
    print(j, f"{beta_q_from_beta_l(bl, 0.8, 0.3):.10f}", f"{slow.beta:.10f}", f"{fast.beta:.10f}",
          f"rho {slow.rho:.6f} {fast.rho:.6f}")

# %% [markdown]
# `method="auto"` takes the closed form when it applies and checks it against
# the search when `cross_check=True`.

# %%
ev = solve_qo(tech, 2, d, cross_check=True)
print(ev.method, ev.notes)
