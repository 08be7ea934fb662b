# %% [markdown]
# # Linear and quadratic oriented steps on the five-unit example
#
# Two inputs, two outputs, constant returns. Unit A dominates everything; B to E
# are symmetric around it.

# %%
import numpy as np

from deaorient import Orientation, solve_lo, solve_qo, five_unit_example

tech = five_unit_example()
print(tech.names)
print(tech.X)
print(tech.Y)

# %% [markdown]
# Equal weight on every variable. The linear step for B is 1/3, the quadratic
# one is 1 - 1/sqrt(2), and both give a score of one half.

# %%
d = Orientation.uniform(tech.m, tech.s)
for name in tech.names:
    lo, qo = solve_lo(tech, name, d), solve_qo(tech, name, d)
    print(f"{name}  beta_L={lo.beta:.4f} rho_L={lo.rho:.4f}   beta_Q={qo.beta:.4f} rho_Q={qo.rho:.4f}")

# %% [markdown]
# Targets and projections. The target is where the oriented path meets the
# frontier; the projection removes the remaining slack.

# %%
ev = solve_qo(tech, "B", d)
print("target    ", ev.target)
print("projection", ev.projection)
print("theta", ev.theta, "phi", ev.phi)
print(ev.method, ev.notes)

# %% [markdown]
# A mixed orientation. With the quadratic model B and E end up tied at 0.5
# even though their linear scores differ.

# %%
mixed = Orientation(np.array([1, 0.5]), np.array([1, 0.5]))
for name in "BCDE":
    print(name, round(solve_lo(tech, name, mixed).rho, 4), round(solve_qo(tech, name, mixed).rho, 4))
