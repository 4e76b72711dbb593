# %% [markdown]
# # Two-dimensional problems
#
# Poisson on the unit disk uses the closed-form log kernel as the forward
# solver. Helmholtz on the unit square is interpolated across its first
# resonance sqrt(2) pi: the leading coefficient changes too fast for three
# knots, the rest are recovered closely.

# %%
import numpy as np

from egf.experiments import run_experiment

disk = run_experiment("poisson2d-disk")
for row in disk.rows:
    print(f"disk {row['method']:5} eps_test={row['test_pct']:.3f}%  kernel eps={row['eps_pct']:.2f}%")

# %%
square = run_experiment("helmholtz2d-interp")
s = square.series["helmholtz2d-interp-sigma"]
print("k  interpolated   target")
for k in range(6):
    print(f"{k + 1}  {s['interpolated'][k]:+.5f}  {s['target'][k]:+.5f}")
print("max relative error for k >= 3:", f"{np.max(s['rel_err'][2:]):.2e}")
