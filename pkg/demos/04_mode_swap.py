# %% [markdown]
# # Eigenvalue crossing in the Helmholtz problem
#
# For u'' + theta^2 u = f the coefficient of sin(k pi x) is 1 / (theta^2 - (k pi)^2).
# Between theta = 4 and theta = 6 the second mode overtakes the first in
# magnitude, so a magnitude-sorted model reorders its modes. Interpolation has
# to undo that reordering before it mixes bases.

# %%
import numpy as np

from egf import InterpolationSet, match_modes
from egf.experiments import Bench, make_problem
from egf.solvers import HELMHOLTZ_1D

models = []
for theta in (4.0, 6.0):
    bench = Bench(make_problem(HELMHOLTZ_1D, theta), length_scale=5e-3)
    models.append(bench.learn("rsvd", rank=100, n_samples=100, seed=0))
    print(f"theta={theta}: sigma_1={models[-1].sigma[0]:+.4f}, sigma_2={models[-1].sigma[1]:+.4f}")

# %%
matched = match_modes(InterpolationSet(tuple(models), 4.0), 0).knots[1]
print("after matching to theta=4:", np.round(matched.sigma[:2], 4))
