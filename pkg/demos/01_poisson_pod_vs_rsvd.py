# %% [markdown]
# # Learning the 1D Poisson Green's function
#
# Random smooth forcings are pushed through a finite-difference solver for
# -u'' = f on [0, 1] with zero boundary values. Two learners turn the
# forcing/response pairs into a low-rank kernel and we compare both with the
# closed form G(x, s) = min(x, s) (1 - max(x, s)).

# %%
import numpy as np

from egf import (
    KernelConfig,
    ProblemSpec,
    exact_kernel,
    learn_pod,
    learn_rsvd,
    make_interval_grid,
    make_solver,
    relative_kernel_error,
    sample_gp,
    solve_ensemble,
    test_error,
)
from egf.solvers import POISSON_1D

grid = make_interval_grid(0.0, 1.0, 2000)
problem = ProblemSpec(POISSON_1D, grid)
kernel = KernelConfig(length_scale=5e-3)
solve = make_solver(problem)
exact = exact_kernel(problem)

# %% [markdown]
# POD needs many pairs: the modes come from the responses alone and the
# coefficients from a per-mode least-squares fit.

# %%
F = sample_gp(grid, kernel, 2000, seed=0)
E = solve_ensemble(problem, F, solve)
pod = learn_pod(F, E, rank=100)
print(f"POD   eps = {relative_kernel_error(pod, exact):.2f}%")

# %% [markdown]
# The randomized SVD asks the solver a second time, with the orthonormalized
# responses as forcings, and gets away with 100 pairs.

# %%
F_small = sample_gp(grid, kernel, 100, seed=0)
rsvd = learn_rsvd(F_small, 100, solve)
print(f"rSVD  eps = {relative_kernel_error(rsvd, exact):.3f}%")

# %%
F_test = sample_gp(grid, kernel, 100, seed=1_000_003)
E_test = solve_ensemble(problem, F_test, solve)
for name, model in (("POD", pod), ("rSVD", rsvd)):
    print(f"{name:5} eps_test = {test_error(model, F_test, E_test).test_error_percent:.2f}%")

# %% [markdown]
# The learned coefficients track the inverse Dirichlet eigenvalues 1 / (pi k)^2.

# %%
k = np.arange(1, 11)
print(np.round(pod.sigma[:10] * (np.pi * k) ** 2, 3))
