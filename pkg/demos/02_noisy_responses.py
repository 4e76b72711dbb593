# %% [markdown]
# # Measurement noise
#
# Every response is perturbed by 10% of its mean absolute value times a
# standard normal. The randomized SVD sees noise twice, once per pass.

# %%
from egf import exact_kernel, relative_kernel_error, test_error
from egf.experiments import Bench, make_problem
from egf.solvers import POISSON_1D

bench = Bench(make_problem(POISSON_1D), length_scale=5e-3)
exact = exact_kernel(bench.problem)
pod = bench.learn("pod", rank=100, n_samples=2000, seed=0, noise=0.1)
rsvd = bench.learn("rsvd", rank=100, n_samples=100, seed=0, noise=0.1)

# %% [markdown]
# Test errors against noisy and clean test responses. The noisy figure is
# dominated by the noise in the test data itself.

# %%
F_test, E_clean, E_noisy = bench.test_set(100, seed=0, noise=0.1)
for name, model in (("POD", pod), ("rSVD", rsvd)):
    print(f"{name:5} eps={relative_kernel_error(model, exact):.2f}%  "
          f"noisy test={test_error(model, F_test, E_noisy).test_error_percent:.2f}%  "
          f"clean test={test_error(model, F_test, E_clean).test_error_percent:.2f}%")
