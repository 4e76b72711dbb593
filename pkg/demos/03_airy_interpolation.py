# %% [markdown]
# # Interpolating across the Airy parameter
#
# Models learned at theta = 1, 5 and 10 for u'' - theta^2 x u = f are
# interpolated on the Grassmann manifold to theta = 7 and compared with a
# model learned directly there.

# %%
from egf import InterpolationSet, interpolate_egf, relative_kernel_error, test_error
from egf.experiments import Bench, make_problem
from egf.solvers import AIRY_1D


def learn_at(theta, seed):
    bench = Bench(make_problem(AIRY_1D, theta), length_scale=5e-3)
    return bench, bench.learn("rsvd", rank=100, n_samples=100, seed=seed)


knots = [learn_at(th, seed)[1] for seed, th in enumerate((1.0, 5.0, 10.0), start=1)]
bench7, target = learn_at(7.0, 4)

# %%
for scheme in ("lagrange", "linear"):
    model = interpolate_egf(InterpolationSet(tuple(knots), 7.0), scheme)
    F, E, _ = bench7.test_set(100, seed=0)
    print(f"{scheme:8} eps vs target = {relative_kernel_error(model, target):.2f}%  "
          f"eps_test = {test_error(model, F, E).test_error_percent:.2f}%  "
          f"origin theta = {model.info['origin_theta']}")

# %% [markdown]
# Extrapolation works too when the knots are close: {6, 7, 8} to 9.

# %%
knots = [learn_at(th, seed)[1] for seed, th in enumerate((6.0, 7.0, 8.0), start=1)]
bench9, target9 = learn_at(9.0, 4)
model = interpolate_egf(InterpolationSet(tuple(knots), 9.0))
print(f"extrapolated eps = {relative_kernel_error(model, target9):.2f}%")
