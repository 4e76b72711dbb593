# %% [markdown]
# # Hyperparameter sweeps for POD on 1D Poisson
#
# Each point averages 10 seeds. The full sweeps take a few minutes; pass
# ``{"n_seeds": 3}`` for a quick look.

# %%
from egf.experiments import run_experiment

for name, key in (("sweep-nsamples", "n_samples"), ("sweep-lengthscale", "length_scale"),
                  ("sweep-rank", "rank"), ("sweep-sensors", "n_sensors")):
    report = run_experiment(name, {"n_seeds": 3})
    s = report.series[name]
    print(name)
    for v, m, sd in zip(s[key], s["mean_eps_pct"], s["std_eps_pct"]):
        print(f"  {key}={v:<8} eps={m:.3f}% (std {sd:.3f})")
