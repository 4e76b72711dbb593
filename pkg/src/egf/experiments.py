"""Named experiment recipes: generate data, learn, evaluate, interpolate, report.

Each recipe takes a dict of parameter overrides and returns an
:class:`ExperimentReport`. Reports carry one row per learned or interpolated
model, plot-ready series and (for 1D problems) subsampled kernel heatmaps.
All randomness flows from the ``seed`` parameter through fixed offsets, so a
recipe rerun with the same parameters reproduces every number except the
wall times.
"""
from __future__ import annotations

import csv
import io
import json
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bundles import write_csv, write_json, _atomic_write
from .errors import EgfError, InvalidArgumentError
from .forcing import KernelConfig, covariance_factor, sample_gp
from .grid import make_disk_grid, make_interval_grid, make_square_grid
from .interp import InterpolationSet, LAGRANGE, interpolate_egf, match_modes, select_origin
from .model import EgfModel, densify, relative_kernel_error, test_error
from .pod import fit_coefficients, learn_pod, pod_modes
from .rsvd import SelfAdjointnessWarning, learn_rsvd
from .solvers import (
    AIRY_1D,
    FRACTIONAL_1D,
    HELMHOLTZ_1D,
    HELMHOLTZ_SQUARE,
    MULTIPHYSICS_1D,
    POISSON_1D,
    POISSON_DISK,
    NoiseConfig,
    ProblemSpec,
    add_noise,
    exact_kernel,
    make_solver,
    noisy,
    solve_ensemble,
)

TEST_SEED_OFFSET = 1_000_003
NOISE_SEED_OFFSET = {"train": 2_000_003, "pass2": 3_000_017, "test": 4_000_037}

DEFAULTS = {
    "seed": 0,
    "n_sensors": 2000,
    "length_scale": 5e-3,
    "n_samples_pod": 2000,
    "n_samples_rsvd": 100,
    "rank": 100,
    "n_test": 100,
    "noise": 0.0,
    "scheme": LAGRANGE,
    "pod_method": "auto",
}


def make_problem(kind, theta=None, n_sensors=2000, spacing=0.05, n_per_side=41):
    """Problem on its standard grid: [0, 1] for 1D Dirichlet problems, [-1, 1] periodic
    for the fractional Laplacian, a lattice of spacing ``spacing`` on the disk and
    ``n_per_side`` nodes per side on the square."""
    if kind == FRACTIONAL_1D:
        grid = make_interval_grid(-1.0, 1.0, n_sensors)
    elif kind == POISSON_DISK:
        grid = make_disk_grid(spacing)
    elif kind == HELMHOLTZ_SQUARE:
        grid = make_square_grid(n_per_side)
    else:
        grid = make_interval_grid(0.0, 1.0, n_sensors)
    return ProblemSpec(kind, grid, theta)


class Bench:
    """A problem together with its forcing distribution, solver and covariance factor."""

    def __init__(self, problem, length_scale, factor_cache=None):
        self.problem = problem
        self.grid = problem.grid
        self.kernel = KernelConfig(length_scale)
        key = (self.grid.domain, self.grid.bounds, self.grid.size, float(length_scale))
        cache = {} if factor_cache is None else factor_cache
        if key not in cache:
            cache[key] = covariance_factor(self.grid, self.kernel)
        self.factor, self.jitter = cache[key]
        self.solve = make_solver(problem)

    def forcing(self, n, seed):
        return sample_gp(self.grid, self.kernel, n, seed, factor=self.factor)

    def dataset(self, n, seed, noise=0.0, noise_seed=None):
        F = self.forcing(n, seed)
        E = solve_ensemble(self.problem, F, self.solve)
        if noise:
            E = add_noise(E, NoiseConfig(noise, noise_seed))
        return F, E

    def test_set(self, n, seed, noise=0.0):
        F, E = self.dataset(n, seed + TEST_SEED_OFFSET)
        En = add_noise(E, NoiseConfig(noise, seed + NOISE_SEED_OFFSET["test"])) if noise else E
        return F, E, En

    def learn(self, method, rank, n_samples, seed, noise=0.0, pod_method="auto", strict=True):
        """Learn a model; noise (if any) perturbs every response the learner sees."""
        train_noise_seed = seed + NOISE_SEED_OFFSET["train"]
        F, E = self.dataset(n_samples, seed, noise, train_noise_seed)
        seeds = {"forcing_seed": seed, "noise_seed": train_noise_seed if noise else None}
        if method == "pod":
            model = learn_pod(F, E, min(rank, n_samples), method=pod_method,
                              theta=self.problem.theta, strict=strict)
        elif method == "rsvd":
            pass2_seed = seed + NOISE_SEED_OFFSET["pass2"]
            solve2 = noisy(self.solve, NoiseConfig(noise, pass2_seed)) if noise else self.solve
            seeds["pass2_noise_seed"] = pass2_seed if noise else None
            with warnings.catch_warnings():
                if noise:
                    warnings.simplefilter("ignore", SelfAdjointnessWarning)
                model = learn_rsvd(F, min(rank, n_samples), solve2, E=E, theta=self.problem.theta)
        else:
            raise InvalidArgumentError(f"unknown method {method!r}")
        model.info.update(seeds)
        return model


@dataclass
class ExperimentReport:
    recipe: str
    params: dict
    rows: list = field(default_factory=list)
    series: dict = field(default_factory=dict)
    arrays: dict = field(default_factory=dict)

    def row(self, experiment, method, theta, eps=None, test=None, wall_time=None, **extra):
        r = {
            "experiment": experiment,
            "method": method,
            "theta": theta,
            "eps_pct": None if eps is None else float(eps),
            "test_pct": None if test is None else float(test),
            "wall_time_s": wall_time,
        }
        r.update(extra)
        self.rows.append(r)
        return r

    def find(self, experiment=None, method=None):
        return [r for r in self.rows
                if (experiment is None or r["experiment"] == experiment)
                and (method is None or r["method"] == method)]

    def numbers(self):
        """Rows without wall times, for reproducibility checks."""
        return [{k: v for k, v in r.items() if k != "wall_time_s"} for r in self.rows]

    def to_csv(self):
        keys = []
        for r in self.rows:
            keys += [k for k in r if k not in keys]
        keys.append("params")
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=keys)
        w.writeheader()
        params = json.dumps(self.params, sort_keys=True)
        for r in self.rows:
            w.writerow({**{k: _cell(v) for k, v in r.items()}, "params": params})
        return buf.getvalue()

    def write(self, out):
        out = Path(out)
        (out / "data").mkdir(parents=True, exist_ok=True)
        text = self.to_csv()
        _atomic_write(out / "report.csv", lambda fh: fh.write(text))
        files = {}
        for name, cols in self.series.items():
            p = out / "data" / f"{name}.csv"
            keys = list(cols)
            length = max(len(cols[k]) for k in keys)
            lines = [",".join(keys)]
            for i in range(length):
                lines.append(",".join(_cell(cols[k][i]) if i < len(cols[k]) else "" for k in keys))
            _atomic_write(p, lambda fh, s="\n".join(lines) + "\n": fh.write(s))
            files[name] = str(p.relative_to(out))
        for name, a in self.arrays.items():
            p = out / "data" / f"{name}.csv"
            write_csv(p, a)
            files[name] = str(p.relative_to(out))
        write_json(out / "report.json", {
            "recipe": self.recipe, "params": self.params, "rows": self.rows,
            "series": self.series, "data_files": files,
        })
        return out


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (list, tuple, dict)):
        return json.dumps(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _heatmap(G, n=100):
    stride = max(1, G.shape[0] // n)
    return G[::stride, ::stride]


def _timed(fn, *a, **k):
    t0 = time.perf_counter()
    out = fn(*a, **k)
    return out, time.perf_counter() - t0


def _merge(defaults, overrides):
    p = dict(DEFAULTS)
    p.update(defaults)
    for k, v in (overrides or {}).items():
        if k not in p:
            raise InvalidArgumentError(f"unknown parameter {k!r}; known: {sorted(p)}")
        p[k] = type(p[k])(v) if p[k] is not None and not isinstance(p[k], (list, tuple)) else v
    return p


# --- learning recipes ------------------------------------------------------------

TABLE1_PROBLEMS = {
    "poisson1d": (POISSON_1D, None),
    "helmholtz1d": (HELMHOLTZ_1D, 15.0),
    "airy1d": (AIRY_1D, 7.0),
    "multiphysics": (MULTIPHYSICS_1D, 15.0),
}


def _learning_cells(report, name, kind, theta, p, noise, cache, heatmaps=False):
    problem = make_problem(kind, theta, p["n_sensors"])
    bench = Bench(problem, p["length_scale"], cache)
    exact = exact_kernel(problem)
    Ft, Et_clean, Et = bench.test_set(p["n_test"], p["seed"], noise)
    experiment = f"{name}-{'noisy' if noise else 'clean'}"
    if heatmaps and exact is not None:
        report.arrays[f"{experiment}-kernel-exact"] = _heatmap(exact.matrix(problem.grid))
    for method, n_samples in (("pod", p["n_samples_pod"]), ("rsvd", p["n_samples_rsvd"])):
        model, dt = _timed(bench.learn, method, p["rank"], n_samples, p["seed"], noise, p["pod_method"])
        eps = relative_kernel_error(model, exact) if exact is not None else None
        rep = test_error(model, Ft, Et)
        clean = test_error(model, Ft, Et_clean).test_error_percent if noise else rep.test_error_percent
        report.row(experiment, method, theta, eps, rep.test_error_percent, dt,
                   clean_test_pct=clean, n_samples=n_samples, rank=model.rank, noise=noise,
                   seeds={k: v for k, v in model.info.items() if k.endswith("seed")},
                   jitter=bench.jitter)
        report.series[f"{experiment}-{method}-sigma"] = {
            "k": list(range(1, model.rank + 1)), "sigma": model.sigma.tolist()}
        if heatmaps:
            report.arrays[f"{experiment}-kernel-{method}"] = _heatmap(densify(model))
    if kind == POISSON_1D:
        k = np.arange(1, p["rank"] + 1)
        report.series[f"{experiment}-exact-sigma"] = {"k": k.tolist(), "sigma": (1 / (np.pi * k) ** 2).tolist()}


def _single(name):
    kind, theta = TABLE1_PROBLEMS[name]

    def recipe(overrides=None, noise_default=0.0, tag=""):
        p = _merge({"noise": noise_default, "theta": theta if theta is not None else 0.0}, overrides)
        th = p["theta"] if theta is not None else None
        report = ExperimentReport(tag, p)
        _learning_cells(report, name, kind, th, p, p["noise"], {}, heatmaps=True)
        return report

    return recipe


def recipe_table1(overrides=None):
    """All eight cells of the 1D error summary (four problems, clean and noisy)."""
    p = _merge({"noise": 0.1}, overrides)
    report = ExperimentReport("table1", p)
    cache = {}
    for name, (kind, theta) in TABLE1_PROBLEMS.items():
        for noise in (0.0, p["noise"]):
            _learning_cells(report, name, kind, theta, p, noise, cache)
    return report


def recipe_poisson2d_disk(overrides=None):
    """Poisson on the unit disk, exact log kernel as forward oracle."""
    p = _merge({"spacing": 0.05, "length_scale": 0.2, "rank": 200, "n_samples_rsvd": 300,
                "n_samples_pod": 2000}, overrides)
    problem = make_problem(POISSON_DISK, spacing=p["spacing"])
    bench = Bench(problem, p["length_scale"])
    exact = exact_kernel(problem)
    Ft, Et, _ = bench.test_set(p["n_test"], p["seed"])
    report = ExperimentReport("poisson2d-disk", p)
    for method, n in (("pod", p["n_samples_pod"]), ("rsvd", p["n_samples_rsvd"])):
        model, dt = _timed(bench.learn, method, p["rank"], n, p["seed"], 0.0, p["pod_method"])
        report.row("poisson2d-disk", method, None, relative_kernel_error(model, exact),
                   test_error(model, Ft, Et).test_error_percent, dt, n_samples=n,
                   rank=model.rank, n_sensors=problem.grid.size, jitter=bench.jitter)
        # slices through the origin and along x2 = s2 = 0
        pts = problem.grid.points
        i0 = int(np.argmin(np.einsum("ij,ij->i", pts, pts)))
        axis = np.flatnonzero(np.abs(pts[:, 1]) < 1e-12)
        G = densify(model)
        report.series[f"disk-{method}-slice-origin"] = {
            "x1": pts[:, 0].tolist(), "x2": pts[:, 1].tolist(), "G": G[:, i0].tolist()}
        report.arrays[f"disk-{method}-slice-axis"] = G[np.ix_(axis, axis)]
    report.arrays["disk-exact-slice-axis"] = exact.matrix(problem.grid)[np.ix_(axis, axis)]
    return report


# --- interpolation recipes --------------------------------------------------------


def _interpolation(report, name, kind, knots, target, p, heatmaps=True, **grid_kw):
    cache = {}
    seed = p["seed"]
    models = []
    t_learn = 0.0
    for i, th in enumerate(list(knots) + [target]):
        bench = Bench(make_problem(kind, th, p["n_sensors"], **grid_kw), p["length_scale"], cache)
        m, dt = _timed(bench.learn, "rsvd", p["rank"], p["n_samples_rsvd"], seed + 1 + i)
        t_learn += dt
        models.append(m)
    target_model = models.pop()
    Ft, Et, _ = bench.test_set(p["n_test"], seed)
    iset = InterpolationSet(tuple(models), target)
    interp, dt = _timed(interpolate_egf, iset, p["scheme"])
    eps = relative_kernel_error(interp, target_model)
    report.row(name, f"interpolated-{p['scheme']}", target, eps,
               test_error(interp, Ft, Et).test_error_percent, dt,
               knots=list(knots), origin=models[select_origin(iset)].theta, scheme=p["scheme"],
               orthonormality=interp.orthonormality_defect(), rank=interp.rank,
               n_samples=p["n_samples_rsvd"])
    report.row(name, "rsvd-target", target, 0.0, test_error(target_model, Ft, Et).test_error_percent,
               t_learn, rank=target_model.rank, n_samples=p["n_samples_rsvd"])
    cols = {"k": list(range(1, interp.rank + 1)), "interpolated": interp.sigma.tolist(),
            "target": target_model.sigma.tolist()}
    for m in models:
        cols[f"knot_{m.theta:g}"] = m.sigma.tolist()
    report.series[f"{name}-sigma"] = cols
    if heatmaps and interp.grid.dim == 1:
        for m in models:
            report.arrays[f"{name}-kernel-knot-{m.theta:g}"] = _heatmap(densify(m))
        report.arrays[f"{name}-kernel-interpolated"] = _heatmap(densify(interp))
        report.arrays[f"{name}-kernel-target"] = _heatmap(densify(target_model))
    return interp, target_model, models


def _interp_recipe(name, kind, knots, target, defaults, **grid_kw):
    def recipe(overrides=None):
        p = _merge(defaults, overrides)
        report = ExperimentReport(name, p)
        _interpolation(report, name, kind, knots, target, p, **grid_kw)
        return report

    recipe.__name__ = f"recipe_{name.replace('-', '_')}"
    return recipe


recipe_airy_interp = _interp_recipe("airy-interp", AIRY_1D, (1.0, 5.0, 10.0), 7.0, {})
recipe_airy_extrap = _interp_recipe("airy-extrap", AIRY_1D, (6.0, 7.0, 8.0), 9.0, {})
# slow k^(-2 theta) spectral decay: oversample the sketch (see README)
recipe_fraclap_interp = _interp_recipe(
    "fraclap-interp", FRACTIONAL_1D, (0.6, 0.7, 0.8), 0.75, {"n_samples_rsvd": 300})

HELMHOLTZ_SQUARE_KNOTS = (4.2, 4.35, 4.6)
HELMHOLTZ_SQUARE_TARGET = 4.5


def recipe_helmholtz2d_interp(overrides=None):
    """Square-domain Helmholtz interpolation across the first resonance sqrt(2) pi."""
    p = _merge({"n_per_side": 41, "length_scale": 0.2, "rank": 40, "n_samples_rsvd": 160}, overrides)
    report = ExperimentReport("helmholtz2d-interp", p)
    interp, target, _ = _interpolation(report, "helmholtz2d-interp", HELMHOLTZ_SQUARE,
                                       HELMHOLTZ_SQUARE_KNOTS, HELMHOLTZ_SQUARE_TARGET, p,
                                       heatmaps=False, n_per_side=p["n_per_side"])
    rel = np.abs(interp.sigma - target.sigma) / np.abs(target.sigma)
    report.rows[0]["max_rel_sigma_err_k_ge_3"] = float(rel[2:].max())
    report.series["helmholtz2d-interp-sigma"]["rel_err"] = rel.tolist()
    return report


def recipe_mode_swap(overrides=None):
    """Helmholtz 1D eigenvalue crossing: analytic curves and learned models at theta = 4, 6."""
    p = _merge({"thetas": [4.0, 6.0]}, overrides)
    report = ExperimentReport("mode-swap", p)
    th = np.linspace(0.0, 10.0, 401)
    report.series["mode-swap-analytic"] = {
        "theta": th.tolist(),
        "abs_sigma1": np.abs(1 / (th**2 - np.pi**2)).tolist(),
        "abs_sigma2": np.abs(1 / (th**2 - 4 * np.pi**2)).tolist(),
    }
    cache = {}
    models = []
    for th_ in p["thetas"]:
        bench = Bench(make_problem(HELMHOLTZ_1D, th_, p["n_sensors"]), p["length_scale"], cache)
        m, dt = _timed(bench.learn, "rsvd", p["rank"], p["n_samples_rsvd"], p["seed"])
        models.append(m)
        x = bench.grid.x
        report.series[f"mode-swap-modes-{th_:g}"] = {
            "x": x.tolist(), "mode1": m.phi[:, 0].tolist(), "mode2": m.phi[:, 1].tolist()}
        report.row("mode-swap", "rsvd", th_, wall_time=dt, sigma1=float(m.sigma[0]),
                   sigma2=float(m.sigma[1]))
    iset = InterpolationSet(tuple(models), p["thetas"][0])
    matched = match_modes(iset, 0)
    w = models[0].grid.weights
    perm = np.argmax(np.abs(models[1].phi.T @ (w[:, None] * matched.knots[1].phi[:, :2])), axis=0)
    report.rows[-1]["matched_permutation_first_two"] = perm.tolist()
    return report


# --- hyperparameter sweeps (POD on 1D Poisson) -----------------------------------

SWEEP_BASE = {"length_scale": 0.0025, "n_seeds": 10}
SWEEP_VALUES = {
    "n_samples": [25, 50, 100, 200, 500, 1000, 2000],
    "length_scale": [0.04, 0.02, 0.01, 0.005, 0.0025],
    "rank": [5, 10, 20, 30, 50, 75, 100, 150],
    "n_sensors": [250, 500, 1000, 2000, 3000],
}


def _sweep_errors(param, values, p):
    seeds = [p["seed"] + s for s in range(p["n_seeds"])]
    errs = np.zeros((len(values), len(seeds)))
    cache = {}
    if param in ("n_samples", "rank"):
        bench = Bench(make_problem(POISSON_1D, n_sensors=p["n_sensors"]), p["length_scale"], cache)
        exact = exact_kernel(bench.problem)
        nmax = max(values) if param == "n_samples" else p["n_samples_pod"]
        for j, seed in enumerate(seeds):
            F, E = bench.dataset(nmax, seed)
            if param == "n_samples":
                for i, n in enumerate(values):
                    Fi = type(F)(F.grid, F.matrix[:, :n], seed, F.kernel)
                    Ei = type(E)(E.grid, E.matrix[:, :n], E.problem)
                    model = learn_pod(Fi, Ei, min(p["rank"], n), p["pod_method"], strict=False)
                    errs[i, j] = relative_kernel_error(model, exact)
            else:
                phi, _ = pod_modes(E, max(values), p["pod_method"], strict=False)
                Z = fit_coefficients(phi, F, E)
                for i, K in enumerate(values):
                    model = EgfModel(F.grid, phi[:, :K], Z[:K], None, "pod")
                    errs[i, j] = relative_kernel_error(model, exact)
    else:
        for i, v in enumerate(values):
            n_sensors = int(v) if param == "n_sensors" else p["n_sensors"]
            ls = float(v) if param == "length_scale" else p["length_scale"]
            bench = Bench(make_problem(POISSON_1D, n_sensors=n_sensors), ls, cache)
            exact = exact_kernel(bench.problem)
            for j, seed in enumerate(seeds):
                model = bench.learn("pod", p["rank"], p["n_samples_pod"], seed, 0.0, p["pod_method"],
                                    strict=False)
                errs[i, j] = relative_kernel_error(model, exact)
    return errs


def _sweep_recipe(name, param):
    def recipe(overrides=None):
        p = _merge(dict(SWEEP_BASE, values=list(SWEEP_VALUES[param])), overrides)
        p["values"] = [float(v) if param == "length_scale" else int(v) for v in p["values"]]
        report = ExperimentReport(name, p)
        errs, dt = _timed(_sweep_errors, param, p["values"], p)
        mean = errs.mean(axis=1)
        report.series[name] = {
            param: p["values"], "mean_eps_pct": mean.tolist(), "std_eps_pct": errs.std(axis=1).tolist(),
            **{f"seed_{p['seed'] + s}": errs[:, s].tolist() for s in range(errs.shape[1])},
        }
        for v, e, col in zip(p["values"], mean, errs):
            report.row(name, "pod", None, e, None, None, **{param: v},
                       eps_std=float(col.std()), n_seeds=errs.shape[1])
        report.rows[-1]["wall_time_s"] = dt
        return report

    return recipe


recipe_sweep_nsamples = _sweep_recipe("sweep-nsamples", "n_samples")
recipe_sweep_lengthscale = _sweep_recipe("sweep-lengthscale", "length_scale")
recipe_sweep_rank = _sweep_recipe("sweep-rank", "rank")
recipe_sweep_sensors = _sweep_recipe("sweep-sensors", "n_sensors")


def _noisy_variant(recipe, tag):
    def run(overrides=None):
        return recipe(overrides, noise_default=0.1, tag=tag)
    return run


def _clean_variant(recipe, tag):
    def run(overrides=None):
        return recipe(overrides, noise_default=0.0, tag=tag)
    return run


RECIPES = {}
for _name in TABLE1_PROBLEMS:
    _r = _single(_name)
    RECIPES[f"{_name}-clean"] = _clean_variant(_r, f"{_name}-clean")
    RECIPES[f"{_name}-noisy"] = _noisy_variant(_r, f"{_name}-noisy")
RECIPES.update({
    "table1": recipe_table1,
    "poisson2d-disk": recipe_poisson2d_disk,
    "airy-interp": recipe_airy_interp,
    "airy-extrap": recipe_airy_extrap,
    "fraclap-interp": recipe_fraclap_interp,
    "helmholtz2d-interp": recipe_helmholtz2d_interp,
    "mode-swap": recipe_mode_swap,
    "sweep-nsamples": recipe_sweep_nsamples,
    "sweep-lengthscale": recipe_sweep_lengthscale,
    "sweep-rank": recipe_sweep_rank,
    "sweep-sensors": recipe_sweep_sensors,
})


def run_experiment(recipe, overrides=None):
    """Run a named recipe with parameter overrides; errors carry the recipe name."""
    if recipe not in RECIPES:
        raise InvalidArgumentError(f"unknown recipe {recipe!r}; available: {sorted(RECIPES)}")
    try:
        return RECIPES[recipe](overrides)
    except EgfError as exc:
        exc.recipe = recipe
        exc.args = (f"[{recipe}] {exc}",) + exc.args[1:]
        raise
