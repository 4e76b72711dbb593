"""Command-line entry point: ``egf generate|learn-pod|learn-rsvd|evaluate|interpolate|report``.

Successful commands print a JSON summary on stdout and exit with 0. Failures
print ``{"error": kind, "message": ...}`` on stderr and exit with 1 (2 for
usage errors).
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings

from . import experiments as ex
from .bundles import load_dataset, load_model, save_dataset, save_model, write_json
from .errors import EgfError, InvalidArgumentError
from .interp import SCHEMES, InterpolationSet, interpolate_egf
from .model import relative_kernel_error, test_error
from .pod import learn_pod
from .rsvd import learn_rsvd
from .solvers import KINDS, NoiseConfig, ProblemSpec, exact_kernel, make_solver, noisy


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail({"error": "usage", "message": f"{self.prog}: {message}"}, code=2)


def _fail(payload, code=1):
    print(json.dumps(payload), file=sys.stderr)
    sys.exit(code)


def _emit(payload):
    print(json.dumps(payload, indent=2, default=str))


def cmd_generate(args):
    problem = ex.make_problem(args.problem, args.theta, args.sensors, args.spacing, args.per_side)
    bench = ex.Bench(problem, args.lengthscale)
    noise_seed = args.seed + ex.NOISE_SEED_OFFSET["train"] if args.noise else None
    F, E = bench.dataset(args.samples, args.seed, args.noise, noise_seed)
    save_dataset(args.out, F, E, {"jitter_used": bench.jitter})
    return {"out": args.out, "n_sensors": problem.grid.size, "n_samples": args.samples,
            "problem": args.problem, "theta": problem.theta, "forcing_seed": args.seed,
            "noise_seed": noise_seed}


def cmd_learn_pod(args):
    F, E, man = load_dataset(args.data)
    model = learn_pod(F, E, args.rank, method=args.method)
    model.info["dataset"] = args.data
    save_model(args.out, model)
    return {"out": args.out, "rank": model.rank, "sigma_head": model.sigma[:5].tolist()}


def cmd_learn_rsvd(args):
    F, E, man = load_dataset(args.data)
    if E.problem is None:
        raise InvalidArgumentError("dataset has no problem record; the second pass needs a solver")
    solve = make_solver(E.problem)
    level = args.noise if args.noise is not None else (E.noise.level if E.noise else 0.0)
    pass2_seed = None
    if level:
        base = args.seed if args.seed is not None else (man.get("forcing_seed") or 0)
        pass2_seed = base + ex.NOISE_SEED_OFFSET["pass2"]
        solve = noisy(solve, NoiseConfig(level, pass2_seed))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        model = learn_rsvd(F, args.rank, solve, E=E)
    model.info.update(dataset=args.data, pass2_noise_level=level, pass2_noise_seed=pass2_seed)
    save_model(args.out, model)
    return {"out": args.out, "rank": model.rank, "sigma_head": model.sigma[:5].tolist(),
            "warnings": [str(w.message) for w in caught]}


def cmd_evaluate(args):
    model = load_model(args.model)
    out = {"model": args.model, "rank": model.rank, "theta": model.theta}
    problem = None
    if args.data:
        F, E, _ = load_dataset(args.data)
        rep = test_error(model, F, E)
        out.update(test_pct=rep.test_error_percent, n_test=len(rep.per_sample_errors),
                   n_excluded=rep.n_excluded)
        problem = E.problem
    if args.problem:
        problem = ProblemSpec(args.problem, model.grid, args.theta if args.theta is not None else model.theta)
    exact = exact_kernel(problem) if problem is not None else None
    if exact is not None:
        out["eps_pct"] = relative_kernel_error(model, exact)
    if args.out:
        write_json(args.out, out)
    return out


def cmd_interpolate(args):
    models = [load_model(p) for p in args.models]
    iset = InterpolationSet(tuple(models), args.theta)
    result = interpolate_egf(iset, args.scheme)
    save_model(args.out, result, {"scheme": args.scheme})
    return {"out": args.out, "theta": args.theta, "knots": iset.thetas.tolist(),
            "origin": result.info["origin_theta"], "scheme": args.scheme}


_REPORT_FLAGS = {
    "sensors": "n_sensors",
    "rank": "rank",
    "lengthscale": "length_scale",
    "noise": "noise",
    "seed": "seed",
    "scheme": "scheme",
}


def _parse_set(items):
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise InvalidArgumentError(f"--set expects key=value, got {item!r}")
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


def cmd_report(args):
    overrides = {}
    for flag, key in _REPORT_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            overrides[key] = value
    if args.samples is not None:
        overrides["n_samples_pod"] = overrides["n_samples_rsvd"] = args.samples
    overrides.update(_parse_set(args.set))
    report = ex.run_experiment(args.recipe, overrides)
    report.write(args.out)
    return {"out": args.out, "recipe": args.recipe, "rows": report.numbers()}


def build_parser():
    p = _Parser(prog="egf", description="Learn and interpolate empirical Green's functions.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="sample forcings, solve, write a dataset bundle")
    g.add_argument("--problem", required=True, choices=KINDS)
    g.add_argument("--theta", type=float)
    g.add_argument("--sensors", type=int, default=2000, help="1D grid size")
    g.add_argument("--spacing", type=float, default=0.05, help="disk lattice spacing")
    g.add_argument("--per-side", type=int, default=41, help="square grid nodes per side")
    g.add_argument("--samples", type=int, default=2000)
    g.add_argument("--lengthscale", type=float, default=5e-3)
    g.add_argument("--noise", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    lp = sub.add_parser("learn-pod", help="learn a model with POD")
    lp.add_argument("--data", required=True)
    lp.add_argument("--rank", type=int, default=100)
    lp.add_argument("--method", choices=("auto", "svd", "gram"), default="auto")
    lp.add_argument("--out", required=True)
    lp.set_defaults(func=cmd_learn_pod)

    lr = sub.add_parser("learn-rsvd", help="learn a model with the two-pass randomized SVD")
    lr.add_argument("--data", required=True)
    lr.add_argument("--rank", type=int, default=100)
    lr.add_argument("--noise", type=float, help="noise level of the second pass (default: dataset's)")
    lr.add_argument("--seed", type=int, help="base seed for second-pass noise")
    lr.add_argument("--out", required=True)
    lr.set_defaults(func=cmd_learn_rsvd)

    ev = sub.add_parser("evaluate", help="test error and (when known) kernel error of a model")
    ev.add_argument("--model", required=True)
    ev.add_argument("--data", help="test dataset bundle")
    ev.add_argument("--problem", choices=KINDS, help="problem for the exact kernel")
    ev.add_argument("--theta", type=float)
    ev.add_argument("--out", help="write the result as JSON")
    ev.set_defaults(func=cmd_evaluate)

    it = sub.add_parser("interpolate", help="interpolate knot models to a new parameter")
    it.add_argument("--models", nargs="+", required=True)
    it.add_argument("--theta", type=float, required=True)
    it.add_argument("--scheme", choices=SCHEMES, default="lagrange")
    it.add_argument("--out", required=True)
    it.set_defaults(func=cmd_interpolate)

    rp = sub.add_parser("report", help="run a named experiment recipe")
    rp.add_argument("--recipe", required=True, choices=sorted(ex.RECIPES))
    rp.add_argument("--sensors", type=int)
    rp.add_argument("--samples", type=int, help="sets both POD and rSVD sample counts")
    rp.add_argument("--rank", type=int)
    rp.add_argument("--lengthscale", type=float)
    rp.add_argument("--noise", type=float)
    rp.add_argument("--seed", type=int)
    rp.add_argument("--scheme", choices=SCHEMES)
    rp.add_argument("--set", action="append", metavar="KEY=VALUE",
                    help="override any recipe parameter (repeatable)")
    rp.add_argument("--out", required=True)
    rp.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except EgfError as exc:
        _fail(exc.to_dict())
    except (OSError, ValueError, MemoryError) as exc:
        _fail({"error": type(exc).__name__, "message": str(exc)})
    _emit(result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
