"""Directory bundles for datasets and models.

A dataset bundle holds ``manifest.json``, ``sensors.csv``, ``weights.csv``,
``F.csv`` and ``E.csv``; a model bundle holds ``manifest.json``,
``sensors.csv``, ``weights.csv``, ``phi.csv`` and ``sigma.csv``. Matrices are
plain CSV with 17 significant digits, which round-trips doubles exactly.
Every file is written to a temporary name and renamed into place.
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import CorruptBundleError, UnsupportedFormatError
from .forcing import ForcingEnsemble, KernelConfig
from .grid import SensorGrid
from .model import EgfModel
from .solvers import NoiseConfig, ProblemSpec, ResponseEnsemble

FORMAT_VERSION = 1
SUPPORTED_VERSIONS = (1,)


def _atomic_write(path, write):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            write(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, a):
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    _atomic_write(path, lambda fh: np.savetxt(fh, a, fmt="%.17g", delimiter=","))


def read_csv(path, shape=None):
    path = Path(path)
    if not path.exists():
        raise CorruptBundleError(f"{path}: missing file")
    try:
        a = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise CorruptBundleError(f"{path}: unreadable ({exc})") from exc
    if shape is not None and a.shape != tuple(shape):
        raise CorruptBundleError(f"{path}: expected shape {tuple(shape)}, found {a.shape}")
    return a


def write_json(path, obj):
    _atomic_write(path, lambda fh: json.dump(obj, fh, indent=2, sort_keys=True, default=_jsonable))


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def read_manifest(path, kind):
    mpath = Path(path) / "manifest.json"
    if not mpath.exists():
        raise CorruptBundleError(f"{mpath}: missing manifest")
    try:
        man = json.loads(mpath.read_text())
    except json.JSONDecodeError as exc:
        raise CorruptBundleError(f"{mpath}: invalid JSON ({exc})") from exc
    version = man.get("format_version")
    if version is None:
        raise UnsupportedFormatError(f"{mpath}: no format_version field")
    if version not in SUPPORTED_VERSIONS:
        raise UnsupportedFormatError(f"{mpath}: format_version {version!r} is not supported")
    if man.get("bundle") != kind:
        raise CorruptBundleError(f"{mpath}: expected a {kind} bundle, found {man.get('bundle')!r}")
    return man


def _grid_manifest(grid):
    return {"domain": grid.domain, "bounds": list(grid.bounds), "n_sensors": grid.size, "dim": grid.dim}


def _write_grid(path, grid):
    write_csv(path / "sensors.csv", grid.points)
    write_csv(path / "weights.csv", grid.weights)


def _read_grid(path, gm):
    n, dim = gm["n_sensors"], gm["dim"]
    pts = read_csv(path / "sensors.csv", (n, dim))
    w = read_csv(path / "weights.csv", (n, 1))[:, 0]
    return SensorGrid(pts, w, gm["domain"], tuple(gm["bounds"]))


def save_dataset(path, F, E, extra=None):
    """Write a forcing/response pair as a dataset bundle."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    problem = E.problem
    man = {
        "bundle": "dataset",
        "format_version": FORMAT_VERSION,
        "grid": _grid_manifest(F.grid),
        "n_sensors": F.grid.size,
        "n_samples": F.n_samples,
        "problem": None if problem is None else {"kind": problem.kind, "theta": problem.theta},
        "kernel": None if F.kernel is None else {
            "family": F.kernel.family, "length_scale": F.kernel.length_scale, "jitter": F.kernel.jitter},
        "forcing_seed": F.seed,
        "noise": None if E.noise is None else {"level": E.noise.level, "seed": E.noise.seed},
    }
    man.update(extra or {})
    _write_grid(path, F.grid)
    write_csv(path / "F.csv", F.matrix)
    write_csv(path / "E.csv", E.matrix)
    write_json(path / "manifest.json", man)
    return path


def load_dataset(path):
    """Read a dataset bundle; returns ``(ForcingEnsemble, ResponseEnsemble, manifest)``."""
    path = Path(path)
    man = read_manifest(path, "dataset")
    try:
        grid = _read_grid(path, man["grid"])
        shape = (man["n_sensors"], man["n_samples"])
    except KeyError as exc:
        raise CorruptBundleError(f"{path}/manifest.json: missing field {exc}") from exc
    F = read_csv(path / "F.csv", shape)
    E = read_csv(path / "E.csv", shape)
    k = man.get("kernel")
    kernel = None if k is None else KernelConfig(k["length_scale"], k.get("jitter", 0.0), k["family"])
    p = man.get("problem")
    problem = None if p is None else ProblemSpec(p["kind"], grid, p.get("theta"))
    nz = man.get("noise")
    noise = None if nz is None else NoiseConfig(nz["level"], nz["seed"])
    return (
        ForcingEnsemble(grid, F, man.get("forcing_seed"), kernel),
        ResponseEnsemble(grid, E, problem, noise),
        man,
    )


def save_model(path, model, extra=None):
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    man = {
        "bundle": "model",
        "format_version": FORMAT_VERSION,
        "grid": _grid_manifest(model.grid),
        "grid_files": ["sensors.csv", "weights.csv"],
        "theta": model.theta,
        "rank": model.rank,
        "provenance": model.provenance,
        "info": model.info,
    }
    man.update(extra or {})
    _write_grid(path, model.grid)
    write_csv(path / "phi.csv", model.phi)
    write_csv(path / "sigma.csv", model.sigma)
    write_json(path / "manifest.json", man)
    return path


def load_model(path):
    path = Path(path)
    man = read_manifest(path, "model")
    try:
        grid = _read_grid(path, man["grid"])
        K = man["rank"]
    except KeyError as exc:
        raise CorruptBundleError(f"{path}/manifest.json: missing field {exc}") from exc
    phi = read_csv(path / "phi.csv", (grid.size, K)) if K else np.zeros((grid.size, 0))
    sigma = read_csv(path / "sigma.csv", (K, 1))[:, 0] if K else np.zeros(0)
    return EgfModel(grid, phi, sigma, man.get("theta"), man["provenance"], man.get("info") or {})
