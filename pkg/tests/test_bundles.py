import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st, HealthCheck

from egf import (
    CorruptBundleError,
    EgfModel,
    ForcingEnsemble,
    KernelConfig,
    NoiseConfig,
    ProblemSpec,
    ResponseEnsemble,
    UnsupportedFormatError,
    load_dataset,
    load_model,
    make_disk_grid,
    make_interval_grid,
    save_dataset,
    save_model,
)
from egf.solvers import HELMHOLTZ_1D


def dataset(rng, n=30, m=4):
    g = make_interval_grid(0, 1, n)
    F = ForcingEnsemble(g, rng.standard_normal((n, m)) * 1e-3, seed=11, kernel=KernelConfig(0.1))
    E = ResponseEnsemble(g, rng.standard_normal((n, m)) * 1e5, ProblemSpec(HELMHOLTZ_1D, g, 15.0),
                         NoiseConfig(0.1, 3))
    return F, E


@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(seed=st.integers(0, 10**6))
def test_dataset_round_trip_is_bitwise(tmp_path, seed):
    F, E = dataset(np.random.default_rng(seed))
    path = tmp_path / f"d{seed}"
    save_dataset(path, F, E)
    F2, E2, man = load_dataset(path)
    assert np.array_equal(F.matrix, F2.matrix) and np.array_equal(E.matrix, E2.matrix)
    assert np.array_equal(F.grid.points, F2.grid.points)
    assert np.array_equal(F.grid.weights, F2.grid.weights)
    assert E2.problem.kind == HELMHOLTZ_1D and E2.problem.theta == 15.0
    assert F2.kernel == F.kernel and F2.seed == 11 and E2.noise == E.noise
    assert man["n_sensors"] == 30 and man["n_samples"] == 4


def test_model_round_trip_on_disk_grid(tmp_path):
    g = make_disk_grid(0.2)
    rng = np.random.default_rng(0)
    m = EgfModel(g, rng.standard_normal((g.size, 3)), rng.standard_normal(3), None, "rsvd", {"leakage": 1e-7})
    save_model(tmp_path / "m", m)
    m2 = load_model(tmp_path / "m")
    assert np.array_equal(m.phi, m2.phi) and np.array_equal(m.sigma, m2.sigma)
    assert m2.grid.same_as(g) and m2.provenance == "rsvd" and m2.info == {"leakage": 1e-7}


def test_rank_one_model_round_trip(tmp_path):
    g = make_interval_grid(0, 1, 10)
    m = EgfModel(g, np.linspace(0, 1, 10), [2.5], 4.0)
    save_model(tmp_path / "m", m)
    m2 = load_model(tmp_path / "m")
    assert np.array_equal(m2.phi, m.phi) and m2.theta == 4.0


def test_truncated_csv_is_corrupt(tmp_path):
    F, E = dataset(np.random.default_rng(0))
    save_dataset(tmp_path / "d", F, E)
    lines = (tmp_path / "d" / "E.csv").read_text().splitlines()
    (tmp_path / "d" / "E.csv").write_text("\n".join(lines[:-3]) + "\n")
    with pytest.raises(CorruptBundleError, match=r"E\.csv.*\(30, 4\)"):
        load_dataset(tmp_path / "d")


def test_missing_file_is_corrupt(tmp_path):
    F, E = dataset(np.random.default_rng(0))
    save_dataset(tmp_path / "d", F, E)
    (tmp_path / "d" / "F.csv").unlink()
    with pytest.raises(CorruptBundleError, match="F.csv"):
        load_dataset(tmp_path / "d")


@pytest.mark.parametrize("version", [None, 99])
def test_unsupported_versions(tmp_path, version):
    F, E = dataset(np.random.default_rng(0))
    save_dataset(tmp_path / "d", F, E)
    mpath = tmp_path / "d" / "manifest.json"
    man = json.loads(mpath.read_text())
    if version is None:
        del man["format_version"]
    else:
        man["format_version"] = version
    mpath.write_text(json.dumps(man))
    with pytest.raises(UnsupportedFormatError):
        load_dataset(tmp_path / "d")


def test_model_bundle_is_not_a_dataset(tmp_path):
    g = make_interval_grid(0, 1, 10)
    save_model(tmp_path / "m", EgfModel(g, np.ones((10, 1)), [1.0]))
    with pytest.raises(CorruptBundleError, match="dataset"):
        load_dataset(tmp_path / "m")


def test_no_temporary_files_left(tmp_path):
    F, E = dataset(np.random.default_rng(0))
    save_dataset(tmp_path / "d", F, E)
    assert sorted(p.name for p in (tmp_path / "d").iterdir()) == [
        "E.csv", "F.csv", "manifest.json", "sensors.csv", "weights.csv"]
