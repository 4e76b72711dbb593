import json

import pytest

from egf import load_model
from egf.cli import main


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def test_generate_learn_interpolate_evaluate(tmp_path, capsys):
    d = lambda name: str(tmp_path / name)
    common = ["--sensors", "150", "--lengthscale", "0.02"]
    for theta, seed in ((1.0, 0), (5.0, 1), (10.0, 2)):
        code, out, _ = run(capsys, "generate", "--problem", "airy1d", "--theta", str(theta), *common,
                           "--samples", "40", "--seed", str(seed), "--out", d(f"data{theta:g}"))
        assert code == 0 and json.loads(out)["n_sensors"] == 150
        code, out, _ = run(capsys, "learn-rsvd", "--data", d(f"data{theta:g}"), "--rank", "15",
                           "--out", d(f"model{theta:g}"))
        assert code == 0
    code, out, _ = run(capsys, "interpolate", "--models", d("model1"), d("model5"), d("model10"),
                       "--theta", "7", "--scheme", "linear", "--out", d("interp"))
    assert code == 0 and json.loads(out)["origin"] == 5.0
    assert load_model(d("interp")).info["scheme"] == "linear"
    run(capsys, "generate", "--problem", "airy1d", "--theta", "7", *common, "--samples", "10",
        "--seed", "99", "--out", d("test7"))
    code, out, _ = run(capsys, "evaluate", "--model", d("interp"), "--data", d("test7"))
    assert code == 0
    assert 0 < json.loads(out)["test_pct"] < 20


def test_learn_pod_and_exact_kernel_error(tmp_path, capsys):
    run(capsys, "generate", "--problem", "poisson1d", "--sensors", "200", "--samples", "200",
        "--lengthscale", "0.01", "--out", str(tmp_path / "d"))
    code, _, _ = run(capsys, "learn-pod", "--data", str(tmp_path / "d"), "--rank", "20",
                     "--out", str(tmp_path / "m"))
    assert code == 0
    code, out, _ = run(capsys, "evaluate", "--model", str(tmp_path / "m"), "--data", str(tmp_path / "d"),
                       "--out", str(tmp_path / "eval.json"))
    result = json.loads(out)
    assert code == 0 and result["eps_pct"] < 10
    assert json.loads((tmp_path / "eval.json").read_text()) == result


def test_noisy_rsvd_records_second_pass_seed(tmp_path, capsys):
    run(capsys, "generate", "--problem", "poisson1d", "--sensors", "100", "--samples", "30",
        "--lengthscale", "0.02", "--noise", "0.1", "--seed", "4", "--out", str(tmp_path / "d"))
    code, out, _ = run(capsys, "learn-rsvd", "--data", str(tmp_path / "d"), "--rank", "10",
                       "--out", str(tmp_path / "m"))
    assert code == 0
    info = load_model(tmp_path / "m").info
    assert info["pass2_noise_level"] == 0.1 and info["pass2_noise_seed"] is not None


def test_report_recipe(tmp_path, capsys):
    code, out, _ = run(capsys, "report", "--recipe", "poisson1d-clean", "--sensors", "200",
                       "--samples", "60", "--rank", "30", "--lengthscale", "0.02",
                       "--set", "n_test=10", "--out", str(tmp_path / "r"))
    assert code == 0
    assert (tmp_path / "r" / "report.csv").exists() and (tmp_path / "r" / "report.json").exists()
    rows = json.loads(out)["rows"]
    assert {r["method"] for r in rows} == {"pod", "rsvd"}


@pytest.mark.parametrize(
    "argv,kind,code",
    [
        (["learn-pod", "--data", "/nonexistent", "--out", "/tmp/x"], "corrupt-bundle", 1),
        (["generate", "--problem", "helmholtz1d", "--sensors", "10", "--out", "/tmp/x"], "invalid-argument", 1),
        (["generate", "--problem", "helmholtz1d", "--theta", "3.14159265358979", "--sensors", "2000",
          "--samples", "2", "--out", "/tmp/x"], "resonance", 1),
        (["report", "--recipe", "poisson1d-clean", "--set", "bogus=1", "--out", "/tmp/x"], "invalid-argument", 1),
        (["frobnicate"], "usage", 2),
        (["interpolate", "--theta", "1", "--out", "/tmp/x"], "usage", 2),
    ],
)
def test_failures_emit_json(capsys, argv, kind, code):
    rc, out, err = run(capsys, *argv)
    assert rc == code and out == ""
    assert json.loads(err)["error"] == kind
