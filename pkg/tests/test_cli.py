import json

import numpy as np
import pytest

from fdc.cli import main, restart_seeds
from fdc.fcm import fcm_fit
from fdc.metrics import ari_pct, harden

from .conftest import blobs


@pytest.fixture
def toy(tmp_path):
    rng = np.random.default_rng(0)
    X, y = blobs(rng, 12, 3, spread=0.4, sep=4)
    path = tmp_path / "toy.csv"
    lines = ["x0,x1,label"] + [f"{float(a)!r},{float(b)!r},{c}" for (a, b), c in zip(X, y)]
    path.write_text("\n".join(lines) + "\n")
    return path, X, y


def run(args):
    return main([str(a) for a in args])


def test_fit_writes_outputs(toy, tmp_path):
    data, _, _ = toy
    cons = tmp_path / "c.csv"
    assert run(["gen-constraints", "--data", data, "--fraction", 0.2, "--out", cons]) == 0
    out = tmp_path / "out"
    assert run(["fit", "--data", data, "--constraints", cons, "--k", 3, "--restarts", 3, "--out-dir", out]) == 0
    u = np.loadtxt(out / "memberships.csv", delimiter=",", skiprows=1)
    np.testing.assert_allclose(u.sum(axis=1), 1, atol=1e-9)
    record = json.loads((out / "run.json").read_text())
    assert record["schema_version"] == 1 and len(record["restarts"]) == 3
    assert "ari_pct" in record["restarts"][0]["metrics"]
    assert (out / "trace.csv").read_text().startswith("restart,iteration,objective")


def test_fit_is_deterministic(toy, tmp_path):
    data, _, _ = toy
    for name in ("a", "b"):
        assert run(["fit", "--data", data, "--k", 3, "--restarts", 2, "--seed", 11, "--out-dir", tmp_path / name]) == 0
    assert (tmp_path / "a" / "run.json").read_bytes() == (tmp_path / "b" / "run.json").read_bytes()
    assert (tmp_path / "a" / "memberships.csv").read_bytes() == (tmp_path / "b" / "memberships.csv").read_bytes()


def test_missing_data_file(tmp_path, capsys):
    missing = tmp_path / "nope.csv"
    assert run(["fit", "--data", missing, "--k", 2, "--out-dir", tmp_path / "o"]) == 1
    assert str(missing) in capsys.readouterr().err


def test_eval_reproduces_fit_metrics(toy, tmp_path, capsys):
    data, _, y = toy
    out = tmp_path / "out"
    run(["fit", "--data", data, "--k", 3, "--restarts", 1, "--out-dir", out])
    truth = tmp_path / "truth.csv"
    truth.write_text("label\n" + "\n".join(map(str, y)) + "\n")
    assert run(["eval", "--pred", out / "memberships.csv", "--truth", truth, "--out", tmp_path / "m.json"]) == 0
    rep = json.loads((tmp_path / "m.json").read_text())
    fit_metrics = json.loads((out / "run.json").read_text())["restarts"][0]["metrics"]
    assert rep["ari_pct"] == fit_metrics["ari_pct"] and rep["nmi_pct"] == fit_metrics["nmi_pct"]


def test_zero_tradeoffs_match_fcm(toy, tmp_path):
    data, X, y = toy
    out = tmp_path / "out"
    run(["fit", "--data", data, "--k", 3, "--alpha", 0, "--beta", 0, "--restarts", 1, "--seed", 4, "--out-dir", out])
    ari = json.loads((out / "run.json").read_text())["restarts"][0]["metrics"]["ari_pct"]
    seed = restart_seeds(4, 1)[0]
    assert ari == pytest.approx(ari_pct(harden(fcm_fit(X, 3, seed=seed).memberships), y), abs=1e-9)


def test_gaussian_fit_and_grid(toy, tmp_path):
    data, _, _ = toy
    assert run(["fit", "--data", data, "--k", 3, "--kernel", "gaussian", "--mu", 0.5, "--restarts", 1, "--out-dir", tmp_path / "g"]) == 0
    out = tmp_path / "grid"
    args = ["grid", "--data", data, "--k", 3, "--restarts", 2, "--betas", "0,0.1", "--alphas", "0,0.05", "--out-dir", out]
    assert run(args) == 0
    grid = json.loads((out / "grid.json").read_text())
    assert len(grid["cells"]) == 4 and grid["best"][0]["ari_mean"] == max(c["ari_mean"] for c in grid["cells"])


def test_grid_needs_labels(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("1,2\n3,4\n5,6\n")
    assert run(["grid", "--data", p, "--k", 2, "--restarts", 1, "--out-dir", tmp_path / "o"]) == 1


def test_parallel_restarts_match_serial(toy, tmp_path):
    data, _, _ = toy
    run(["fit", "--data", data, "--k", 3, "--restarts", 3, "--out-dir", tmp_path / "s"])
    run(["fit", "--data", data, "--k", 3, "--restarts", 3, "--jobs", 2, "--out-dir", tmp_path / "p"])
    assert (tmp_path / "s" / "run.json").read_bytes() == (tmp_path / "p" / "run.json").read_bytes()
