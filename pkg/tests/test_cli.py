import csv
import json

import pytest

from mrw_fluct import dump_model
from mrw_fluct.catalog import gaussian_two_state, single_fair_walk, symmetric_two_state
from mrw_fluct.cli import main
from mrw_fluct.model import PointKernel, MrwModel


@pytest.fixture
def model_file(tmp_path):
    path = tmp_path / "two_state.json"
    dump_model(symmetric_two_state(), path)
    return str(path)


@pytest.fixture
def gaussian_file(tmp_path):
    path = tmp_path / "gaussian.json"
    dump_model(gaussian_two_state(), path)
    return str(path)


def test_validate_ok(model_file, capsys):
    assert main(["validate", model_file]) == 0
    out = capsys.readouterr().out
    assert "pi = " in out and "lattice-exact: yes" in out


def test_validate_rejects_bad_model(tmp_path, capsys):
    bad = MrwModel(["a"], [[0.7]], [[PointKernel(1.0)]])
    path = tmp_path / "bad.json"
    dump_model(bad, path)
    assert main(["validate", str(path)]) == 2


def test_validate_missing_file():
    assert main(["validate", "/nonexistent/model.json"]) == 2


def test_run_exact_law_outputs(model_file, tmp_path, capsys):
    out = tmp_path / "out"
    rc = main([
        "run", "--model", model_file, "--experiment", "exact-law",
        "--n", "4", "--out", str(out),
    ])
    assert rc == 0
    with open(out / "law.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0].keys() == {"n", "state", "lattice_index", "value", "probability"}
    assert sum(float(r["probability"]) for r in rows) == pytest.approx(1.0, abs=1e-12)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["experiment"] == "exact-law"
    assert len(manifest["model_sha256"]) == 64
    assert manifest["summary"]["total_mass"] == pytest.approx(1.0)


def test_run_unknown_experiment(model_file):
    assert main(["run", "--model", model_file, "--experiment", "nope", "--n", "2"]) == 2


def test_run_missing_required_flag(model_file, tmp_path):
    rc = main([
        "run", "--model", model_file, "--experiment", "exact-law",
        "--out", str(tmp_path / "o"),
    ])
    assert rc == 2


def test_run_unknown_state(model_file, tmp_path):
    rc = main([
        "run", "--model", model_file, "--experiment", "exact-law",
        "--n", "2", "--state", "zz", "--out", str(tmp_path / "o"),
    ])
    assert rc == 2


def test_run_gaussian_exact_law_resource_error(gaussian_file, tmp_path):
    rc = main([
        "run", "--model", gaussian_file, "--experiment", "exact-law",
        "--n", "4", "--out", str(tmp_path / "o"),
    ])
    assert rc == 3


def test_env_var_output_dir(model_file, tmp_path, monkeypatch):
    target = tmp_path / "from_env"
    monkeypatch.setenv("MRW_FLUCT_OUT", str(target))
    rc = main([
        "run", "--model", model_file, "--experiment", "spitzer",
        "--n", "20", "--paths", "10", "--seed", "1",
    ])
    assert rc == 0
    doc = json.loads((target / "estimate.json").read_text())
    assert set(doc) == {"estimate", "stderr", "paths", "seed", "exact"}


def test_explicit_out_beats_env(model_file, tmp_path, monkeypatch):
    monkeypatch.setenv("MRW_FLUCT_OUT", str(tmp_path / "env"))
    out = tmp_path / "flag"
    rc = main([
        "run", "--model", model_file, "--experiment", "spitzer",
        "--n", "20", "--paths", "10", "--out", str(out),
    ])
    assert rc == 0
    assert (out / "estimate.json").exists()
    assert not (tmp_path / "env").exists()


def test_bad_tolerance_entry(model_file, tmp_path):
    rc = main([
        "run", "--model", model_file, "--experiment", "arcsine-ks",
        "--n", "10", "--paths", "10", "--tolerance", "theta=abc",
        "--out", str(tmp_path / "o"),
    ])
    assert rc == 2


def test_samples_csv_schema(tmp_path):
    model = tmp_path / "fair.json"
    dump_model(single_fair_walk(), model)
    out = tmp_path / "occ"
    rc = main([
        "run", "--model", str(model), "--experiment", "occupation",
        "--n", "50", "--paths", "8", "--seed", "4", "--out", str(out),
    ])
    assert rc == 0
    with open(out / "samples.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 8
    assert rows[0].keys() == {"path_index", "n", "value"}
    assert rows[3]["path_index"] == "3"
    assert rows[3]["n"] == "50"


def test_seventeen_digit_formatting(model_file, tmp_path):
    out = tmp_path / "digits"
    main([
        "run", "--model", model_file, "--experiment", "exact-law",
        "--n", "3", "--out", str(out),
    ])
    with open(out / "law.csv") as fh:
        next(fh)
        probs = [line.rstrip().split(",")[-1] for line in fh]
    # 0.375 has an exact short form; a value like 0.03125 must round-trip.
    assert all(float(p) == float(format(float(p), ".17g")) for p in probs)


def test_rho_report_cli(tmp_path, model_file):
    out = tmp_path / "rho"
    rc = main([
        "run", "--model", model_file, "--experiment", "rho-report",
        "--paths", "400", "--seed", "2", "--tolerance", "rho=0.05",
        "--out", str(out),
    ])
    assert rc == 0
    doc = json.loads((out / "rho.json").read_text())
    assert doc["passed"] is True
    assert doc["tolerance"] == 0.05
