import json

import pytest

from hardcore.cli import main

RUNS = {
    "verify": ["verify", "props", "--n", "2"],
    "enumerate": ["enumerate", "--n", "3", "--L", "20"],
    "sample": ["sample", "--n", "2", "--samples", "400", "--emit", "csv", "--emit", "svg", "--snapshots", "2"],
    "census-ngamma": ["census-ngamma", "--n", "2", "--R", "0,1,2", "--E", "1,0"],
    "census-family": ["census-family", "--n", "3", "--eps", "1/4", "--regime", "extended"],
    "snapshot": ["snapshot", "--n", "6", "--lam", "2", "--anchor", "0,0"],
}


def run(tmp_path, argv, seed=4):
    code = main(["--seed", str(seed), "--out-dir", str(tmp_path), *argv])
    return code, {p.name: p.read_bytes() for p in sorted(tmp_path.iterdir()) if not p.name.startswith("manifest")}


@pytest.mark.parametrize("name", sorted(RUNS))
def test_reruns_are_byte_identical(tmp_path, name):
    code1, out1 = run(tmp_path / "a", RUNS[name])
    code2, out2 = run(tmp_path / "b", RUNS[name])
    assert code1 == code2 == 0
    assert out1 and out1 == out2
    manifest = json.loads((tmp_path / "a" / f"manifest-{name}.json").read_text())
    assert manifest["command"] == name and manifest["seed"] == 4
    assert sorted(manifest["outputs"]) == sorted(out1)


@pytest.mark.parametrize("name", ["sample", "census-family", "snapshot"])
def test_replay_reproduces_outputs(tmp_path, name):
    _, first = run(tmp_path / "a", RUNS[name])
    manifest = tmp_path / "a" / f"manifest-{name}.json"
    assert main(["--replay", str(manifest), "--out-dir", str(tmp_path / "b")]) == 0
    again = {p.name: p.read_bytes() for p in (tmp_path / "b").iterdir() if not p.name.startswith("manifest")}
    assert again == first


def test_enumerate_plus_pentomino(tmp_path, capsys):
    assert main(["--out-dir", str(tmp_path), "enumerate", "--n", "2", "--L", "12"]) == 0
    lines = (tmp_path / "cutsets.ndjson").read_text().splitlines()
    assert json.loads(lines[-1]) == {"count": 1}
    doc = json.loads(lines[0])
    assert list(doc) == ["edges", "stats"] and len(doc["edges"]) == 12
    assert main(["--out-dir", str(tmp_path), "enumerate", "--n", "2", "--L", "1"]) == 0
    assert (tmp_path / "cutsets.ndjson").read_text() == '{"count":0}\n'


def test_full_census_has_count_line(tmp_path):
    assert main(["--out-dir", str(tmp_path), "enumerate", "--n", "3"]) == 0
    lines = (tmp_path / "cutsets.ndjson").read_text().splitlines()
    assert json.loads(lines[-1]) == {"count": 16} and len(lines) == 17


def test_exit_codes(tmp_path):
    assert main(["--out-dir", str(tmp_path), "verify", "all", "--n", "9"]) == 2
    assert main(["--out-dir", str(tmp_path), "enumerate", "--n", "4"]) == 2
    assert main(["--out-dir", str(tmp_path), "bogus"]) == 2
    assert main(["--out-dir", str(tmp_path), "census-ngamma", "--n", "2", "--R", "9", "--E", "1,0"]) == 2
    assert main(["--out-dir", str(tmp_path), "sample", "--n", "2", "--samples", "0"]) == 2
    # a coalescence cap that cannot be met is a run failure, not a usage error
    assert main(["--out-dir", str(tmp_path), "sample", "--n", "8", "--lam", "40", "--samples", "2", "--max-sweeps", "1"]) == 1


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed = 7\nsamples = 50\nn = 2\n")
    out = tmp_path / "o"
    assert main(["--config", str(cfg), "--out-dir", str(out), "sample", "--samples", "60"]) == 0
    manifest = json.loads((out / "manifest-sample.json").read_text())
    assert manifest["seed"] == 7
    assert manifest["parameters"]["samples"] == 60


def test_out_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("HARDCORE_OUT_DIR", str(tmp_path / "env"))
    assert main(["census-ngamma", "--n", "2", "--R", "1", "--E", "1,0"]) == 0
    rows = (tmp_path / "env" / "census-ngamma.csv").read_text().splitlines()
    assert rows == ["R,E,count,bound", '1,"1,0",1,16']


def test_worker_count_does_not_change_estimate(tmp_path):
    argv = ["sample", "--n", "3", "--samples", "300"]
    _, one = run(tmp_path / "a", argv)
    _, three = run(tmp_path / "b", argv + ["--workers", "3"])
    assert one == three


def test_n20_snapshots_for_both_activities(tmp_path):
    for lam in ("1", "5"):
        out = tmp_path / lam
        assert main(["--out-dir", str(out), "sample", "--n", "20", "--lam", lam, "--samples", "1",
                     "--emit", "svg", "--snapshots", "1"]) == 0
        assert (out / "snapshot-0.svg").read_text().startswith("<svg")


def test_version(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.strip().endswith("0.1.0")
