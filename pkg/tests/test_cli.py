import json
import subprocess
import sys

import pytest

from polyxform.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_polygon_vertices(capsys):
    code, out, _ = run(["polygon", "--full", "2", "1", "5"], capsys)
    assert code == 0
    assert out.splitlines() == ["inv_p,inv_q", "3/4,1/4", "3/5,1/10", "1/2,1/20", "3/7,1/35",
                                "3/8,1/56"]


def test_polygon_files(tmp_path, capsys):
    code, _, _ = run(["polygon", "--full", "1", "1", "2", "--csv", str(tmp_path / "v.csv"),
                      "--svg", str(tmp_path / "v.svg"), "--out", str(tmp_path / "r.json")], capsys)
    assert code == 0
    assert (tmp_path / "v.svg").read_text().startswith("<svg")
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["result"]["nontrivial"][0] == ["2/3", "1/3"]


def test_exponents(capsys):
    code, out, _ = run(["exponents", "--full", "2", "1", "2"], capsys)
    assert code == 0 and out.strip() == "p = 5/3, q = 10"
    code, out, _ = run(["exponents", "--kplane", "3", "1"], capsys)
    assert out.strip() == "p = 2, q = 4"


def test_exponents_inline_family(capsys):
    fam = json.dumps({"n": 1, "nprime": 1, "d": 2, "pairs": [[[1], 1], [[2], 1]]})
    code, out, _ = run(["exponents", "--family", fam], capsys)
    assert code == 1 and "nondegeneracy" in out
    code, out, _ = run(["exponents", "--family", fam, "--allow-degenerate"], capsys)
    assert code == 0 and out.strip() == "p = 5/2, q = 5"


def test_admissible_report(capsys):
    code, out, _ = run(["admissible", "--full", "1", "2", "1"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["result"]["admissible"]
    assert rep["version"] and rep["seed"] == 0


def test_admissible_failure_exit(capsys):
    fam = json.dumps({"n": 1, "nprime": 2, "d": 1, "pairs": [[[0], 1], [[1], 1], [[0], 2]]})
    code, out, _ = run(["admissible", "--family", fam], capsys)
    assert code == 1
    assert json.loads(out)["result"]["report"]["dimensionality_ok"] is False


def test_usage_errors(tmp_path, capsys):
    assert run(["exponents"], capsys)[0] == 2
    assert run(["polygon"], capsys)[0] == 2
    assert run(["polygon", "--full", "0", "1", "1"], capsys)[0] == 2
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    code, _, err = run(["verify", "measures", "--config", str(cfg)], capsys)
    assert code == 2 and "bogus" in err


def test_config_sets_defaults(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"draws": 2, "seed": 3}))
    out = tmp_path / "r.json"
    code, _, _ = run(["verify", "symmetrization", "--config", str(cfg), "--out", str(out)], capsys)
    rep = json.loads(out.read_text())
    assert code == 0
    assert rep["seed"] == 3 and rep["config"]["draws"] == 2


def test_verify_reports_are_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code, _, _ = run(["verify", "measures", "--draws", "3", "--seed", "5", "--out", str(path)],
                         capsys)
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_threads_do_not_change_results(tmp_path, capsys, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["verify", "cov-identity", "--samples", "2e4", "--threads", "1", "--out", str(a)], capsys)
    monkeypatch.setenv("POLYXFORM_THREADS", "4")
    run(["verify", "cov-identity", "--samples", "2e4", "--out", str(b)], capsys)
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert rb["config"]["threads"] == 4
    assert ra["result"] == rb["result"]


def test_transform_apply(capsys):
    code, out, _ = run(["transform", "apply", "--full", "1", "1", "1", "--u", "0", "0",
                        "--method", "exact"], capsys)
    assert code == 0
    assert float(out) == pytest.approx(1.7724538509, rel=1e-6)
    code, _, _ = run(["transform", "apply", "--full", "1", "1", "1", "--u", "0"], capsys)
    assert code == 2


def test_sweep(tmp_path, capsys):
    code, _, _ = run(["sweep", "--full", "1", "1", "1", "--csv", str(tmp_path / "s.csv"),
                      "--out", str(tmp_path / "s.json")], capsys)
    assert code == 0
    rep = json.loads((tmp_path / "s.json").read_text())
    assert rep["result"]["verdict"]["pass"]
    assert (tmp_path / "s.csv").read_text().startswith("delta,pairing")


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "polyxform.cli", "exponents", "--full", "2", "1", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.strip() == "p = 4/3, q = 4"
