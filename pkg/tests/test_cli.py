import io
import json

import pytest

from finwalg import parse_alg_arg
from finwalg.cli import SCHEMA, JobConfig, Report, emit_report, run
from finwalg.liedata import spec_to_json


@pytest.fixture(autouse=True)
def cache(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv("FINWALG_CACHE_DIR", str(d))
    return d


def run_json(argv):
    buf = io.StringIO()
    code = run(argv, stream=buf)
    return code, (json.loads(buf.getvalue()) if buf.getvalue() else None)


def test_walg_gens_report():
    code, out = run_json(["walg", "gens", "--alg", "sl2:[2]", "--max-deg", "4"])
    assert code == 0
    gens = out["reports"][0]["data"]["generators"]
    assert [g["text"] for g in gens] == ["1/4*h1^2 + e12 - 1/2*h1"]
    assert out["summary"]["schema"] == SCHEMA


def test_lift_solve_report():
    code, out = run_json(["lift", "solve", "--alg", "sl2:[2]", "--rep", "natural"])
    assert code == 0
    x0 = out["reports"][0]["data"]["lifts"]["natural"]["x0"]
    assert x0 == [["1", "0"], ["-1/2*h1", "1"]]


def test_suite_all_sl3_minimal(tmp_path):
    argv = ["suite", "all", "--alg", "sl3:[2,1]", "--rep", "natural", "--max-deg", "6",
            "--depth", "3", "--weight", "5/7"]
    assert run(argv + ["--out", str(tmp_path / "a")]) == 0
    assert run(argv + ["--out", str(tmp_path / "b")]) == 0
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert "summary.json" in files and len(files) == 9
    for name in files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary["status"] == "pass" and summary["total_checks"] > 0


def test_cache_reused(cache):
    argv = ["walg", "dims", "--alg", "sl2:[2]", "--max-deg", "6"]
    code, first = run_json(argv)
    files = list(cache.glob("walg-*.json"))
    assert code == 0 and len(files) == 1
    stamp = files[0].stat().st_mtime_ns
    code, second = run_json(argv)
    assert code == 0 and first == second
    assert files[0].stat().st_mtime_ns == stamp
    code, third = run_json(argv + ["--no-cache"])
    assert third == first


def test_check_failure_exit_code(tmp_path):
    data = spec_to_json(parse_alg_arg("sl2:[2]"))
    data["bracket"][0][3] = "3"
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(data))
    code, out = run_json(["alg", "build", "--alg", str(path)])
    assert code == 1
    failed = [c for c in out["reports"][0]["checks"] if c["status"] != "pass"]
    assert failed and failed[0]["counterexample"]
    assert out["summary"]["status"] == "fail"


@pytest.mark.parametrize("argv", [
    ["walg", "gens", "--alg", "sl2:[2]", "--max-deg", "2"],
    ["walg", "gens", "--alg", "sl2"],
    ["alg", "build", "--alg", "sl4:[5]"],
    ["trans", "act", "--alg", "sl2:[2]", "--rep", "spin"],
    ["trans", "act", "--alg", "sl2:[2]", "--rep", "/nonexistent/rep.json"],
    ["suite", "all", "--alg", "sl2:[2]", "--suite", "walg,nope"],
    ["suite", "all", "--alg", "sl2:[2]", "--depth", "-1"],
    ["frobnicate", "now"],
])
def test_config_errors(argv):
    assert run(argv, stream=io.StringIO()) == 2


def test_empty_suite_summary(tmp_path):
    code, out = run_json(["suite", "all", "--alg", "sl2:[2]", "--suite", ""])
    assert code == 0
    assert out["summary"]["total_checks"] == 0 and out["reports"] == []
    cfg = JobConfig(alg="sl2:[2]", reps=["natural"], max_deg=4, depth=0, weight=None, suites=[],
                    out=None, cache=False, seed=0)
    emit_report([], str(tmp_path / "r"))
    summary = json.loads((tmp_path / "r" / "summary.json").read_text())
    assert summary == {"schema": SCHEMA, "status": "pass", "suites": [], "total_checks": 0}
    r = Report("x", cfg)
    r.check("failing", False, {"witness": 1})
    assert not r.passed and r.to_json()["checks"][0]["counterexample"] == {"witness": 1}
