import csv
import io
import json

import pytest

from blochlab.cli import run


def call(argv, capsys):
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_constants(capsys):
    code, out, _ = call(["constants"], capsys)
    rows = dict(list(csv.reader(io.StringIO(out)))[1:])
    assert code == 0
    assert rows["L"] == "0.089760773373162683"
    assert rows["c_upper_band"].startswith("28.90")
    assert len(rows["c_lower_h"].replace("0.0", "", 1)) == 17


def test_constants_json(capsys):
    code, out, _ = call(["constants", "--format", "json"], capsys)
    d = json.loads(out)
    assert code == 0 and d["result"]["ratio_cap"] == pytest.approx(0.5518191617571635)


def test_monomials(capsys):
    code, out, _ = call(["monomials", "--j-max", "12"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "j,s_j,norm,residual,method" and len(lines) == 13
    assert lines[12].endswith(",root_find") and lines[1].endswith(",global_scan")


def test_monomials_list_json(capsys):
    code, out, _ = call(["monomials", "--j-list", "3,100", "--format", "json"], capsys)
    d = json.loads(out)
    assert code == 0 and [r["j"] for r in d["result"]] == [3, 100]
    assert d["result"][0]["residual"] is None


def test_monomials_needs_range(capsys):
    assert call(["monomials"], capsys)[0] == 2


def test_quotients_identity(capsys):
    code, out, _ = call(["quotients", "--symbol", "id", "--weight", "vlog", "--j-max", "20"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 20
    assert all(abs(float(r["q"]) - 1) <= 1e-6 for r in rows)


def test_quotients_out_writes_sidecar(tmp_path, capsys):
    path = tmp_path / "q.csv"
    code, out, _ = call(["quotients", "--symbol", "dilate:0.5", "--j-max", "5", "--out", str(path),
                         "--n-radii", "128"], capsys)
    assert code == 0 and out == ""
    assert path.read_text().startswith("j,q,")
    meta = json.loads((tmp_path / "q.csv.meta.json").read_text())
    assert meta["config"]["grid"]["n_radii"] == 128 and meta["config"]["symbol"] == "dilate:0.5"
    assert "timestamp" not in meta["meta"]


def test_stamp_is_opt_in(capsys):
    code, out, _ = call(["constants", "--format", "json", "--stamp"], capsys)
    assert "timestamp" in json.loads(out)["meta"]


def test_identical_argv_identical_bytes(capsys):
    argv = ["classify", "--symbol", "mobius:0.2,0.1", "--j-max", "12", "--n-radii", "128",
            "--n-angles", "64"]
    assert call(argv, capsys)[1] == call(argv, capsys)[1]


def test_classify(capsys):
    code, out, _ = call(["classify", "--symbol", "dilate:0.5", "--j-max", "40"], capsys)
    d = json.loads(out)
    assert code == 0 and d["result"]["compact_evidence"] == "strong_yes"
    assert d["config"]["policy"]["compact_threshold"] == 1e-3


def test_essnorm(capsys):
    code, out, _ = call(["essnorm", "--symbol", "id", "--j-max", "16", "--tail-fraction", "0.5"], capsys)
    d = json.loads(out)["result"]
    assert code == 0 and d["lower"] == pytest.approx(1.0) and d["upper"] == pytest.approx(28.9, abs=0.01)


def test_essnorm_refuses_unbounded(capsys):
    code, _, err = call(["essnorm", "--symbol", "id", "--weight", "alpha:0", "--j-max", "40"], capsys)
    assert code == 2 and "bounded" in err


def test_weight_equiv(capsys):
    code, out, _ = call(["weight-equiv", "--w1", "logk:1,3", "--w2", "logk:2,3", "--grid", "1000"], capsys)
    d = json.loads(out)["result"]
    assert code == 0 and 0.5 <= d["ratio_min"] <= d["ratio_max"] <= 1.0


def test_annuli(capsys):
    code, out, _ = call(["annuli", "--symbol", "const:0.0,0.0", "--j-max", "3", "--samples", "2000"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[1].startswith("1,") and lines[2] == "2,0"


@pytest.mark.parametrize("argv", [
    ["quotients", "--symbol", "nope:1", "--j-max", "3"],
    ["quotients", "--symbol", "id", "--weight", "alpha:x", "--j-max", "3"],
    ["quotients", "--symbol", "id", "--j-max", "0"],
    ["quotients", "--j-max", "3"],
    ["quotients", "--symbol", "id", "--j-max", "3", "--format", "xml"],
    ["quotients", "--symbol", "id", "--j-max", "3", "--r-max", "1.5"],
    ["frobnicate"],
    [],
])
def test_argument_errors_exit_2(argv, capsys):
    assert call(argv, capsys)[0] == 2


def test_refused_self_map_exit_3(capsys):
    code, _, err = call(["quotients", "--symbol", "poly:0.6,0.6", "--j-max", "3"], capsys)
    assert code == 3 and "--force" in err
    assert call(["annuli", "--symbol", "poly:0.6,0.6", "--j-max", "3"], capsys)[0] == 3


def test_force_overrides(capsys):
    code, out, _ = call(["quotients", "--symbol", "poly:0.6,0.6", "--j-max", "2", "--force",
                         "--n-radii", "64", "--n-angles", "32"], capsys)
    assert code == 0 and len(out.splitlines()) == 3


def test_threads_from_environment(monkeypatch, capsys):
    argv = ["quotients", "--symbol", "mobius:0.3,0.0", "--j-max", "6", "--n-radii", "64", "--n-angles", "32"]
    monkeypatch.setenv("BLOCHLAB_THREADS", "1")
    one = call(argv, capsys)[1]
    monkeypatch.setenv("BLOCHLAB_THREADS", "3")
    assert call(argv, capsys)[1] == one


def test_help_exits_zero(capsys):
    assert call(["--help"], capsys)[0] == 0


def test_verify_fast_reports_every_check(capsys):
    from blochlab.acceptance import CHECKS

    code, out, _ = call(["verify", "--fast"], capsys)
    lines = [ln for ln in out.splitlines() if ln.startswith("[")]
    assert len(lines) == len(CHECKS)
    assert code == (0 if all(ln.startswith("[PASS]") for ln in lines) else 1)
