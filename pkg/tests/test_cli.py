import csv
import hashlib
import json
import subprocess
import sys

import pytest

from votingpower.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_power_table(capsys):
    code, out, _ = run(["power", "--game", "[3;2,1,1]", "--index", "banzhaf"], capsys)
    assert code == 0
    assert "3/5" in out and "0.600000" in out
    assert out.count("1/5") == 2


def test_power_json_and_manifest(tmp_path, capsys):
    out = tmp_path / "p.json"
    code, _, _ = run(["power", "--game", "[3;2,1,1]", "--index", "ssi", "--out", str(out)], capsys)
    assert code == 0
    data = json.loads(out.read_text())
    assert "2/3" in json.dumps(data)
    manifest = json.loads((tmp_path / "p.json.manifest.json").read_text())
    for key in ("command", "argv", "flags", "seed", "tool_version", "input_digests", "start", "end"):
        assert key in manifest
    assert manifest["input_digests"]["game"] == hashlib.sha256(b"[3;2,1,1]").hexdigest()


def test_parse_error_exit_code(capsys):
    code, _, err = run(["power", "--game", "[3;x]", "--index", "banzhaf"], capsys)
    assert code == 2
    assert "error" in err.lower()


def test_argparse_error_exit_code(capsys):
    code, _, err = run(["enumerate"], capsys)
    assert code == 2
    assert "--n" in err


def test_unsupported_exit_code(capsys):
    code, _, err = run(["power", "--game", "[12;" + ",".join(["1"] * 23) + "]", "--index", "pgi"], capsys)
    assert code == 3
    assert "envelope" in err.lower() or "supports" in err.lower() or "outside" in err.lower()


def test_enumerate_csv(capsys):
    code, out, _ = run(["enumerate", "--n", "1,2,3,4", "--class", "simple"], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    assert list(rows[0]) == ["n", "class", "up_to_iso", "count", "seconds"]
    assert [int(r["count"]) for r in rows] == [1, 4, 18, 166]


def test_enumerate_iso_all(capsys):
    code, out, _ = run(["enumerate", "--n", "4", "--class", "all", "--iso"], capsys)
    rows = list(csv.DictReader(out.splitlines()))
    assert {(r["class"], int(r["count"])) for r in rows} == {("simple", 28), ("complete", 25), ("weighted", 25)}


def test_inverse_bound(capsys):
    code, out, _ = run(["inverse", "--target", "3/4,1/4,0,0,0", "--method", "bound", "--k", "2"], capsys)
    assert code == 0
    assert "26491/200000" in out


def test_inverse_exhaustive_json(tmp_path, capsys):
    out = tmp_path / "inv.json"
    code, _, _ = run(["inverse", "--target", "1/3,1/3,1/3", "--out", str(out)], capsys)
    data = json.loads(out.read_text())
    assert code == 0
    assert data["distance"] == "0"
    assert data["certificate"] == "exact-optimal"


def test_inverse_bad_target(capsys):
    code, _, _ = run(["inverse", "--target", "1/2,1/3"], capsys)
    assert code == 2


def test_limits_psi_csv(tmp_path, capsys):
    out = tmp_path / "psi.csv"
    code, _, _ = run(["limits", "psi", "--n", "3", "--index", "ssi", "--out", str(out)], capsys)
    assert code == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0] == ["n", "quantity", "value_num", "value_den", "verdict"]
    lhs = [r for r in rows[1:] if r[1] == "lhs"][0]
    assert (lhs[2], lhs[3]) == ("4", "15")
    assert (tmp_path / "psi.summary.json").exists()


def test_limits_psi_refuses_msr(capsys):
    code, _, _ = run(["limits", "psi", "--n", "3", "--index", "msr"], capsys)
    assert code == 3


def test_limits_plt_runs(capsys):
    code, out, _ = run(["limits", "plt", "--ocean", "2,1", "--steps", "11,21", "--index", "banzhaf"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "n,quantity,value_num,value_den,verdict"


def test_verify_c3_counterexample(tmp_path, capsys):
    out = tmp_path / "c3.json"
    code, _, _ = run(["verify", "C3", "--samples", "40", "--out", str(out)], capsys)
    assert code == 4
    report = json.loads(out.read_text())
    assert report["verdict"] == "counterexample"
    assert report["beyond_desk_scale"]
    assert (tmp_path / "c3.counterexample.json").exists()
    assert (tmp_path / "c3.json.manifest.json").exists()


def test_reproducible_payload(tmp_path, capsys):
    digests = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        main(["limits", "nucbound", "--samples", "20", "--n-max", "6", "--seed", "5", "--out", str(out)])
        digests.append(hashlib.sha256(out.read_bytes()).hexdigest())
    capsys.readouterr()
    assert digests[0] == digests[1]


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "votingpower", "power", "--game", "[2;1,1,1]", "--index", "ssi"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0
    assert "1/3" in res.stdout
