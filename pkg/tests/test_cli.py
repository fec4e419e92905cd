import csv
import json
import os
import stat
import subprocess
import sys

import pytest

from conftest import GOLDEN, ROWS
from tbcode import gf2_core as gf2
from tbcode.cli import SCHEMA, dispatch

W5 = ROWS["w5_30_4_5"]["spec"]


def run(capsys, *argv):
    code = dispatch(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_help_exits_zero():
    proc = subprocess.run([sys.executable, "-m", "tbcode.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "reproduce-tables" in proc.stdout


def test_user_errors_exit_one(capsys):
    assert run(capsys, "build", "--spec", "l=3 m=5 A=x+w B=y")[0] == 1
    assert run(capsys, "build", "--spec", "no_such_spec")[0] == 1
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "build")[0] == 1
    code, _, err = run(capsys, "distance", "--spec", "l=1 m=1 A=1 B=1")
    assert code == 1 and "NoLogicals" in err


def test_build_json(capsys):
    code, out, _ = run(capsys, "build", "--spec", W5)
    data = json.loads(out)
    assert code == 0
    assert data["schema"] == SCHEMA
    assert (data["n"], data["k"], data["weight"], data["commutes"]) == (30, 4, 5, True)


def test_bundled_spec_names_resolve(capsys):
    code, out, _ = run(capsys, "build", "--spec", "w4_112_8_5")
    assert code == 0 and json.loads(out)["components"] == 4


def test_distance_and_layout(capsys, tmp_path):
    code, out, _ = run(capsys, "distance", "--spec", W5, "--exact")
    data = json.loads(out)
    assert code == 0 and (data["d"], data["certainty"], len(data["witness"])) == (5, "exact", 5)
    assert run(capsys, "distance", "--spec", "w6_48_6_6", "--exact")[0] == 1
    coords = tmp_path / "coords.csv"
    code, out, _ = run(capsys, "layout", "--spec", W5, "--emit-coords", str(coords))
    data = json.loads(out)
    assert code == 0
    assert data["toric"]["mu"] == 5 and data["toric"]["grid"] == [10, 6]
    assert data["biplanar"]["planar1"] and data["biplanar"]["planar2"]
    assert len(list(csv.reader(coords.open()))) == 61
    code, out, _ = run(capsys, "layout", "--spec", "w4_64_2_8", "--tangled", "8,4")
    assert code == 0 and json.loads(out)["tangled"]["tau"] == list(range(8))


def test_simulate_then_fit(capsys, tmp_path):
    table = tmp_path / "pts.csv"
    jsonl = tmp_path / "pts.jsonl"
    code, _, _ = run(capsys, "simulate", "--spec", "w6_30_6_4", "--p", "0.02,0.04,0.06,0.08,0.1",
                     "--target-failures", "30", "--max-shots", "20000", "--seed", "2",
                     "--csv", str(table), "--out", str(jsonl))
    assert code == 0
    lines = [json.loads(x) for x in jsonl.read_text().splitlines()]
    assert [r["p"] for r in lines] == [0.02, 0.04, 0.06, 0.08, 0.1]
    manifest = json.loads((tmp_path / "pts.jsonl.manifest.json").read_text())
    assert manifest["seed"] == 2 and manifest["schema"] == SCHEMA and manifest["spec_hash"]
    code, out, _ = run(capsys, "fit", "--in", str(table), "--k", "6")
    data = json.loads(out)
    assert code == 0 and {"d_fit", "c0", "c1", "c2", "p0", "p0_k", "p_l_1e-4"} <= set(data)


def test_fit_with_too_few_points(capsys, tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("p,p_l\n0.01,0.001\n")
    assert run(capsys, "fit", "--in", str(f))[0] == 1


def test_export_round_trip(capsys, tmp_path):
    code, _, _ = run(capsys, "export-check-matrices", "--spec", W5, "--out-dir", str(tmp_path))
    assert code == 0
    hx = gf2.load(tmp_path / "h_x.txt")
    assert (hx.rows, hx.cols) == (15, 30)
    assert json.loads((tmp_path / "manifest.json").read_text())["outputs"]


def test_read_only_directory_is_a_user_error(capsys, tmp_path):
    ro = tmp_path / "ro"
    ro.mkdir()
    os.chmod(ro, stat.S_IRUSR | stat.S_IXUSR)
    try:
        assert run(capsys, "export-check-matrices", "--spec", W5, "--out-dir", str(ro))[0] == 1
        assert run(capsys, "baseline", "--surface-d", "3", "--out-dir", str(ro))[0] == 1
    finally:
        os.chmod(ro, stat.S_IRWXU)


def test_baseline(capsys):
    code, out, _ = run(capsys, "baseline", "--surface-d", "3")
    data = json.loads(out)
    assert code == 0 and (data["n"], data["k"]) == (9, 1)


def _small_golden(tmp_path, corrupt: bool):
    rows = [dict(ROWS[r]) for r in ("w5_30_4_5", "w6_30_6_4")]
    if corrupt:
        rows[1]["d"] = 5
    path = tmp_path / "golden.json"
    path.write_text(json.dumps({**GOLDEN, "rows": rows}))
    return path


def test_reproduce_tables_subset(capsys, tmp_path):
    code, out, _ = run(capsys, "reproduce-tables", "--out-dir", str(tmp_path / "ok"),
                       "--golden", str(_small_golden(tmp_path, False)))
    assert code == 0 and out.count("PASS") == 2
    report = json.loads((tmp_path / "ok" / "report.json").read_text())
    assert report["all_pass"]


def test_reproduce_tables_flags_a_corrupted_row(capsys, tmp_path):
    code, out, _ = run(capsys, "reproduce-tables", "--out-dir", str(tmp_path / "bad"),
                       "--golden", str(_small_golden(tmp_path, True)))
    assert code != 0
    assert "FAIL d" in out


def test_search_with_resume(capsys, tmp_path):
    out, ckpt = tmp_path / "hits.jsonl", tmp_path / "ckpt.json"
    args = ["search", "--l", "3", "--m", "3", "--wa", "2", "--wb", "2", "--min-k", "2",
            "--trials", "20", "--all", "--out", str(out), "--resume", str(ckpt)]
    assert run(capsys, *args)[0] == 0
    first = out.read_text().splitlines()
    total = json.loads(ckpt.read_text())["next_index"]
    assert len(first) == total
    # pretend the run stopped halfway, then resume
    keep = total // 2
    out.write_text("".join(line + "\n" for line in first[:keep]))
    ckpt.write_text(json.dumps({"next_index": keep}))
    assert run(capsys, *args)[0] == 0
    assert out.read_text().splitlines() == first


@pytest.mark.slow
def test_reproduce_tables_full(capsys, tmp_path):
    code, out, _ = run(capsys, "reproduce-tables", "--out-dir", str(tmp_path))
    assert code == 0 and out.count("PASS") == len(GOLDEN["rows"])
