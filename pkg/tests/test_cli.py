import io
import json
import subprocess
import sys

import pytest

from ffec.cli import main, parse_curve_arg


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def test_parse_curve_arg_forms(tmp_path):
    assert parse_curve_arg("q=5; A=t; B=1") == {"q": "5", "A": "t", "B": "1"}
    assert parse_curve_arg('{"q": 7, "A": "t", "B": "1"}')["q"] == 7
    assert parse_curve_arg("q=5; a=0|-1-t|0|t|0")["a"] == ["0", "-1-t", "0", "t", "0"]
    f = tmp_path / "c.json"
    f.write_text('{"q": 5, "A": "t", "B": "1", "label": "file"}')
    assert parse_curve_arg(str(f))["label"] == "file"


def test_analyze_ok_and_deterministic():
    code, a = run("analyze", "q=5; A=t; B=1", "--no-timing")
    assert code == 0
    _, b = run("analyze", "q=5; A=t; B=1", "--no-timing")
    assert a == b
    rep = json.loads(a)
    assert rep["status"] == "OK" and "timing" not in rep
    assert rep["lattice"]["rank"] == 1 and rep["lfunction"]["r_an"] == 1


def test_analyze_markdown():
    code, text = run("analyze", "q=5; a=0|-1-t|0|t|0", "--markdown")
    assert code == 0 and text.startswith("#")


def test_exit_codes_for_bad_input():
    assert run("analyze", "q=5; A=t")[0] == 1
    assert run("analyze", "{broken")[0] == 1
    assert run("analyze", "q=9; A=t; B=1")[0] == 1
    assert run("analyze", "q=5; A=t^2; B=t^3")[0] == 3
    assert run("heights", "q=5; A=t; B=1", "--point", "0")[0] == 1
    assert run("heights", "q=5; A=t; B=1", "--point", "0,2")[0] == 1


def test_tighter_tolerance_gives_same_verdicts():
    _, a = run("analyze", "q=5; A=t; B=1", "--no-timing")
    _, b = run("analyze", "q=5; A=t; B=1", "--no-timing", "--tol", "1e-12")
    ra, rb = json.loads(a), json.loads(b)
    assert ra["bounds"]["regulator_bound"]["holds"] == rb["bounds"]["regulator_bound"]["holds"]
    assert [g["holds"] for g in ra["bounds"]["height_gap"]] == [g["holds"] for g in rb["bounds"]["height_gap"]]


def test_batch_with_malformed_row(tmp_path):
    corpus = [
        {"label": "good", "q": 5, "A": "t", "B": "1"},
        {"label": "broken", "q": 5, "A": "t"},
        {"label": "iso", "q": 5, "A": "t^2", "B": "t^3"},
    ]
    f = tmp_path / "corpus.json"
    f.write_text(json.dumps(corpus))
    code, text = run("batch", str(f), "--no-lfunc")
    assert code == 0
    s = json.loads(text)
    assert s["analyzed"] == 1
    assert [(e["label"], e["status"]) for e in s["errors"]] == [("broken", "ERROR"), ("iso", "ISOTRIVIAL")]


def test_batch_empty_and_missing(tmp_path):
    f = tmp_path / "empty.json"
    f.write_text("[]")
    code, text = run("batch", str(f))
    assert code == 0 and json.loads(text)["curves"] == 0
    assert run("batch", str(tmp_path / "nope.json"))[0] == 1


def test_batch_jobs_preserve_order(tmp_path):
    corpus = [{"label": f"c{i}", "q": 7, "A": "t", "B": str(i)} for i in range(1, 4)]
    f = tmp_path / "c.json"
    f.write_text(json.dumps(corpus))
    _, one = run("batch", str(f), "--no-timing", "--full", "--no-lfunc")
    _, two = run("batch", str(f), "--no-timing", "--full", "--no-lfunc", "--jobs", "2")
    assert one == two


def test_friedman(tmp_path):
    code, text = run("friedman")
    assert code == 0 and json.loads(text)["all_hold"]
    single = tmp_path / "q.csv"
    single.write_text("label,d,r1,r2,regulator,w\n1.1.1.1,1,1,0,1,2\n")
    code, text = run("friedman", str(single))
    rec = json.loads(text)["records"]
    assert code == 0 and len(rec) == 1 and rec[0]["ineq1"]["lhs"] == 0.5
    empty = tmp_path / "e.csv"
    empty.write_text("")
    code, text = run("friedman", str(empty))
    assert code == 0 and json.loads(text)["records"] == []
    failing = tmp_path / "f.csv"
    failing.write_text("label,d,r1,r2,regulator,w\ntoy,2,2,0,0.001,2\nbad,2,2,0,x,2\n")
    code, text = run("friedman", str(failing), "--markdown")
    assert code == 2 and "FAIL" in text and "rejected" in text


def test_lfunc_and_heights():
    code, text = run("lfunc", "q=7; A=t; B=1", "--audit-max-Y", "4")
    rep = json.loads(text)
    assert code == 0 and rep["r_an"] == 1 and len(rep["audits"]) == 4
    code, text = run("heights", "q=5; A=t; B=1", "--search-bound", "1", "--pairings")
    rep = json.loads(text)
    assert code == 0 and [p["hhat"]["exact"] for p in rep["points"]] == ["1/4", "1/4"]
    assert rep["pairings"] == [["1/4", "-1/4"], ["-1/4", "1/4"]]


@pytest.mark.slow
def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ffec.cli", "analyze", "q=5; A=t; B=1", "--no-timing"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["status"] == "OK"
