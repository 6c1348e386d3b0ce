import json
import subprocess
import sys
from importlib import resources

import pytest

from serrelab.cli import main

FIX = resources.files("serrelab") / "fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def records(out):
    return [json.loads(line) for line in out.splitlines()]


def test_json_schema(capsys):
    code, out = run(capsys, "conj", str(FIX / "hnn.gg"), "--left", "t x t^-1", "--right", "x", "--format", "json")
    assert code == 0
    (rec,) = records(out)
    assert list(rec) == ["task", "status", "seed", "timing_ms", "detail"]
    assert rec["status"] == "verified" and rec["detail"]["certificate_verified"]
    assert isinstance(rec["timing_ms"], int)


def test_refuted_exit_status(capsys):
    code, out = run(capsys, "conj", "--left", "a b", "--right", "a b^-1", "--format", "json")
    assert code == 1 and records(out)[0]["status"] == "refuted"
    code, out = run(capsys, "conj", "--left", "a b", "--right", "b^-1 a^-1", "--pm", "--format", "json")
    assert code == 0


def test_parse_error_exit_status(tmp_path, capsys):
    f = tmp_path / "bad.gg"
    f.write_text("alphabet F { a, a }\n")
    code, out = run(capsys, "check", str(f), "--format", "json")
    assert code == 2
    rec = records(out)[0]
    assert rec["status"] == "error" and "1:" in rec["detail"]["error"]


def test_invalid_graph_is_refuted(tmp_path, capsys):
    f = tmp_path / "g.gg"
    f.write_text("alphabet F { a }\ngraph X {\n  vertex P = free F\n  edge e : P.(a) -- P.(a) tree\n  base P\n}\n")
    code, out = run(capsys, "check", str(f), "--format", "json")
    assert code == 1 and records(out)[0]["status"] == "refuted"


def test_missing_file(capsys):
    code, out = run(capsys, "check", "/nonexistent/file.gg")
    assert code == 2 and "error" in out


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("SERRELAB_SEED", "41")
    _, out = run(capsys, "conj", "--left", "a", "--right", "b", "--format", "json")
    assert records(out)[0]["seed"] == 41
    _, out = run(capsys, "conj", "--left", "a", "--right", "b", "--format", "json", "--seed", "3")
    assert records(out)[0]["seed"] == 3


def test_report_is_byte_stable(capsys):
    argv = ["report", str(FIX / "centralizer.gg"), "--format", "json", "--no-timing", "--seed", "5"]
    _, first = run(capsys, *argv)
    _, second = run(capsys, *argv)
    assert first == second
    _, parallel = run(capsys, *argv, "--jobs", "2")
    assert parallel == first


def test_task_statuses(capsys):
    code, out = run(capsys, "report", str(FIX / "centralizer.gg"), "--format", "json", "--no-timing")
    recs = {r["task"]: r for r in records(out)}
    assert recs["separate:generators"]["status"] == "verified"
    assert recs["separate:generators"]["seed"] == 7
    assert recs["discriminate:killed_once"]["detail"]["minimal_n"] == 2
    assert code == 0


def test_single_task_selection(capsys):
    code, out = run(capsys, "separate", str(FIX / "towers.gg"), "--task", "ice_sep", "--format", "json")
    (rec,) = records(out)
    assert rec["task"] == "separate:ice_sep" and code == 0


def test_verify_magnus_pair(capsys):
    code, out = run(capsys, "verify", "magnus-pair", "--format", "json")
    assert code == 0 and records(out)[0]["status"] == "verified"
    code, out = run(capsys, "verify", "magnus-pair", "--file", str(FIX / "magnus.gg"), "--format", "json")
    assert code == 0


def test_verify_c_double_small(capsys):
    code, out = run(capsys, "verify", "c-double", "--count", "12", "--pairs", "4", "--format", "json")
    rec = records(out)[0]
    assert code == 0 and rec["detail"]["mirror_pairs"] == 4


def test_text_format(capsys):
    _, out = run(capsys, "conj", "--left", "a b", "--right", "b a", "--no-timing")
    assert out.startswith("conj: verified (seed 0)")


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "serrelab", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "serrelab" in out.stdout


@pytest.mark.parametrize("fixture", ["free.gg", "amalgam.gg", "hnn.gg", "towers.gg", "cdouble.gg"])
def test_fixture_reports_succeed(fixture, capsys):
    code, out = run(capsys, "report", str(FIX / fixture), "--format", "json", "--no-timing")
    assert all(r["status"] != "error" for r in records(out)), out
