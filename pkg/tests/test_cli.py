from __future__ import annotations

import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confkernel import catalog
from confkernel.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


@pytest.fixture
def files(tmp_path):
    good_map = tmp_path / "good.map"
    good_map.write_text("map d parity even\nimage L = 1 * H\n")
    bad_map = tmp_path / "bad.map"
    bad_map.write_text("map d parity even\nimage L = 1 * L\n")
    broken = tmp_path / "broken.map"
    broken.write_text("map d parity even\nimage L = (del + * H\n")
    alg = tmp_path / "ns.alg"
    catalog.save(catalog.build("NS"), alg)
    bad_alg = tmp_path / "bad.alg"
    bad_alg.write_text("algebra X\ngen L even\ngen G odd\nbracket G G = (1) * G\n")
    return {"good": good_map, "bad": bad_map, "broken": broken, "alg": alg, "bad_alg": bad_alg}


class TestCheck:
    def test_algebra_symbolic(self, capsys):
        assert run(capsys, "check", "algebra", "--builtin", "HVS2", "--symbolic")[0] == EXIT_OK

    def test_module(self, capsys):
        assert run(capsys, "check", "module", "--builtin", "T7.3-M5", "--param", "a=1")[0] == EXIT_OK

    def test_bad_map_lists_residuals(self, capsys, files):
        code, rec = run_json(capsys, "check", "map", "--file", str(files["bad"]), "--algebra", "HVS")
        assert code == EXIT_FAIL and not rec["passed"]
        assert any(r.get("residuals") for r in rec["results"])

    def test_good_map(self, capsys, files):
        assert run(capsys, "check", "map", "--file", str(files["good"]), "--algebra", "HVS")[0] == EXIT_OK

    def test_parse_error(self, capsys, files):
        assert run(capsys, "check", "map", "--file", str(files["broken"]), "--algebra", "HVS")[0] == EXIT_INPUT

    def test_algebra_file(self, capsys, files):
        assert run(capsys, "check", "algebra", "--file", str(files["alg"]))[0] == EXIT_OK
        assert run(capsys, "check", "algebra", "--file", str(files["bad_alg"]))[0] == EXIT_INPUT

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "check", "algebra", "--file", str(tmp_path / "nope.alg"))[0] == EXIT_INPUT

    def test_schema_error(self, capsys):
        assert run(capsys, "check", "algebra", "--builtin", "HVS", "--param", "alpha=0")[0] == EXIT_INPUT
        assert run(capsys, "check", "algebra", "--builtin", "nope")[0] == EXIT_INPUT

    def test_bimap(self, capsys, tmp_path):
        f = tmp_path / "c.bimap"
        f.write_text("bimap c parity odd\nvalue L L = (del + 2*lam) * E\n")
        args = ["check", "bimap", "--file", str(f), "--algebra", "HVS2"]
        assert run(capsys, *args, "--param", "beta=2", "--param", "gamma=0", "--param", "tau=0")[0] == EXIT_OK
        assert run(capsys, *args, "--param", "beta=2", "--param", "gamma=1", "--param", "tau=0")[0] == EXIT_FAIL


class TestSolve:
    def test_derivations(self, capsys):
        code, rec = run_json(capsys, "solve", "derivations", "--algebra", "HVS", "--alpha", "2",
                             "--parity", "even", "--bound", "3")
        assert code == EXIT_OK and rec["results"][0]["outer_dim"] == 1

    def test_keyeq(self, capsys):
        code, rec = run_json(capsys, "solve", "keyeq", "--a", "1", "--b", "0", "--c", "0", "--bound", "4")
        assert code == EXIT_OK and rec["results"][0]["dim"] == 2

    def test_keyeq_rational_flags(self, capsys):
        code, rec = run_json(capsys, "solve", "keyeq", "--a", "3/2", "--b", "2", "--c", "1")
        assert code == EXIT_OK and rec["results"][0]["dim"] == 0

    def test_biderivations(self, capsys):
        code, rec = run_json(capsys, "solve", "biderivations", "--algebra", "HVS2", "--beta", "2",
                             "--gamma", "0", "--tau", "0", "--bound", "3")
        assert code == EXIT_OK and rec["results"][0]["dim"] == 2

    def test_modules(self, capsys):
        code, rec = run_json(capsys, "solve", "modules", "--algebra", "HVS2", "--beta", "1", "--gamma", "0",
                             "--tau", "0", "--delta0", "2", "--delta1", "1", "--a", "0")
        assert code == EXIT_OK and rec["results"][0]["dim"] == 1

    def test_symbolic_refused(self, capsys):
        assert run(capsys, "solve", "derivations", "--algebra", "HVS2", "--beta", "1")[0] == EXIT_INPUT

    def test_bad_rational(self, capsys):
        assert run(capsys, "solve", "keyeq", "--a", "x/2", "--b", "0", "--c", "0")[0] == EXIT_INPUT


class TestReports:
    def test_catalog_list(self, capsys):
        code, out = run(capsys, "catalog", "list")
        assert code == EXIT_OK and "HVS2" in out and "T7.4-M10" in out

    def test_json_schema(self, capsys):
        _, rec = run_json(capsys, "check", "algebra", "--builtin", "NS")
        assert rec["schema"] == 1 and rec["command"] == ["check", "algebra"]
        assert len(rec["input"]["digest"]) == 16

    def test_report_rerender(self, capsys, tmp_path):
        out = tmp_path / "r.json"
        code, text = run(capsys, "solve", "keyeq", "--a", "1", "--b", "0", "--c", "1", "--output", str(out))
        assert code == EXIT_OK
        assert run(capsys, "report", str(out), "--format", "text") == (EXIT_OK, text)
        code, js = run(capsys, "report", str(out), "--format", "json")
        assert js == out.read_text()

    def test_text_and_json_agree(self, capsys):
        _, text = run(capsys, "solve", "keyeq", "--a", "1", "--b", "0", "--c", "0")
        _, rec = run_json(capsys, "solve", "keyeq", "--a", "1", "--b", "0", "--c", "0")
        for poly in rec["results"][0]["basis"]:
            assert f"- {poly}" in text
        assert f"dim: {rec['results'][0]['dim']}" in text

    @pytest.mark.parametrize("argv", [
        ["check", "algebra", "--builtin", "HVS2", "--symbolic"],
        ["solve", "derivations", "--algebra", "HVS2", "--beta", "1", "--gamma", "0", "--tau", "0",
         "--parity", "both", "--bound", "2", "--no-stability"],
        ["check", "module", "--builtin", "T7.4-M4", "--param", "beta=2"],
    ])
    def test_byte_identical(self, capsys, argv):
        first = run(capsys, *argv, "--format", "json")
        second = run(capsys, *argv, "--format", "json")
        assert first == second
        assert run(capsys, *argv) == run(capsys, *argv)

    def test_thread_cap_does_not_change_output(self, capsys, monkeypatch):
        argv = ["check", "algebra", "--builtin", "HVS2", "--symbolic", "--format", "json"]
        monkeypatch.setenv("CONFKERNEL_THREADS", "1")
        one = run(capsys, *argv)
        monkeypatch.setenv("CONFKERNEL_THREADS", "4")
        assert run(capsys, *argv) == one

    def test_console_script(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "confkernel.cli", "solve", "keyeq", "--a", "1", "--b", "0",
                               "--c", "1"], capture_output=True, text=True)
        assert proc.returncode == EXIT_OK and "x^2 + x*y" in proc.stdout and "elapsed" in proc.stderr


FIXTURES = {
    "pass": (["check", "algebra", "--builtin", "Vir"], EXIT_OK),
    "pass-module": (["check", "module", "--builtin", "Vir-M", "--param", "Delta=1", "--param", "a=0"], EXIT_OK),
    "fail-map": (None, EXIT_FAIL),
    "fail-bimap": (None, EXIT_FAIL),
    "parse": (None, EXIT_INPUT),
    "schema": (["check", "module", "--builtin", "T7.3-Mabc", "--param", "b=0"], EXIT_INPUT),
}


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(sorted(FIXTURES)), st.sampled_from(["text", "json"]))
def test_exit_code_contract(tmp_path_factory, kind, fmt):
    tmp = tmp_path_factory.mktemp("cli")
    argv, want = FIXTURES[kind]
    if kind == "fail-map":
        (tmp / "m.map").write_text("map d parity even\nimage H = 1 * L\n")
        argv = ["check", "map", "--file", str(tmp / "m.map"), "--algebra", "HV"]
    elif kind == "fail-bimap":
        (tmp / "b.bimap").write_text("bimap p\nvalue L L = 1 * L\n")
        argv = ["check", "bimap", "--file", str(tmp / "b.bimap"), "--algebra", "Vir"]
    elif kind == "parse":
        (tmp / "x.alg").write_text("algebra X\ngen L even\nbracket L L = del + \n")
        argv = ["check", "algebra", "--file", str(tmp / "x.alg")]
    assert main(argv + ["--format", fmt]) == want
