import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from opbound import cli, verify


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestBound:
    def test_sign_example(self, capsys):
        code, out, _ = run(capsys, "bound", "--fn", "sign.json", "--n", "4", "--x", "1/2", "--bound", "corollary10")
        assert code == 0
        (row,) = rows(out)
        assert list(row) == list(cli.BOUND_COLUMNS)
        assert float(row["total"]) == pytest.approx(0.86794, abs=1e-4)
        assert float(row["actual_error"]) == 0
        assert float(row["slack"]) == pytest.approx(0.86794, abs=1e-4)

    def test_many_bounds_sorted(self, capsys):
        code, out, _ = run(capsys, "bound", "--fn", "jump_plus_linear", "--n", "16", "4", "--x", "2/3", "1/4",
                           "--bound", "zeng", "theorem3", "corollary11", "theorem5", "corollary10")
        assert code == 0
        got = [(int(r["n"]), r["x"], r["bound_name"]) for r in rows(out)]
        assert len(got) == 20
        assert got == sorted(got, key=lambda t: (t[0], Fraction(t[1]), t[2]))
        assert all(float(r["slack"]) >= -1e-10 for r in rows(out))

    def test_sandwich_option(self, capsys):
        args = ("bound", "--fn", "tent_with_jumps", "--n", "9", "--x", "1/3", "--bound", "theorem3")
        _, quad, _ = run(capsys, *args)
        code, sand, _ = run(capsys, *args, "--expectation", "sandwich", "--m-sandwich", "50")
        assert code == 0
        assert float(rows(sand)[0]["total"]) >= float(rows(quad)[0]["total"])

    def test_bojanic_cheng_needs_constant(self, capsys):
        code, _, err = run(capsys, "bound", "--fn", "sign", "--n", "4", "--x", "1/2", "--bound", "bojanic_cheng")
        assert code == 1 and "--M" in err


class TestCompare:
    def test_sign_example(self, capsys):
        code, out, _ = run(capsys, "compare", "--fn", "sign.json", "--n", "4", "--x", "1/2")
        assert code == 0
        (row,) = rows(out)
        assert float(row["corollary10"]) == pytest.approx(0.868, abs=1e-3)
        assert float(row["zeng"]) == 3.0
        assert row["bojanic_cheng"] == ""

    def test_with_constant(self, capsys):
        code, out, _ = run(capsys, "compare", "--fn", "sign", "--n", "100", "--x", "1/2", "--M", "1")
        assert code == 0
        assert float(rows(out)[0]["bojanic_cheng"]) == pytest.approx(0.02, abs=1e-15)


class TestSharpness:
    def test_capped_ramp(self, capsys):
        code, out, _ = run(capsys, "sharpness", "--profile", "capped_ramp.json", "--beta", "1", "--n", "1")
        assert code == 0
        (row,) = rows(out)
        assert float(row["gap"]) < 2e-9
        assert float(row["lhs"]) == pytest.approx(0.63212, abs=1e-5)

    def test_part_b_several_n(self, capsys):
        code, out, _ = run(capsys, "sharpness", "--profile", "slow_ramp", "--part", "b", "--n", "25", "1", "4")
        assert code == 0
        assert [r["n"] for r in rows(out)] == ["1", "4", "25"]


class TestEval:
    def test_bernstein_and_convolution(self, capsys):
        code, out, _ = run(capsys, "eval", "--fn", "sign", "--n", "4", "--x", "1/2", "1/4",
                           "--operator", "bernstein", "convolution")
        assert code == 0
        got = {(r["x"], r["operator"]): float(r["value"]) for r in rows(out)}
        assert got[("1/2", "bernstein")] == 0
        assert got[("1/2", "convolution")] == pytest.approx(0.0, abs=1e-12)
        assert got[("1/4", "bernstein")] == pytest.approx(-(81 + 108) / 256 + (12 + 1) / 256)

    def test_decimal_x_allowed(self, capsys):
        code, out, _ = run(capsys, "eval", "--fn", "sign", "--n", "4", "--x", "0.25")
        assert code == 0 and rows(out)[0]["x"] == "1/4"


class TestSweep:
    ARGS = ("sweep", "--n", "4", "8", "16", "--x", "1/4", "1/2", "2/3", "5/8")

    def test_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(capsys, *self.ARGS, "-o", str(a))[0] == 0
        assert run(capsys, *self.ARGS, "-o", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()
        assert b"\r" not in a.read_bytes()

    def test_thread_count_does_not_change_output(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("OPBOUND_THREADS", "1")
        run(capsys, *self.ARGS, "-o", str(tmp_path / "a.csv"))
        monkeypatch.setenv("OPBOUND_THREADS", "8")
        run(capsys, *self.ARGS, "-o", str(tmp_path / "b.csv"))
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_broken_bound_exits_2(self, capsys, monkeypatch):
        original = verify.BOUND_REGISTRY["corollary10"]

        def shrunk(f, n, x):
            actual, total, detail = original(f, n, x)
            return actual, 0.1 * total, detail

        monkeypatch.setitem(verify.BOUND_REGISTRY, "corollary10", shrunk)
        code, out, _ = run(capsys, *self.ARGS)
        assert code == 2
        assert any(r["pass"] == "false" for r in rows(out))

    def test_single_function(self, capsys):
        code, out, _ = run(capsys, "sweep", "--fn", "sign", "--bound", "corollary11", "--n", "2", "--x", "1/2")
        assert code == 0
        assert [r["function_id"] for r in rows(out)] == ["sign"]

    def test_corpus_file(self, tmp_path, capsys, corpus):
        path = tmp_path / "c.json"
        path.write_text(json.dumps([corpus["constant"].to_spec()]))
        code, out, _ = run(capsys, "sweep", "--corpus", str(path), "--n", "4", "--x", "1/3")
        assert code == 0 and rows(out)[0]["function_id"] == "constant"


class TestInputErrors:
    @pytest.mark.parametrize("argv", [
        ["bound", "--fn", "missing.json", "--n", "4", "--x", "1/2"],
        ["bound", "--fn", "sign", "--n", "4", "--x", "3/2"],
        ["bound", "--fn", "sign", "--n", "4", "--x", "0.5"],
        ["bound", "--fn", "sign", "--n", "0", "--x", "1/2"],
        ["bound", "--fn", "sign", "--x", "1/2"],
        ["sharpness", "--profile", "capped_ramp", "--n", "1", "--beta", "-1"],
        ["sweep", "--corpus", "nowhere", "--n", "4", "--x", "1/2"],
        ["frobnicate"],
    ])
    def test_exit_1(self, capsys, argv):
        assert _exit_code(argv) == 1
        assert capsys.readouterr().err

    def test_malformed_spec_has_location(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"id": "b",\n "domain": {"lo": "0", "hi": "1"},\n "pieces": [{"expr": "import os"}]}')
        code, _, err = run(capsys, "bound", "--fn", str(path), "--n", "4", "--x", "1/2")
        assert code == 1 and "pieces[0].expr" in err

    def test_bad_json_has_line(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{\n "id": \n}')
        code, _, err = run(capsys, "bound", "--fn", str(path), "--n", "4", "--x", "1/2")
        assert code == 1 and "bad.json:3:" in err


def _exit_code(argv):
    # argparse usage errors leave through SystemExit, everything else returns
    try:
        return cli.main(argv)
    except SystemExit as exc:
        return exc.code


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "opbound", "compare", "--fn", "sign", "--n", "4", "--x", "1/2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "n,x,corollary10,zeng,corollary11,bojanic_cheng"
