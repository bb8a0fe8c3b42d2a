import json
import subprocess
import sys

import pytest

from lpdecode.cli import main

FRAC_MATRIX = "Z3\n2 3\n0 2 2\n1 1 1\n"
FRAC_COSTS = "3 -3\n-3 -2\n3 1\n"
REP_MATRIX = "Z3\n1 2\n1 2\n"


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_decode_certified(files, capsys):
    m, c = files("h.txt", REP_MATRIX), files("c.txt", "-1 0\n0 0\n")
    code, out = run(["decode", "--matrix", m, "--costs", c], capsys)
    assert code == 0
    assert "outcome ml-certified" in out and "word 1 1" in out and "objective -1" in out


@pytest.mark.parametrize("poly", ["q", "u", "s"])
def test_decode_fractional(files, capsys, poly):
    m, c = files("h.txt", FRAC_MATRIX), files("c.txt", FRAC_COSTS)
    code, out = run(["decode", "--matrix", m, "--costs", c, "--polytope", poly], capsys)
    assert code == 10 and "objective -10/3" in out


def test_decode_channel_mode(files, capsys):
    m = files("h.txt", REP_MATRIX)
    ch = files("ch.json", json.dumps({"kind": "qsc", "p": "1/10"}))
    y = files("y.txt", "2 2\n")
    code, out = run(["decode", "--matrix", m, "--channel", ch, "--received", y], capsys)
    assert code == 0 and "word 2 2" in out


def test_operational_errors(files, capsys):
    assert main(["decode", "--matrix", "/nonexistent/h.txt", "--costs", "/nonexistent/c"]) == 20
    m = files("h.txt", REP_MATRIX)
    bad = files("c.txt", "1 2 3\n0 0 0\n")
    assert main(["decode", "--matrix", m, "--costs", bad]) == 20
    assert main(["decode", "--matrix", files("z.txt", "Z3\n1 2\n1\n")]) == 20
    capsys.readouterr()


def test_usage_errors(files, capsys):
    m, c = files("h.txt", REP_MATRIX), files("c.txt", "-1 0\n0 0\n")
    assert main(["decode", "--matrix", m]) == 2
    assert main(["compare", "--matrix", m, "--costs", c, "--polytope", "q"]) == 2
    assert main(["compare", "--matrix", m, "--trials", "3"]) == 2
    assert main(["simulate", "--matrix", m]) == 2
    assert main(["decode", "--matrix", m, "--costs", c, "--polytope", "x"]) == 2
    assert main(["decompose"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["nosuchcommand"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_compare(files, capsys):
    m = files("h.txt", FRAC_MATRIX)
    c = files("c.txt", FRAC_COSTS)
    code, out = run(["compare", "--matrix", m, "--costs", c, "--seed", "4", "--trials", "5"], capsys)
    assert code == 0
    assert out.splitlines()[1] == "0 -10/3 -10/3 -10/3 equal"
    assert out.splitlines()[-1] == "equal 6/6"


def test_counts(files, capsys):
    m = files("h.txt", "GF(2^2)\n2 5\n1 2 3 1 0\n0 1 1 1 1\n")
    code, out = run(["counts", "--matrix", m], capsys)
    assert code == 0 and "Q" in out and "U" in out and "S" in out


def test_counts_violation(files, capsys):
    # zero-divisor entries push the local code above the Q bound
    m = files("h.txt", "Z4\n1 2\n2 2\n")
    code, _ = run(["counts", "--matrix", m, "--polytope", "q"], capsys)
    assert code == 30


def test_simulate(files, capsys):
    m = files("h.txt", "Z3\n2 4\n1 2 1 0\n0 1 1 1\n")
    ch = files("ch.json", json.dumps({"kind": "qsc", "p": "1/1000000"}))
    code, out = run(["simulate", "--matrix", m, "--channel", ch, "--seed", "1", "--trials", "100"], capsys)
    assert code == 0
    assert "trials 100" in out and "word_errors 0" in out and "symbol_errors 0" in out
    code, again = run(["simulate", "--matrix", m, "--channel", ch, "--seed", "1", "--trials", "100",
                       "--jobs", "2"], capsys)
    assert again == out
    code, out = run(["simulate", "--matrix", m, "--channel", ch, "--seed", "1", "--trials", "0"], capsys)
    assert code == 0 and "word_error_rate n/a" in out


def test_lift(files, capsys, tmp_path):
    m = files("h.txt", "Z3\n2 4\n1 2 1 0\n0 1 1 1\n")
    c = files("c.txt", "1 -2\n-1 1/2\n0 -1\n2 -3\n")
    out_path = tmp_path / "w.txt"
    assert main(["lift", "--matrix", m, "--costs", c, "--out", str(out_path)]) == 0
    assert "lift feasible" in capsys.readouterr().err
    assert out_path.read_text().strip()


def test_decompose(files, capsys):
    t = files("t.txt", "ring Z3\nM 2\nk 1 1\nx 1 1\nx 1 1\n")
    code, out = run(["decompose", "--tables", t], capsys)
    assert code == 0 and out == "w 1 1 2\nw 1 2 1\n"
    bad = files("b.txt", "ring Z3\nM 1\nk 2 0\nx 1 1\nx 0 0\n")
    assert main(["decompose", "--tables", bad]) == 20
    capsys.readouterr()


def test_selftest_deterministic(capsys):
    code, first = run(["selftest", "--seed", "3", "--trials", "4", "--costs-per", "2"], capsys)
    assert code == 0
    _, second = run(["selftest", "--seed", "3", "--trials", "4", "--costs-per", "2"], capsys)
    assert first == second and "objectives_equal 8" in first


def test_module_entry_point(files):
    m, c = files("h.txt", FRAC_MATRIX), files("c.txt", FRAC_COSTS)
    proc = subprocess.run([sys.executable, "-m", "lpdecode", "decode", "--matrix", m, "--costs", c],
                          capture_output=True, text=True)
    assert proc.returncode == 10 and "outcome fractional" in proc.stdout
