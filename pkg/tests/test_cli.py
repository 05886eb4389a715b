import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from sumdilates.circle import parse_intervals
from sumdilates.cli import main
from sumdilates.zp import ZpSet, parse_set


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def setfile(tmp_path):
    def make(text, name="a.set"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return make


def test_verify_cd_p7(capsys):
    code, out, _ = run(capsys, "verify", "cd", "--p", "7")
    assert code == 0
    assert "0 violations / 16129 pairs" in out


def test_construct_cycle(capsys):
    code, out, _ = run(capsys, "construct", "cycle", "--p", "7", "--l1", "1", "--l2", "2")
    assert code == 0
    assert out.startswith("# ")
    assert "k=6" in out.splitlines()[0]
    assert parse_set(out) == ZpSet.from_elements(7, [1, 2, 4])


def test_sumset_empty_file(capsys, setfile):
    code, _, err = run(capsys, "sumset", setfile("p=7\n"))
    assert code == 1 and "empty set" in err


def test_sumset_outputs(capsys, setfile):
    path = setfile("p=101\n10 13 19\n")
    code, out, _ = run(capsys, "sumset", path, "--lambdas", "1,2")
    assert code == 0
    assert "actual=8" in out and "bukh_main=9" in out
    assert parse_set(out).card == 8
    code, out, _ = run(capsys, "sumset", path, "--lambdas", "1,2", "--format", "json")
    doc = json.loads(out)
    assert doc["report"]["actual"] == len(doc["sumset"]) == 8


def test_distinct_error_messages(capsys, setfile):
    code, _, e1 = run(capsys, "frobnicate")
    assert code == 1 and "invalid choice" in e1
    code, _, e2 = run(capsys, "diameter", setfile("p=7\n1 1\n"))
    assert code == 1 and "unparsable input file" in e2
    code, _, e3 = run(capsys, "construct", "cycle", "--p", "9", "--l1", "1", "--l2", "2")
    assert code == 1 and "not prime" in e3
    assert len({e1, e2, e3}) == 3
    code, _, e4 = run(capsys, "diameter", "/nonexistent/file")
    assert code == 1 and "cannot read" in e4


def test_epsilon_must_be_exact(capsys):
    code, _, err = run(capsys, "construct", "rokhlin", "--lambda", "-2", "--epsilon", "0.25", "--p", "10007")
    assert code == 1 and "num/den" in err
    code, _, err = run(capsys, "construct", "rokhlin", "--lambda", "-2", "--epsilon", "1/4", "--m", "2")
    assert code == 1


def test_diameter_and_rectify(capsys, setfile):
    path = setfile("p=101\n10 13 19\n")
    code, out, _ = run(capsys, "diameter", path)
    assert code == 0 and "diameter=4" in out and "x=10 d=3 l=4" in out
    code, out, _ = run(capsys, "rectify", path, "--M", "3", "--lambdas", "1,2")
    assert code == 0
    assert out.splitlines()[-1] == "0 1 3"
    assert "int_sumset=8 zp_sumset=8" in out
    code, _, err = run(capsys, "rectify", setfile("p=7\n0 1 3\n", "b.set"), "--M", "3")
    assert code == 1 and "NotRectifiableError" in err


def test_rokhlin_circle_then_discretize(capsys, tmp_path):
    ivs = tmp_path / "a.iv"
    code, _, _ = run(capsys, "construct", "rokhlin", "--lambda", "-2", "--epsilon", "1/4",
                     "--m", "2", "--t", "1", "--circle", "--out", str(ivs))
    assert code == 0
    S = parse_intervals(ivs.read_text())
    code, out, _ = run(capsys, "discretize", str(ivs), "--p", "101")
    assert code == 0
    A = parse_set(out)
    assert set(A) == {x for x in range(101) if Fraction(x, 101) in S}


def test_rokhlin_zp(capsys):
    code, out, _ = run(capsys, "construct", "rokhlin", "--lambda", "-2", "--epsilon", "1/4",
                       "--p", "10007", "--m", "2", "--t", "3", "--window", "1")
    assert code == 0
    head = out.splitlines()[0]
    for key in ("lambda=-2", "nu=2", "m=2", "t=3", "epsilon=1/4", "density=", "sumset_density="):
        assert key in head
    A = parse_set(out)
    assert A.card > 0


def test_bounds_csv(capsys):
    code, out, _ = run(capsys, "bounds", "--lambdas", "2,100", "--alphas", "0,1/50")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("#")
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    assert list(rows[0]) == ["lambda", "alpha", "plagne_f", "bukh_main_ratio", "cd_ratio"]
    assert len(rows) == 4
    assert rows[2]["lambda"] == "100" and float(rows[2]["plagne_f"]) > 2.1
    code, _, _ = run(capsys, "bounds", "--alphas", "1/2")
    assert code == 1


def test_extremal_csv(capsys):
    code, out, _ = run(capsys, "extremal", "exhaustive", "--p", "7", "--lambdas", "1,1", "--sizes", "1-4")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.split("\n", 1)[1])))
    assert list(rows[0]) == ["p", "k", "lambdas", "size", "min_sumset", "ratio", "mode", "witness"]
    assert [int(r["min_sumset"]) for r in rows] == [1, 3, 5, 7]
    assert rows[2]["witness"] == "0;1;2"


def test_extremal_random_deterministic(capsys):
    argv = ["extremal", "random", "--p", "61", "--lambdas", "1,-2", "--sizes", "5,8", "--iterations", "500", "--seed", "9"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b and "mode" in a


def test_workers_do_not_change_output(capsys):
    argv = ["extremal", "exhaustive", "--p", "13", "--lambdas", "1,2", "--sizes", "4"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, "--workers", "2", *argv)
    assert a == b


@pytest.mark.parametrize("argv", [
    ["verify", "vosper", "--p", "5"],
    ["verify", "ruzsa", "--p", "31", "--trials", "50"],
    ["verify", "tower", "--nus", "2", "--ms", "1-2", "--levels", "3"],
])
def test_verify_suites(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and "0 violations" in out


def test_verify_exit_2_on_violation(capsys, monkeypatch):
    from sumdilates import oracle

    bad = oracle.SuiteReport("cauchy-davenport", 5, 10, 1, examples=[(1, 2)])
    monkeypatch.setattr(oracle, "cd_suite", lambda p, seed=0: bad)
    code, out, _ = run(capsys, "verify", "cd", "--p", "5")
    assert code == 2 and "1 violations / 10 pairs" in out


def test_emitted_set_files_roundtrip(capsys, tmp_path):
    out = tmp_path / "c.set"
    run(capsys, "construct", "cycle", "--p", "101", "--l1", "1", "--l2", "3", "--out", str(out))
    A = parse_set(out.read_text())
    code, text, _ = run(capsys, "sumset", str(out), "--lambdas", "1,3")
    assert code == 0 and parse_set(text).p == 101 and 0 not in parse_set(text)
    assert A.card > 0


def test_console_script_entry():
    res = subprocess.run([sys.executable, "-m", "sumdilates.cli", "verify", "cd", "--p", "3"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "0 violations / 49 pairs" in res.stdout
