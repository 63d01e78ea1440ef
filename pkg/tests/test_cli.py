import json
import os

import numpy as np
import pytest

from irb import GridFunction, lookup
from irb.cli import main, run
from irb.config import ConfigError, dump_config, load_config, parse_config
from irb.expr import parse
from irb.export import export_csv, export_svg, read_csv
from irb.family import Homotopy
from irb.scenarios import TEXTS, builtin_scenarios

MINIMAL = """
[domain]
a = 0
b = 1
[time]
n = 2
nt = 64
[maps]
base = x/2; x/2 + 1/2
[q]
expr = {q}
[s]
expr = {s}
[run]
kmax = {kmax}
"""


def write(tmp_path, text, name="sc.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# ------------------------------------------------------------------ config

def test_exa1_text():
    sc = lookup("exa1")
    assert sc.maps.base == (parse("x/2"), parse("x/2 + 1/2"))
    assert sc.homotopy == Homotopy.identity()
    assert sc.q.expr == parse("ge(x, 2 - t)")
    assert sc.s.expr == parse("(1/2)*x*(t - 1)")
    assert (sc.nx, sc.nt, sc.tol, sc.kmax, sc.delta, sc.f0) == (1025, 512, 1e-6, 50, 0.0, "zero")


def test_missing_maps():
    text = MINIMAL.format(q="x", s="0", kmax=5).replace("[maps]\nbase = x/2; x/2 + 1/2\n", "")
    with pytest.raises(ConfigError, match="maps"):
        parse_config(text)


@pytest.mark.parametrize("text,where", [
    ("[domain]\na = 0\nb = 1\n[time]\nn = 2\nnt = 63\n[maps]\nbase = x/2; x/2 + 1/2\n"
     "[q]\nexpr = x\n[s]\nexpr = 0\n", "nt"),
    (MINIMAL.format(q="x +", s="0", kmax=5), r"\[q\] expr, line 11"),
    (MINIMAL.format(q="x", s="0", kmax=5) + "colour = red\n", "line"),
    (MINIMAL.format(q="x", s="0", kmax=5).replace("b = 1", "b = 1\nb = 2"), "duplicate"),
])
def test_config_errors_locate_problem(text, where):
    with pytest.raises(ConfigError, match=where):
        parse_config(text)


@pytest.mark.parametrize("name", list(TEXTS))
def test_dump_round_trip(name):
    sc = lookup(name)
    assert parse_config(dump_config(sc)) == sc


def test_builtin_registry():
    assert set(builtin_scenarios()) == {"exa1", "exa2", "parabola", "takagi", "lp-spike",
                                        "noninjective-demo", "nonuniform-demo"}
    with pytest.raises(KeyError):
        lookup("missing")


def test_parabola_and_takagi_doubling():
    par = lookup("parabola").operator()
    tak = lookup("takagi").operator()
    t = np.array([1.2, 1.8])
    assert np.array_equal(par.s(t, np.array([0.3, 0.3])), [0.5, 0.5])
    assert np.array_equal(tak.s(t, np.array([0.3, 0.3])), [1.0, 1.0])
    assert lookup("parabola").s.base == (parse("1/4"), parse("1/4"))


# ------------------------------------------------------------------ export

def test_csv_small(tmp_path):
    its = [GridFunction(0, 1, [0.0, 1.0, 2.0]), GridFunction(0, 1, [0.1, 0.2, 0.3])]
    p = tmp_path / "a.csv"
    export_csv(its, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "x,f0,f1"
    assert len(lines) == 4 and all(len(l.split(",")) == 3 for l in lines)


def test_csv_round_trip_bitwise(tmp_path):
    rng = np.random.default_rng(0)
    its = {k: GridFunction(0, 1, rng.normal(size=33) * 10.0 ** rng.integers(-300, 300, 33))
           for k in (0, 1, 7)}
    p = tmp_path / "b.csv"
    export_csv(its, p)
    x, cols = read_csv(p)
    assert np.array_equal(x, its[0].x)
    for k, f in its.items():
        assert np.array_equal(cols[k], f.values)


def test_svg(tmp_path):
    its = [GridFunction.from_callable(lambda x, c=c: c * x, 0, 1, 9) for c in range(3)]
    p = tmp_path / "c.svg"
    export_svg(its, p)
    s = p.read_text()
    assert 'viewBox="0 0 800 600"' in s
    assert s.count("<polyline") == 3
    strokes = {part.split('"')[0] for part in s.split('stroke="')[1:]}
    assert len(strokes) == 3
    assert "href" not in s


# ---------------------------------------------------------------------- run

def test_run_exa1(tmp_path):
    code, cert, rep, paths = run(lookup("exa1"), str(tmp_path), svg=True)
    assert code == 0 and rep.converged
    assert cert.constants["S"] == 0.5 and cert.criterion == pytest.approx(0.5, abs=0.01)
    x, cols = read_csv(paths["csv"])
    assert x[0] == 0 and cols[1][0] == 0.0
    assert os.path.exists(paths["svg"])
    report = json.loads(open(paths["report"], encoding="utf-8").read())
    assert set(report) == {"scenario", "certificate", "iterations", "residuals", "bounds", "warnings"}


def test_run_zero_q(tmp_path):
    sc = parse_config(MINIMAL.format(q="0", s="x/2", kmax=5))
    code, _, rep, paths = run(sc, str(tmp_path))
    assert code == 0 and rep.iterations == 1
    _, cols = read_csv(paths["csv"])
    assert not cols[1].any()


def test_run_lp_spike_report(tmp_path):
    code, _, rep, paths = run(lookup("lp-spike"), str(tmp_path))
    assert code == 0 and rep.converged
    report = json.loads(open(paths["report"], encoding="utf-8").read())
    assert abs(report["certificate"]["criterion"] - 0.75) <= 1e-9


def test_exit_codes(tmp_path, capsys):
    out = str(tmp_path)
    assert main(["run", "exa2", "--out-dir", out]) == 0
    failing = write(tmp_path, MINIMAL.format(q="x", s="5/2", kmax=5), "fail.ini")
    assert main(["run", failing, "--out-dir", out]) == 2
    slow = write(tmp_path, MINIMAL.format(q="x", s="(1/2)*x", kmax=2), "slow.ini")
    assert main(["run", slow, "--out-dir", out]) == 1
    assert main(["run", str(tmp_path / "nope.ini")]) == 1
    broken = write(tmp_path, "[domain]\na = 0\n", "broken.ini")
    assert main(["certify", broken]) == 1


def test_overrides(tmp_path, capsys):
    assert main(["run", "parabola", "--nt", "128", "--nx", "257", "--tol", "1e-3",
                 "--out-dir", str(tmp_path)]) == 0
    x, _ = read_csv(tmp_path / "parabola.csv")
    assert x.size == 257


def test_other_commands(capsys):
    assert main(["certify", "exa1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["certificate"]["constants"]["S"] == 0.5
    assert out["continuity"]["passed"] is False
    assert main(["embed-rb", "parabola", "--samples", "3"]) == 0
    assert "max |iRB - RB|" in capsys.readouterr().out
    assert main(["approx-rb", "parabola", "--k", "4,8"]) == 0
    assert "slope" in capsys.readouterr().out
    assert main(["scenario", "list"]) == 0
    assert "takagi" in capsys.readouterr().out
    assert main(["scenario", "dump", "parabola"]) == 0
    assert parse_config(capsys.readouterr().out) == lookup("parabola")
    assert main(["scenario", "dump", "missing"]) == 1


def test_load_config_file(tmp_path):
    p = write(tmp_path, TEXTS["exa2"])
    assert load_config(p) == lookup("exa2")
