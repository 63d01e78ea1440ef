import warnings

import numpy as np
import pytest

from irb import GridFunction, certify, lookup, norm
from irb.family import Family, MapFamily
from irb.fixpoint import NotContractive, iterate, solve
from irb.operator import OperatorSpec

BUILTIN = ["exa1", "exa2", "parabola", "takagi", "lp-spike", "noninjective-demo"]
BOUNDED = [name for name in BUILTIN if lookup(name).p is None]
SLACK = 5e-4


@pytest.fixture(scope="module")
def runs():
    """30 iterates from zero and the certificate for every builtin scenario."""
    out = {}
    for name in BUILTIN:
        spec = lookup(name).operator()
        out[name] = (spec, certify(spec), iterate(spec, spec.zero(), 30))
    return out


def zero_q_spec():
    fam = MapFamily(Family.extended(["x/2", "x/2 + 1/2"]))
    return OperatorSpec(fam, Family.direct("0", 2), Family.direct("x/2", 2), nt=64, nx=65)


def test_iterate_zero():
    spec = zero_q_spec()
    assert all(not f.values.any() for f in iterate(spec, spec.zero(), 5))
    with pytest.raises(ValueError):
        iterate(spec, spec.zero(), 0)


def test_exa1_first_steps_contract(runs):
    _, _, its = runs["exa1"]
    assert norm(its[3] - its[2]) <= 0.5 * norm(its[2] - its[1]) + 1e-3


def test_parabola_eight_steps(runs):
    _, _, its = runs["parabola"]
    x = its[8].x
    assert np.max(np.abs(its[8].values - 2 * x * (1 - x))) <= 1e-3


def test_solve_zero_q_converges_at_once():
    spec = zero_q_spec()
    rep = solve(spec, spec.zero(), tol=1e-9)
    assert rep.converged and rep.iterations == 1
    assert not rep.solution.values.any()
    assert rep.bounds is None


def test_solve_spike_scenario_in_l1():
    sc = lookup("lp-spike")
    spec = sc.operator()
    rep = solve(spec, spec.zero(), tol=sc.tol, K_max=sc.kmax, SM=certify(spec).criterion)
    assert rep.converged
    r = rep.residuals
    ratios = [r[k + 1] / r[k] for k in range(len(r) - 1)]
    assert max(ratios) <= 0.75 + 0.02


def test_parabola_bound_dominates_error(runs):
    spec, cert, its = runs["parabola"]
    rep = solve(spec, spec.zero(), tol=1e-6, K_max=50, SM=cert.criterion)
    assert rep.converged
    assert rep.bounds[-1] >= norm(rep.solution - its[30])
    assert len(rep.bounds) == len(rep.residuals) == rep.iterations


def test_report_keeps_first_iterates_and_last(runs):
    spec, cert, _ = runs["exa1"]
    rep = solve(spec, spec.zero(), tol=1e-12, K_max=9, SM=cert.criterion)
    assert sorted(rep.kept) == [0, 1, 2, 3, 4, 9]
    assert not rep.converged and rep.iterations == 9


def test_not_contractive_warning():
    fam = MapFamily(Family.direct("x", 2))
    spec = OperatorSpec(fam, Family.direct("1", 2), Family.direct("5/2", 2), nt=16, nx=9)
    with pytest.warns(NotContractive):
        rep = solve(spec, spec.zero(), tol=1e-6, K_max=8)
    assert not rep.converged and rep.warnings


@pytest.mark.parametrize("name", BOUNDED)
def test_residual_contraction(runs, name):
    _, cert, its = runs[name]
    assert cert.passed
    r = [norm(its[k] - its[k - 1]) for k in range(1, 31)]
    for k in range(len(r) - 1):
        assert r[k + 1] <= (cert.criterion + 0.02) * r[k] + 1e-15


@pytest.mark.parametrize("name", BUILTIN)
def test_bound_validity(runs, name):
    spec, cert, its = runs[name]
    factor = cert.criterion / (1 - cert.criterion)
    for k in range(2, 31):
        bound = factor * norm(its[k] - its[k - 1], spec.p)
        assert bound >= norm(its[k] - its[30], spec.p) - SLACK, f"k={k}"


@pytest.mark.parametrize("name", BUILTIN)
def test_start_independence(name):
    sc = lookup(name)
    spec = sc.operator()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotContractive)
        a = solve(spec, spec.zero(), sc.tol, sc.kmax)
        b = solve(spec, GridFunction.constant(1.0, spec.grid_a, spec.grid_b, spec.nx), sc.tol, sc.kmax)
    assert a.converged and b.converged
    assert norm(a.solution - b.solution, spec.p) <= 2 * sc.tol
