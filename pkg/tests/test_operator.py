import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irb import BaseTriple, Domain, GridFunction, apply_irb, apply_rb, certify_bounded, lookup, norm
from irb.family import Family, Homotopy, MapFamily, NonInjective
from irb.fixpoint import iterate
from irb.operator import OperatorSpec, thread_count

log = logging.getLogger(__name__)


def takagi_oracle(x, terms=60):
    m = 2.0 ** np.arange(terms)
    y = np.multiply.outer(np.atleast_1d(x), m)
    return (np.abs(y - np.round(y)) / m).sum(axis=-1)


def parabola_triple(s="1/4"):
    return BaseTriple(["x/2", "x/2 + 1/2"], ["x/2", "-x/2 + 1/2"], [s, s], Domain(0, 1, True))


# ------------------------------------------------------------ grid functions

def test_grid_function_basics():
    f = GridFunction.from_callable(lambda x: 3 * x, 0, 1, 5)
    assert np.array_equal(f.x, [0, 0.25, 0.5, 0.75, 1])
    assert f(0.1) == pytest.approx(0.3)
    with pytest.raises(ValueError):
        f(1.5)
    with pytest.raises(ValueError):
        GridFunction(0, 1, [1.0, np.nan])
    with pytest.raises(ValueError):
        f.values[0] = 1.0


def test_norm_examples():
    one = GridFunction.constant(1.0, 0, 1, 11)
    assert norm(one) == 1.0
    assert norm(one, 2) == pytest.approx(1.0, abs=1e-15)
    x = GridFunction.from_callable(lambda x: x, 0, 1, 1025)
    assert abs(norm(x, 1) - 0.5) <= 1e-12
    with pytest.raises(ValueError):
        norm(x, 0.5)


# --------------------------------------------------------------- iRB apply

def test_zero_parameters_give_zero():
    fam = MapFamily(Family.extended(["x/2", "x/2 + 1/2"]))
    spec = OperatorSpec(fam, Family.direct("0", 2), Family.direct("0", 2), nt=64, nx=65)
    f = spec.grid_function(lambda x: np.sin(7 * x))
    assert np.array_equal(apply_irb(spec, f).values, np.zeros(65))


def test_parabola_is_fixed_point():
    spec = lookup("parabola").operator()
    f = spec.grid_function(lambda x: 2 * x * (1 - x))
    assert norm(apply_irb(spec, f) - f) <= 1e-6


def test_spike_closed_form_at_one_eighth():
    spec = lookup("lp-spike").operator()
    f1 = apply_irb(spec, spec.zero())
    # grid starts at delta, so evaluate the interpolant next to 1/8
    assert f1(0.125) == pytest.approx(1.0, abs=1e-5)
    x = f1.x
    left = (x > spec.delta) & (x < 0.5)
    assert np.allclose(f1.values[left], 0.5 / np.sqrt(2 * x[left]), rtol=0, atol=1e-6)


def test_grid_mismatch_rejected():
    spec = lookup("exa1").operator()
    with pytest.raises(ValueError):
        apply_irb(spec, GridFunction.constant(0, 0, 1, 33))


def test_delta_bound_enforced():
    sc = lookup("lp-spike")
    with pytest.raises(ValueError):
        sc.replace(delta=0.01).operator()


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("IRB_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("IRB_THREADS", "0")
    assert thread_count() >= 1


def test_parallel_build_is_bitwise_stable(monkeypatch):
    sc = lookup("exa1")
    results = []
    for threads in ("1", "4"):
        monkeypatch.setenv("IRB_THREADS", threads)
        spec = sc.operator()
        results.append(apply_irb(spec, spec.grid_function(lambda x: np.cos(5 * x))).values)
    assert np.array_equal(results[0], results[1])


# ---------------------------------------------------------------- RB apply

def test_rb_parabola():
    base = parabola_triple()
    f = GridFunction.from_callable(lambda x: 2 * x * (1 - x), 0, 1, 1025)
    Tf = apply_rb(base, f)
    h = f.step
    assert norm(Tf - f) <= h * h / 2
    # 2x and 2x - 1 are grid points on every other node
    assert np.allclose(Tf.values[::2], f.values[::2], rtol=0, atol=1e-15)


def test_rb_zero():
    base = BaseTriple(["x/2", "x/2 + 1/2"], ["0", "0"], ["0", "0"])
    f = GridFunction.from_callable(np.exp, 0, 1, 33)
    assert not apply_rb(base, f).values.any()


def test_rb_takagi():
    base = parabola_triple("1/2")
    f = iterate(base, GridFunction.constant(0, 0, 1, 1025), 20)[-1]
    assert f(0.25) == pytest.approx(0.5, abs=1e-3)
    assert np.allclose(f.values, takagi_oracle(f.x), atol=1e-3)


def test_rb_rejects_non_monotone():
    base = BaseTriple(["4*x*(1-x)", "x"], ["0", "0"], ["0", "0"])
    with pytest.raises(NonInjective):
        apply_rb(base, GridFunction.constant(0, 0, 1, 9))


# --------------------------------------------------------------- properties

SCENARIOS = ["exa1", "exa2", "parabola", "takagi", "lp-spike", "noninjective-demo"]


@pytest.fixture(scope="module")
def specs():
    return {name: lookup(name).operator() for name in SCENARIOS}


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(SCENARIOS), st.floats(-2, 2), st.integers(0, 2**32 - 1))
def test_affinity(specs, name, alpha, seed):
    spec = specs[name]
    rng = np.random.default_rng(seed)
    f = spec.grid_function(lambda x: rng.uniform(-1, 1, x.shape))
    g = spec.grid_function(lambda x: rng.uniform(-1, 1, x.shape))
    lhs = apply_irb(spec, alpha * f + (1 - alpha) * g)
    rhs = alpha * apply_irb(spec, f) + (1 - alpha) * apply_irb(spec, g)
    scale = max(1.0, norm(apply_irb(spec, f)), norm(apply_irb(spec, g))) * (1 + abs(alpha))
    assert norm(lhs - rhs) <= 1e-12 * scale


@pytest.mark.parametrize("name", SCENARIOS)
def test_empirical_sup_contraction(specs, name):
    spec = specs[name]
    SM = certify_bounded(spec).criterion  # sup-norm factor, also for the L1 scenario
    rng = np.random.default_rng(3)
    for _ in range(20):
        f = spec.grid_function(lambda x: rng.uniform(-1, 1, x.shape))
        g = spec.grid_function(lambda x: rng.uniform(-1, 1, x.shape))
        d = norm(f - g)
        assert norm(apply_irb(spec, f) - apply_irb(spec, g)) <= (SM + 0.01) * d


@pytest.mark.parametrize("name", ["exa1", "exa2"])
def test_quadrature_refinement(name):
    sc = lookup(name)
    results = {}
    for nt in (32, 64, 128, 256, 512):
        spec = sc.replace(nt=nt).operator()
        results[nt] = apply_irb(spec, spec.grid_function(lambda x: x * x))
    diffs = {nt: norm(results[2 * nt] - results[nt]) for nt in (32, 64, 128, 256)}
    # fit on the two coarsest levels, check the finer ones
    C = 1.05 * max(diffs[nt] * nt for nt in (32, 64))
    log.info("%s: fitted quadrature constant C = %.4f", name, C)
    for nt in (128, 256):
        assert diffs[nt] <= C / nt
