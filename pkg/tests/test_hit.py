import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irb.family import Domain, Family, Homotopy, MapFamily, extend
from irb.hit import HitSet, boundary_time_measure, hit_sets, hit_times, max_hit_measure

AFFINE = ["x/2", "x/2 + 1/2"]


def interval_oracle(x):
    """T_x for the affine pair with identity h: [max(1, 2x), min(2, 2x + 1)]."""
    lo, hi = max(1.0, 2 * x), min(2.0, 2 * x + 1)
    return max(0.0, hi - lo)


def test_hit_examples():
    fam = extend(AFFINE)
    h = hit_times(fam, 0.5)
    assert h.intervals == ((1.0, 2.0),) and h.measure == 1.0
    h = hit_times(fam, 0.25)
    assert len(h) == 1
    assert h.intervals[0][0] == 1.0 and h.intervals[0][1] == pytest.approx(1.5, abs=1e-6)
    assert h.measure == pytest.approx(0.5, abs=1e-6)
    quarter = MapFamily(Family.direct("x/4", 2))
    assert hit_times(quarter, 0.9).measure == 0.0


def test_hit_measure_matches_interval_algebra():
    fam = extend(AFFINE)
    xs = np.linspace(0, 1, 257)
    got = [h.measure for h in hit_sets(fam, xs)]
    want = [interval_oracle(x) for x in xs]
    assert np.allclose(got, want, atol=1e-5)


def test_max_hit_examples():
    m = max_hit_measure(extend(AFFINE), np.linspace(0, 1, 1025))
    assert m.measure == 1.0 and m.x == 0.5
    step = extend(AFFINE, Homotopy.step(0.5), Domain(0, 1, True))
    assert max_hit_measure(step, np.linspace(0, 1, 1025)).measure == pytest.approx(0.5, abs=1e-6)
    ident = MapFamily(Family.direct("x", 3))
    assert max_hit_measure(ident, np.linspace(0, 1, 9)).measure == 2.0
    with pytest.raises(ValueError):
        max_hit_measure(ident, [])


def test_boundary_time_examples():
    assert boundary_time_measure(extend(AFFINE), 0.25) <= 2 / 512
    assert boundary_time_measure(MapFamily(Family.direct("x", 2)), 0.3) == 0.0
    frozen = MapFamily(Family.direct("x/2", 2))
    assert boundary_time_measure(frozen, 0.5) == 1.0


# ------------------------------------------------------------- properties

FAMILIES = [
    extend(AFFINE),
    extend(AFFINE, Homotopy.step(0.5)),
    extend(AFFINE, Homotopy.ramp(6)),
    extend(["x/3", "x/3 + 1/3", "2/3 - x/3 + 1/3"], Homotopy.identity()),
    extend(["x/2", "1 - x^2/2"]),
    MapFamily(Family.direct("(x + sin(3*t))/4 + 1/4", 2)),
]


def check_structure(fam, x, h: HitSet):
    n = fam.n
    prev = -np.inf
    for lo, hi in h.intervals:
        assert 1 <= lo <= hi <= n
        assert lo > prev
        prev = hi
    assert h.measure == pytest.approx(sum(hi - lo for lo, hi in h.intervals), abs=1e-14)
    assert 0 <= h.measure <= n - 1
    for lo, hi in h.intervals:
        # endpoints are members (closed hit sets) and so is the midpoint
        assert fam.contains(np.array([lo, 0.5 * (lo + hi), hi]), x).all()
    for (_, e), (s, _) in zip(h.intervals, h.intervals[1:]):
        assert not fam.contains(np.array(0.5 * (e + s)), x)


def test_structural_invariants_1000_queries():
    rng = np.random.default_rng(7)
    count = 0
    for fam in FAMILIES:
        xs = rng.uniform(0, 1, 1000 // len(FAMILIES) + 1)
        for x, h in zip(xs, hit_sets(fam, xs, 256)):
            check_structure(fam, x, h)
            count += 1
    assert count >= 1000


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 1), st.sampled_from([64, 128, 256]))
def test_refinement_does_not_lose_measure(x, N_t):
    for fam in FAMILIES[:3]:
        coarse = max_hit_measure(fam, [x], N_t)
        fine = max_hit_measure(fam, [x], 2 * N_t)
        assert fine.measure >= coarse.measure - coarse.resolution
