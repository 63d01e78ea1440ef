"""Hit times T_x = {t in [1, n] : x in X_t} and their Lebesgue measure."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .family import MapFamily, midpoints, probe_times

REFINE_STEPS = 20
BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class HitSet:
    intervals: tuple  # of (t_lo, t_hi), sorted and disjoint
    measure: float

    @classmethod
    def from_intervals(cls, intervals):
        intervals = tuple((float(lo), float(hi)) for lo, hi in sorted(intervals))
        return cls(intervals, float(sum(hi - lo for lo, hi in intervals)))

    def __contains__(self, t):
        return any(lo <= t <= hi for lo, hi in self.intervals)

    def __len__(self):
        return len(self.intervals)


def _refine(fam, xs, t_in, t_out):
    """Bisect each bracket (t_in member, t_out not) towards the transition."""
    for _ in range(REFINE_STEPS):
        mid = 0.5 * (t_in + t_out)
        inside = fam.contains(mid, xs)
        t_in = np.where(inside, mid, t_in)
        t_out = np.where(inside, t_out, mid)
    return t_in


def hit_sets(fam: MapFamily, xs, N_t: int = 512) -> list[HitSet]:
    """Hit sets for every x in ``xs`` at once.

    Membership is sampled at the midpoints of N_t panels plus t = 1 and t = n;
    every transition between neighbouring samples is refined by bisection so
    the returned endpoints are members (hit sets of continuous families are
    closed).
    """
    if N_t < 2:
        raise ValueError("N_t must be >= 2")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ts = probe_times(fam.n, N_t)
    inside = fam.contains(ts[None, :], xs[:, None])  # (len(xs), N_t + 2)

    # run starts: member with non-member on the left; ends likewise on the right
    left_edge = inside[:, 1:] & ~inside[:, :-1]
    right_edge = inside[:, :-1] & ~inside[:, 1:]
    ri, rk = np.nonzero(left_edge)
    starts = _refine(fam, xs[ri], ts[rk + 1], ts[rk])
    li, lk = np.nonzero(right_edge)
    ends = _refine(fam, xs[li], ts[lk], ts[lk + 1])

    per_x_starts = [[] for _ in xs]
    per_x_ends = [[] for _ in xs]
    for i in np.nonzero(inside[:, 0])[0]:
        per_x_starts[i].append(ts[0])
    for i, v in zip(ri, starts):
        per_x_starts[i].append(v)
    for i, v in zip(li, ends):
        per_x_ends[i].append(v)
    for i in np.nonzero(inside[:, -1])[0]:
        per_x_ends[i].append(ts[-1])

    out = []
    for s, e in zip(per_x_starts, per_x_ends):
        # both lists are already in ascending t order
        out.append(HitSet.from_intervals(zip(s, e)))
    return out


def hit_times(fam: MapFamily, x: float, N_t: int = 512) -> HitSet:
    return hit_sets(fam, [x], N_t)[0]


class MaxHit(NamedTuple):
    measure: float
    resolution: float
    x: float


def max_hit_measure(fam: MapFamily, grid, N_t: int = 512) -> MaxHit:
    """M = max over the grid of the hit-time measure.

    The resolution bound 2 (n-1) (#intervals) / N_t covers features narrower
    than a panel that the sampling can miss.
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise ValueError("empty grid")
    sets = hit_sets(fam, grid, N_t)
    measures = np.array([h.measure for h in sets])
    k = int(np.argmax(measures))
    nint = max(1, max(len(h) for h in sets))
    return MaxHit(float(measures[k]), 2.0 * (fam.n - 1) * nint / N_t, float(grid[k]))


def boundary_time_measure(fam: MapFamily, x: float, N_t: int = 512) -> float:
    """Measure of {t : x in boundary of X_t}, boundary taken relative to [a, b]."""
    ts = midpoints(fam.n, N_t)
    lo, hi, _, _, ok = fam.images(ts)
    a, b = fam.domain.a, fam.domain.b
    at_lo = (np.abs(x - lo) <= BOUNDARY_TOL) & (lo > a + BOUNDARY_TOL)
    at_hi = (np.abs(x - hi) <= BOUNDARY_TOL) & (hi < b - BOUNDARY_TOL)
    hits = (at_lo | at_hi) & ok
    return float(hits.mean() * (fam.n - 1))


__all__ = ["HitSet", "MaxHit", "hit_sets", "hit_times", "max_hit_measure", "boundary_time_measure"]
