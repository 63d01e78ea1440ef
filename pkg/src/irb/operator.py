"""Discretised iRB and RB operators on grid functions.

The iRB operator integrates over t with the midpoint rule on N_t equal
panels of [1, n].  Everything that does not depend on the argument f
(membership of x_i in X_{t_j}, the preimages y_ij, q and s at (t_j, y_ij),
interpolation weights) is computed once per :class:`OperatorSpec` and
cached, so each application is a single weighted reduction.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .expr import DomainError
from .family import BaseTriple, Family, MapFamily, NonInjective, NON_MONOTONE, member, midpoints


def thread_count():
    """Worker count from IRB_THREADS (0 or unset means one per CPU)."""
    try:
        n = int(os.environ.get("IRB_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples on the uniform grid x_i = a + i (b - a) / (N_x - 1), linearly interpolated."""

    a: float
    b: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("need at least 2 grid values")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))

    @classmethod
    def from_callable(cls, func, a, b, nx):
        x = np.linspace(a, b, nx)
        return cls(a, b, np.broadcast_to(np.asarray(func(x), dtype=float), x.shape).copy())

    @classmethod
    def constant(cls, c, a, b, nx):
        return cls(a, b, np.full(nx, float(c)))

    @property
    def nx(self):
        return self.values.size

    @property
    def step(self):
        return (self.b - self.a) / (self.nx - 1)

    @cached_property
    def x(self):
        return self.a + np.arange(self.nx) * self.step

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        if np.any(y < self.a) or np.any(y > self.b):
            raise ValueError(f"evaluation outside [{self.a}, {self.b}]")
        idx, frac = self._locate(y)
        return self._combine(idx, frac)

    def _locate(self, y):
        pos = (y - self.a) / self.step
        idx = np.clip(np.floor(pos).astype(np.int64), 0, self.nx - 2)
        frac = np.clip(pos - idx, 0.0, 1.0)
        return idx, frac

    def _combine(self, idx, frac):
        v = self.values
        return (1.0 - frac) * v[idx] + frac * v[idx + 1]

    def same_grid(self, other):
        return self.a == other.a and self.b == other.b and self.nx == other.nx

    def __sub__(self, other):
        return GridFunction(self.a, self.b, self.values - other.values)

    def __add__(self, other):
        return GridFunction(self.a, self.b, self.values + other.values)

    def __mul__(self, c):
        return GridFunction(self.a, self.b, c * self.values)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, GridFunction) and self.same_grid(other) \
            and np.array_equal(self.values, other.values)


def norm(f: GridFunction, p: float | None = None) -> float:
    """Sup norm (p=None) or trapezoid p-norm of a grid function."""
    if p is None:
        return float(np.max(np.abs(f.values)))
    if p < 1:
        raise ValueError("p must be >= 1")
    return float(np.trapezoid(np.abs(f.values) ** p, f.x) ** (1.0 / p))


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """Parameters of a discretised iRB operator.

    ``delta`` shifts the left end of the x-grid to a + delta (keeps a
    singular q off the grid); ``p=None`` selects the sup-norm space.
    """

    fam: MapFamily
    q: Family
    s: Family
    nt: int = 512
    nx: int = 1025
    tol: float = 1e-12
    delta: float = 0.0
    p: float | None = None

    def __post_init__(self):
        if self.nt < 2:
            raise ValueError("nt must be >= 2")
        if self.nx < 2:
            raise ValueError("nx must be >= 2")
        d = self.fam.domain
        if not 0 <= self.delta < (d.b - d.a) / self.nx:
            raise ValueError(f"delta must lie in [0, (b-a)/nx), got {self.delta}")
        if self.q.n != self.fam.n or self.s.n != self.fam.n:
            raise ValueError("q, s and l must share n")

    @property
    def n(self):
        return self.fam.n

    @property
    def grid_a(self):
        return self.fam.domain.a + self.delta

    @property
    def grid_b(self):
        return self.fam.domain.b

    def zero(self):
        return GridFunction.constant(0.0, self.grid_a, self.grid_b, self.nx)

    def grid_function(self, func):
        return GridFunction.from_callable(func, self.grid_a, self.grid_b, self.nx)

    @cached_property
    def compiled(self):
        return _Compiled.build(self)

    def apply(self, f):
        return apply_irb(self, f)


@dataclass
class _Compiled:
    w: float
    qv: np.ndarray    # (nx, nt), zero off the hit set
    sv: np.ndarray
    idx: np.ndarray
    frac: np.ndarray
    non_monotone_nodes: int
    template: GridFunction

    @classmethod
    def build(cls, spec):
        ts = midpoints(spec.n, spec.nt)
        template = spec.zero()
        x = template.x
        blocks = np.array_split(np.arange(spec.nt), min(thread_count(), spec.nt))
        blocks = [b for b in blocks if b.size]
        if len(blocks) > 1:
            with ThreadPoolExecutor(len(blocks)) as pool:
                parts = list(pool.map(lambda cols: _build_block(spec, template, ts[cols], x), blocks))
        else:
            parts = [_build_block(spec, template, ts, x)]
        qv, sv, idx, frac, bad = (np.concatenate([p[k] for p in parts], axis=1 if k < 4 else 0)
                                  for k in range(5))
        return cls((spec.n - 1) / spec.nt, qv, sv, idx, frac, int(bad.sum()), template)

    def apply(self, f):
        fv = f._combine(self.idx, self.frac)
        total = (self.qv + self.sv * fv).sum(axis=1)
        return GridFunction(self.template.a, self.template.b, self.w * total)


def _build_block(spec, template, ts, x):
    fam = spec.fam
    lo, hi, lo_open, hi_open, ok = fam.images(ts)
    inside = member(x[:, None], lo, hi, lo_open, hi_open, spec.tol) & ok[None, :]
    tt = np.broadcast_to(ts[None, :], inside.shape)
    xx = np.broadcast_to(x[:, None], inside.shape)
    t_in, x_in = tt[inside], xx[inside]
    y = fam.inverse(t_in, x_in)
    qv = np.zeros(inside.shape)
    sv = np.zeros(inside.shape)
    try:
        qv[inside] = spec.q(t_in, y)
        sv[inside] = spec.s(t_in, y)
    except DomainError as err:
        raise DomainError(f"q/s evaluation failed at quadrature node ({err.t}, {err.x})",
                          err.node, err.t, err.x) from None
    y_full = np.full(inside.shape, template.a, dtype=float)
    y_full[inside] = np.maximum(y, template.a)
    idx, frac = template._locate(y_full)
    return qv, sv, idx, frac, ~ok


def apply_irb(spec: OperatorSpec, f: GridFunction) -> GridFunction:
    """T(f)(x_i) = w * sum_j [q + s * f](t_j, y_ij) over t_j with x_i in X_{t_j}."""
    if not f.same_grid(spec.zero()):
        raise ValueError("f is not on the operator grid")
    return spec.compiled.apply(f)


def apply_rb(base: BaseTriple, f: GridFunction) -> GridFunction:
    """Classical RB operator sum_i [q_i + s_i f](l_i^{-1}(x)) 1_{X_i}(x).

    On a closed domain shared image endpoints go to the interval on the
    right ([lo, hi) except for the right-most image, which stays closed); on
    a right-open domain every image l_i([a, b)) keeps its open end.
    """
    x = f.x
    pieces = [base.piece(i) for i in range(base.n)]
    for i, p in enumerate(pieces):
        if p.classify([1.0])[0] == NON_MONOTONE:
            raise NonInjective(f"base map {i + 1} is not monotone")
    ivals = [p.images(np.array([1.0])) for p in pieces]
    top = max(float(iv[1][0]) for iv in ivals)
    total = np.zeros_like(x)
    for i, (p, (lo, hi, lo_open, hi_open, _)) in enumerate(zip(pieces, ivals)):
        if not base.domain.right_open:
            hi_open = np.array([hi[0] < top])
        inside = member(x, lo[0], hi[0], lo_open[0], hi_open[0], p.tol)
        if not inside.any():
            continue
        xi = x[inside]
        y = p.inverse(np.ones_like(xi), xi)
        fy = f._combine(*f._locate(np.clip(y, f.a, f.b)))
        total[inside] += evaluate_base(base.q[i], y) + evaluate_base(base.s[i], y) * fy
    return GridFunction(f.a, f.b, total)


def evaluate_base(e, y):
    from .expr import evaluate
    return np.asarray(evaluate(e, 1.0, y), dtype=float) * np.ones_like(y)


__all__ = ["GridFunction", "OperatorSpec", "apply_irb", "apply_rb", "norm", "thread_count"]
