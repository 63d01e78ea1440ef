"""Map families l(t, x) on [1, n] x [a, b].

A family is either written directly as an expression in (t, x) or built as
the extension of n base maps along a homotopy profile h::

    l(t, .) = (1 - h(u)) * l_i + h(u) * l_{i+1},   i = floor(t), u = t - i

with ``floor(t)`` clamped to ``n - 1`` at ``t = n``, which is the continuous
limit because h(1) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .expr import BinOp, Const, Expr, degree, evaluate, parse, pretty

INCREASING, DECREASING, NON_MONOTONE = 1, -1, 0
N_MONOTONE_PROBES = 129


class FamilyError(ValueError):
    pass


class NotInImage(ValueError):
    pass


class NonInjective(ValueError):
    pass


@dataclass(frozen=True)
class Domain:
    """The interval [a, b], or [a, b) when ``right_open``."""

    a: float = 0.0
    b: float = 1.0
    right_open: bool = False

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not self.a < self.b:
            raise FamilyError(f"empty domain [{self.a}, {self.b}]")


# -------------------------------------------------------------- homotopy


@dataclass(frozen=True)
class Homotopy:
    """Profile h: [0, 1] -> [0, 1] with h(0) = 0 and h(1) = 1.

    ``step`` is the indicator of [theta, 1]; ``ramp`` is 0 up to 1/2 - 1/k,
    rises with slope k and is 1 from 1/2 on.  A ``custom`` profile is an
    expression evaluated with both t and x bound to u.
    """

    kind: str = "identity"
    theta: float = 0.5
    k: int = 2
    expr: Expr | None = None

    def __post_init__(self):
        if self.kind == "step" and not 0 < self.theta <= 1:
            raise FamilyError(f"step threshold must lie in (0, 1], got {self.theta}")
        if self.kind == "ramp" and self.k < 2:
            raise FamilyError(f"ramp needs k >= 2, got {self.k}")
        if self.kind == "custom":
            if self.expr is None:
                raise FamilyError("custom homotopy needs an expression")
            h0, h1 = self(0.0), self(1.0)
            if abs(h0) > 1e-12 or abs(h1 - 1) > 1e-12:
                raise FamilyError(f"custom homotopy must satisfy h(0)=0, h(1)=1; got {h0}, {h1}")
        elif self.kind not in ("identity", "step", "ramp"):
            raise FamilyError(f"unknown homotopy kind {self.kind!r}")

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def step(cls, theta=0.5):
        return cls("step", theta=float(theta))

    @classmethod
    def ramp(cls, k):
        return cls("ramp", k=int(k))

    @classmethod
    def custom(cls, expr):
        return cls("custom", expr=parse(expr) if isinstance(expr, str) else expr)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "identity":
            r = u
        elif self.kind == "step":
            r = np.where(u >= self.theta, 1.0, 0.0)
        elif self.kind == "ramp":
            k = self.k
            r = np.where(u <= 0.5 - 1.0 / k, 0.0,
                         np.where(u >= 0.5, 1.0, k * (u + 1.0 / k - 0.5)))
        else:
            r = np.asarray(evaluate(self.expr, u, u), dtype=float)
        return float(r) if r.ndim == 0 else r

    def __str__(self):
        if self.kind == "identity":
            return "identity"
        if self.kind == "step":
            return f"step({self.theta!r})"
        if self.kind == "ramp":
            return f"ramp({self.k})"
        return f"custom({pretty(self.expr)})"

    @classmethod
    def from_string(cls, text):
        text = text.strip()
        if text == "identity":
            return cls.identity()
        for kind in ("step", "ramp", "custom"):
            if text.startswith(kind + "(") and text.endswith(")"):
                inner = text[len(kind) + 1:-1]
                if kind == "step":
                    return cls.step(float(inner))
                if kind == "ramp":
                    return cls.ramp(int(inner))
                return cls.custom(inner)
        raise FamilyError(f"cannot read homotopy {text!r}")


# ------------------------------------------------------------ functions


@dataclass(frozen=True)
class Family:
    """A real function of (t, x) on [1, n] x X, direct or extended."""

    n: int
    expr: Expr | None = None
    base: tuple | None = None
    h: Homotopy | None = None

    def __post_init__(self):
        if self.n < 2:
            raise IndexError(f"need n >= 2, got {self.n}")
        if (self.expr is None) == (self.base is None):
            raise FamilyError("give exactly one of expr or base")
        if self.base is not None:
            if len(self.base) != self.n:
                raise FamilyError(f"{len(self.base)} base functions for n={self.n}")
            if self.h is None:
                object.__setattr__(self, "h", Homotopy.identity())

    @classmethod
    def direct(cls, expr, n):
        return cls(n=n, expr=parse(expr) if isinstance(expr, str) else expr)

    @classmethod
    def extended(cls, base, h=None):
        base = tuple(parse(b) if isinstance(b, str) else b for b in base)
        if len(base) < 2:
            raise IndexError(f"need at least 2 base maps, got {len(base)}")
        return cls(n=len(base), base=base, h=h or Homotopy.identity())

    def __call__(self, t, x):
        if self.expr is not None:
            return evaluate(self.expr, t, x)
        scalar = np.ndim(t) == 0 and np.ndim(x) == 0
        t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        i = np.clip(np.floor(t), 1, self.n - 1).astype(int)
        u = t - i
        w = np.asarray(self.h(u), dtype=float)
        out = np.empty(t.shape)
        for j in np.unique(i):
            sel = i == j
            left = evaluate(self.base[j - 1], t[sel], x[sel])
            right = evaluate(self.base[j], t[sel], x[sel])
            out[sel] = (1.0 - w[sel]) * left + w[sel] * right
        return float(out) if scalar else out

    @cached_property
    def x_degree(self):
        if self.expr is not None:
            return degree(self.expr, "x")
        degs = [degree(b, "x") for b in self.base]
        return None if any(d is None for d in degs) else max(degs)

    @cached_property
    def bilinear(self):
        """True when max |f| over a rectangle is attained at its corners."""
        if self.expr is not None:
            dx, dt = degree(self.expr, "x"), degree(self.expr, "t")
            return dx is not None and dt is not None and dx <= 1 and dt <= 1
        return False

    def sup_abs(self, a, b, nt=512, nx=1025):
        """Sup of |f| on [1, n] x [a, b]; returns (value, exact)."""
        if self.expr is not None and self.bilinear:
            corners = [abs(self(t, x)) for t in (1.0, float(self.n)) for x in (a, b)]
            return max(corners), True
        if self.base is not None and self.x_degree is not None and self.x_degree <= 1 \
                and self.h.kind != "custom" \
                and not any(_uses_t(e) for e in self.base):
            # convex combination of affine maps: extremes at integer t and x in {a, b}
            vals = [abs(float(evaluate(e, 1.0, x))) for e in self.base for x in (a, b)]
            return max(vals), True
        tt, xx = np.meshgrid(probe_times(self.n, nt), np.linspace(a, b, nx), indexing="ij")
        return float(np.max(np.abs(self(tt, xx)))), False

    def describe(self):
        if self.expr is not None:
            return pretty(self.expr)
        return f"extend[{'; '.join(pretty(b) for b in self.base)}] h={self.h}"


def _uses_t(e):
    from .expr import depends_on
    return depends_on(e, "t")


def probe_times(n, count):
    """Midpoints of ``count`` equal panels on [1, n] plus both endpoints."""
    mids = 1.0 + (np.arange(count) + 0.5) * (n - 1) / count
    return np.concatenate(([1.0], mids, [float(n)]))


def midpoints(n, count):
    return 1.0 + (np.arange(count) + 0.5) * (n - 1) / count


def double_endpoints(vals):
    """Multiply the first and last expression by 2, keep the interior."""
    vals = [parse(v) if isinstance(v, str) else v for v in vals]
    if len(vals) < 2:
        raise IndexError("need at least 2 expressions")
    out = list(vals)
    out[0] = BinOp("*", Const(2.0), vals[0])
    out[-1] = BinOp("*", Const(2.0), vals[-1])
    return out


# ---------------------------------------------------------------- maps


@dataclass(frozen=True)
class MapFamily:
    """A family of self-maps l_t of the domain, with images X_t = l_t(X)."""

    law: Family
    domain: Domain = field(default_factory=Domain)
    tol: float = 1e-12

    def __post_init__(self):
        a, b = self.domain.a, self.domain.b
        tt, xx = np.meshgrid(probe_times(self.n, 32), np.linspace(a, b, 33), indexing="ij")
        vals = self.law(tt, xx)
        slack = 1e-12 * max(1.0, abs(a), abs(b))
        if np.any(vals < a - slack) or np.any(vals > b + slack):
            k = int(np.argmax((vals < a - slack) | (vals > b + slack)))
            raise FamilyError(
                f"l(t, x) leaves [{a}, {b}]: l({tt.flat[k]:.6g}, {xx.flat[k]:.6g}) = {vals.flat[k]:.6g}")

    @property
    def n(self):
        return self.law.n

    @property
    def affine(self):
        d = self.law.x_degree
        return d is not None and d <= 1

    def __call__(self, t, x):
        return self.law(t, x)

    # monotonicity

    def classify(self, t):
        """Per-t classification: INCREASING, DECREASING or NON_MONOTONE."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        a, b = self.domain.a, self.domain.b
        d = self.law.x_degree
        if d is not None and d <= 1:
            slope = self.law(t, np.full_like(t, b)) - self.law(t, np.full_like(t, a))
            return np.sign(slope).astype(int)
        if d == 2:
            m = 0.5 * (a + b)
            fa, fm, fb = (self.law(t, np.full_like(t, v)) for v in (a, m, b))
            da = -3 * fa + 4 * fm - fb
            db = fa - 4 * fm + 3 * fb
            out = np.where(da * db < 0, NON_MONOTONE, np.sign(da + db)).astype(int)
            return out
        xs = np.linspace(a, b, N_MONOTONE_PROBES)
        vals = self.law(t[:, None], xs[None, :])
        diffs = np.diff(vals, axis=1)
        inc = np.all(diffs > 0, axis=1)
        dec = np.all(diffs < 0, axis=1)
        return np.where(inc, INCREASING, np.where(dec, DECREASING, NON_MONOTONE))

    def images(self, t):
        """Vectorised image intervals.

        Returns ``(lo, hi, lo_open, hi_open, ok)``; ``ok`` is False where
        l_t is not monotone.  On a right-open domain the endpoint l_t(b) is
        excluded from X_t.
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        a, b = self.domain.a, self.domain.b
        la = self.law(t, np.full_like(t, a))
        lb = self.law(t, np.full_like(t, b))
        cls = self.classify(t)
        inc = cls == INCREASING
        lo = np.where(inc, la, lb)
        hi = np.where(inc, lb, la)
        ro = self.domain.right_open
        hi_open = inc & ro
        lo_open = (cls == DECREASING) & ro
        return lo, hi, lo_open, hi_open, cls != NON_MONOTONE

    def contains(self, t, x):
        """Boolean mask of x in X_t (broadcasting t against x)."""
        t = np.asarray(t, dtype=float)
        lo, hi, lo_open, hi_open, ok = self.images(t.ravel())
        shape = t.shape
        lo, hi, lo_open, hi_open, ok = (v.reshape(shape) for v in (lo, hi, lo_open, hi_open, ok))
        return member(x, lo, hi, lo_open, hi_open, self.tol) & ok

    def inverse(self, t, x):
        """Vectorised l_t^{-1}(x) for points already known to lie in X_t.

        Affine maps are inverted in closed form; other monotone maps by
        bisection down to floating resolution.  Results are clipped to [a, b].
        """
        t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        a, b = self.domain.a, self.domain.b
        if self.affine:
            la = self.law(t, np.full(t.shape, a))
            lb = self.law(t, np.full(t.shape, b))
            with np.errstate(all="ignore"):
                y = a + (x - la) * (b - a) / (lb - la)
            return np.clip(y, a, b)
        sign = self.classify(t.ravel()).reshape(t.shape)
        lo = np.full(t.shape, a)
        hi = np.full(t.shape, b)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if np.all((mid == lo) | (mid == hi)):
                break
            above = (self.law(t, mid) - x) * sign > 0
            hi = np.where(above, mid, hi)
            lo = np.where(above, lo, mid)
        return 0.5 * (lo + hi)


def member(x, lo, hi, lo_open, hi_open, tol):
    """x in the interval with the given endpoint conventions, up to ``tol``."""
    above = np.where(lo_open, x > lo + tol, x >= lo - tol)
    below = np.where(hi_open, x < hi - tol, x <= hi + tol)
    return above & below


def extend(base, h=None, domain=None) -> MapFamily:
    """Extension of n base maps along the homotopy ``h`` (identity by default)."""
    return MapFamily(Family.extended(base, h), domain or Domain())


def apply(fam: MapFamily, t: float, x: float) -> float:
    return float(fam(float(t), float(x)))


def image_interval(fam: MapFamily, t: float) -> tuple[float, float]:
    lo, hi, _, _, ok = fam.images([t])
    if not ok[0]:
        raise NonInjective(f"l_t is not monotone at t={t}")
    return float(lo[0]), float(hi[0])


def invert(fam: MapFamily, t: float, x: float, tol: float = 1e-12) -> float:
    """y with l(t, y) = x; raises NotInImage / NonInjective."""
    lo, hi, lo_open, hi_open, ok = fam.images([t])
    if not ok[0]:
        raise NonInjective(f"l_t is not monotone at t={t}")
    if not member(x, lo, hi, lo_open, hi_open, tol)[0]:
        raise NotInImage(f"x={x} is not in X_t=[{lo[0]}, {hi[0]}] at t={t}")
    return float(fam.inverse(np.array([t]), np.array([x]))[0])


@dataclass(frozen=True)
class InjectivityProfile:
    non_injective_measure_estimate: float
    flagged_t: list


def injectivity_profile(fam: MapFamily, N_probe: int = 1024) -> InjectivityProfile:
    if N_probe < 2:
        raise ValueError("N_probe must be >= 2")
    ts = midpoints(fam.n, N_probe)
    bad = fam.classify(ts) == NON_MONOTONE
    return InjectivityProfile(float(bad.mean() * (fam.n - 1)), [float(t) for t in ts[bad]])


@dataclass(frozen=True)
class BaseTriple:
    """Parameters (l_i, q_i, s_i), i = 1..n, of a classical RB operator."""

    l: tuple
    q: tuple
    s: tuple
    domain: Domain = field(default_factory=Domain)

    def __post_init__(self):
        conv = lambda seq: tuple(parse(e) if isinstance(e, str) else e for e in seq)
        object.__setattr__(self, "l", conv(self.l))
        object.__setattr__(self, "q", conv(self.q))
        object.__setattr__(self, "s", conv(self.s))
        if not len(self.l) == len(self.q) == len(self.s):
            raise FamilyError("l, q and s lists differ in length")
        if len(self.l) < 2:
            raise IndexError("need n >= 2")

    @property
    def n(self):
        return len(self.l)

    def piece(self, i):
        """The i-th base map (0-based) as a t-independent MapFamily."""
        return MapFamily(Family.direct(self.l[i], 2), self.domain)


__all__ = [
    "Domain", "Homotopy", "Family", "MapFamily", "BaseTriple", "InjectivityProfile",
    "FamilyError", "NotInImage", "NonInjective",
    "INCREASING", "DECREASING", "NON_MONOTONE",
    "extend", "apply", "invert", "image_interval", "injectivity_profile",
    "double_endpoints", "member", "midpoints", "probe_times",
]
