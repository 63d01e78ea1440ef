"""Contraction certificates, continuity diagnostics and RB comparisons."""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .expr import DomainError
from .family import (NON_MONOTONE, BaseTriple, Family, Homotopy, MapFamily,
                     double_endpoints, injectivity_profile, midpoints, probe_times)
from .hit import boundary_time_measure, max_hit_measure
from .operator import GridFunction, OperatorSpec, apply_irb, apply_rb, norm

JUMP_FACTOR = 10.0
DIFF_STEP = 1e-6


@dataclass
class Certificate:
    kind: str                 # bounded | lp | continuity
    constants: dict
    criterion: float
    passed: bool
    method: str               # exact-affine | sampled
    samples: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


def _s_sup(spec, N_t, N_x):
    d = spec.fam.domain
    return spec.s.sup_abs(d.a, d.b, N_t, N_x)


def certify_bounded(spec: OperatorSpec, N_t: int = 512, N_x: int = 1025) -> Certificate:
    """S = sup |s|, M = max hit-time measure; passes iff S * M < 1."""
    if N_t < 2 or N_x < 2:
        raise ValueError("sampling counts must be >= 2")
    d = spec.fam.domain
    S, exact = _s_sup(spec, N_t, N_x)
    grid = np.linspace(d.a + spec.delta, d.b, N_x)
    M = max_hit_measure(spec.fam, grid, N_t)
    crit = S * M.measure
    return Certificate(
        "bounded",
        {"S": S, "M": M.measure, "M_resolution": M.resolution, "M_argmax_x": M.x},
        crit, crit < 1.0, "exact-affine" if exact else "sampled",
        {"N_t": N_t, "N_x": N_x},
    )


def _jacobian_sup(fam: MapFamily, N_t, N_x):
    d = fam.domain
    law = fam.law
    if fam.affine:
        if law.base is not None and law.h.kind != "custom":
            ts = np.arange(1.0, fam.n + 1)
            exact = True
        else:
            ts = probe_times(fam.n, N_t)
            exact = law.bilinear
        slope = (fam(ts, np.full_like(ts, d.b)) - fam(ts, np.full_like(ts, d.a))) / (d.b - d.a)
        return float(np.max(np.abs(slope))), exact, 0
    ts = probe_times(fam.n, N_t)
    ok = fam.classify(ts) != NON_MONOTONE
    xs = np.linspace(d.a + DIFF_STEP, d.b - DIFF_STEP, N_x)
    tt, xx = np.meshgrid(ts[ok], xs, indexing="ij")
    deriv = (fam(tt, xx + DIFF_STEP) - fam(tt, xx - DIFF_STEP)) / (2 * DIFF_STEP)
    return float(np.max(np.abs(deriv))) if deriv.size else 0.0, False, int((~ok).sum())


def certify_lp(spec: OperatorSpec, p: float = 1.0, N_t: int = 512, N_x: int = 1025) -> Certificate:
    """(n-1) S L^(1/p) < 1 with L = sup |d l_t / dx|."""
    if not 1 <= p < math.inf:
        raise ValueError("p must lie in [1, inf)")
    S, s_exact = _s_sup(spec, N_t, N_x)
    L, l_exact, bad = _jacobian_sup(spec.fam, N_t, N_x)
    crit = (spec.n - 1) * S * L ** (1.0 / p)
    notes = [f"{bad} probe times with non-monotone l_t skipped"] if bad else []
    return Certificate(
        "lp", {"S": S, "L": L, "p": p}, crit, crit < 1.0,
        "exact-affine" if s_exact and l_exact else "sampled",
        {"N_t": N_t, "N_x": N_x, "non_injective_probes": bad}, notes,
    )


def certify(spec: OperatorSpec, N_t: int | None = None, N_x: int | None = None) -> Certificate:
    """Certificate matching the operator's space (sup or L^p)."""
    N_t = N_t or spec.nt
    N_x = N_x or spec.nx
    if spec.p is None:
        return certify_bounded(spec, N_t, N_x)
    return certify_lp(spec, spec.p, N_t, N_x)


# ------------------------------------------------------------ continuity


@dataclass
class ContinuityDiagnostic:
    x: np.ndarray
    inverse: np.ndarray       # measure of D_x(l^-1)
    q: np.ndarray             # measure of D_x(q o l^-1)
    s: np.ndarray             # measure of D_x(s o l^-1)
    boundary: np.ndarray      # measure of {t : x in boundary of X_t}
    threshold: float
    predicts_continuous: bool

    def certificate(self):
        worst = float(max(self.inverse.max(), self.q.max(), self.s.max(), self.boundary.max()))
        return Certificate(
            "continuity",
            {"max_inverse": float(self.inverse.max()), "max_q": float(self.q.max()),
             "max_s": float(self.s.max()), "max_boundary": float(self.boundary.max())},
            worst, self.predicts_continuous, "sampled",
            {"probes": int(self.x.size)},
        )


def _jumps(g, eps):
    """g has columns at x - 2eps, x - eps, x + eps, x + 2eps."""
    score = np.abs(g[:, 2] - g[:, 1])
    slope = np.maximum(np.abs(g[:, 1] - g[:, 0]), np.abs(g[:, 3] - g[:, 2])) / eps
    return score > np.maximum(JUMP_FACTOR * eps * slope, 1e-9)


def continuity_diagnostic(spec: OperatorSpec, grid=None, N_t: int | None = None) -> ContinuityDiagnostic:
    """Estimate the discontinuity-time measures at each probe x.

    A t-node counts as a discontinuity time of g when the jump
    |g(x + eps) - g(x - eps)| exceeds JUMP_FACTOR * eps times the one-sided
    slope seen just outside the probe pair; eps is twice the operator's
    x-grid step.
    The answer is a prediction from samples, not a proof.
    """
    d = spec.fam.domain
    N_t = N_t or spec.nt
    grid = np.linspace(d.a, d.b, 65) if grid is None else np.atleast_1d(np.asarray(grid, dtype=float))
    eps = 2 * (d.b - d.a - spec.delta) / (spec.nx - 1)
    ts = midpoints(spec.n, N_t)
    scale = (spec.n - 1) / N_t
    fam = spec.fam
    out = {k: np.zeros(grid.size) for k in ("inverse", "q", "s", "boundary")}
    for i, x in enumerate(grid):
        offs = np.clip(x + eps * np.array([-2.0, -1.0, 1.0, 2.0]), d.a, d.b)
        tt = np.broadcast_to(ts[:, None], (ts.size, 4))
        xx = np.broadcast_to(offs[None, :], tt.shape)
        usable = np.all(fam.contains(tt, xx), axis=1)
        if usable.any():
            tu = tt[usable]
            y = fam.inverse(tu, xx[usable])
            out["inverse"][i] = _jumps(y, eps).sum() * scale
            for key, func in (("q", spec.q), ("s", spec.s)):
                try:
                    g = np.asarray(func(tu, y), dtype=float)
                except DomainError:
                    g = np.full(y.shape, np.inf)
                out[key][i] = _jumps(np.nan_to_num(g, posinf=1e300), eps).sum() * scale
        out["boundary"][i] = boundary_time_measure(fam, x, N_t)
    threshold = (spec.n - 1) / N_t
    predicts = all(np.all(v < threshold) for v in out.values())
    return ContinuityDiagnostic(grid, out["inverse"], out["q"], out["s"], out["boundary"],
                                threshold, predicts)


# ---------------------------------------------------- RB as a special case


def step_operator(base: BaseTriple, nt: int, nx: int, double: bool = True,
                  h: Homotopy | None = None, delta: float = 0.0) -> OperatorSpec:
    """iRB operator of the extensions of (l_i, q_i, s_i) along ``h``.

    With the default step homotopy and ``double`` (end functions q_1, q_n,
    s_1, s_n multiplied by 2) this reproduces the RB operator of the triple.
    """
    h = h or Homotopy.step(0.5)
    q = double_endpoints(base.q) if double else list(base.q)
    s = double_endpoints(base.s) if double else list(base.s)
    fam = MapFamily(Family.extended(base.l, h), base.domain)
    return OperatorSpec(fam, Family.extended(q, h), Family.extended(s, h), nt=nt, nx=nx, delta=delta)


def _check_alignment(n, nt):
    if nt % (2 * (n - 1)):
        raise ValueError(f"N_t={nt} must be divisible by 2(n-1)={2 * (n - 1)} to align panels")


def embed_rb_check(base: BaseTriple, f: GridFunction, N_t: int = 512) -> float:
    """Sup-grid distance between the RB operator and its step-homotopy iRB twin."""
    _check_alignment(base.n, N_t)
    spec = step_operator(base, N_t, f.nx, delta=f.a - base.domain.a)
    return norm(apply_irb(spec, f) - apply_rb(base, f))


@dataclass
class ApproxStudy:
    ks: list
    e: list
    bound: list
    nonuniform_probe: float
    C_q: float
    C_s: float
    warnings: list = field(default_factory=list)

    def slope(self):
        """Least-squares slope of log e_k against log k."""
        e = np.asarray(self.e)
        keep = e > 0
        if keep.sum() < 2:
            return float("nan")
        return float(np.polyfit(np.log(np.asarray(self.ks)[keep]), np.log(e[keep]), 1)[0])


def approx_rb_study(base: BaseTriple, ks, f: GridFunction, N_t: int = 512,
                    double: bool = True) -> ApproxStudy:
    """Compare ramp-homotopy operators T^(k) against the step operator T.

    With ``double`` T is the RB operator of the triple.  The bound is
    2 (n-1) (C_q + C_s ||f||) / k with C_q, C_s the sup of the (doubled)
    extended q and s.
    """
    ks = [int(k) for k in ks]
    if any(k < 2 for k in ks):
        raise ValueError("every k must be >= 2")
    _check_alignment(base.n, N_t)
    delta = f.a - base.domain.a
    step = step_operator(base, N_t, f.nx, double=double, delta=delta)

    def reference(g):
        return apply_rb(base, g) if double else apply_irb(step, g)

    d = base.domain
    xs = np.linspace(d.a, d.b, 1025)
    q = double_endpoints(base.q) if double else list(base.q)
    s = double_endpoints(base.s) if double else list(base.s)
    C_q = max(float(np.max(np.abs(np.broadcast_to(e(1.0, xs), xs.shape)))) for e in q)
    C_s = max(float(np.max(np.abs(np.broadcast_to(e(1.0, xs), xs.shape)))) for e in s)

    Tf = reference(f)
    fnorm = norm(f)
    es, bounds, notes = [], [], []
    ramp_ops = {}
    for k in ks:
        op = step_operator(base, N_t, f.nx, double=double, h=Homotopy.ramp(k), delta=delta)
        prof = injectivity_profile(op.fam, N_t)
        if prof.non_injective_measure_estimate >= 0.05:
            msg = f"ramp k={k}: non-injective measure {prof.non_injective_measure_estimate:.3f}"
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
            notes.append(msg)
        ramp_ops[k] = op
        es.append(norm(apply_irb(op, f) - Tf))
        bounds.append(2 * (base.n - 1) * (C_q + C_s * fnorm) / k)

    kmax = max(ks)
    spike_vals = np.full(f.nx, float(kmax))
    spike_vals[-1] = 0.0
    spike = GridFunction(f.a, f.b, spike_vals)
    probe = norm(reference(spike) - apply_irb(ramp_ops[kmax], spike))
    return ApproxStudy(ks, es, bounds, probe, C_q, C_s, notes)


__all__ = [
    "Certificate", "ContinuityDiagnostic", "ApproxStudy",
    "certify", "certify_bounded", "certify_lp", "continuity_diagnostic",
    "step_operator", "embed_rb_check", "approx_rb_study",
]
