"""Picard iteration with residual tracking and a-posteriori error bounds."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .family import BaseTriple
from .operator import GridFunction, OperatorSpec, apply_irb, apply_rb, norm

KEEP_FIRST = 4


class NotContractive(RuntimeWarning):
    pass


def _apply(op, f):
    if isinstance(op, BaseTriple):
        return apply_rb(op, f)
    return apply_irb(op, f)


def iterate(op: OperatorSpec | BaseTriple, f0: GridFunction, K: int) -> list[GridFunction]:
    """[f_0, f_1, ..., f_K] with f_k = T(f_{k-1})."""
    if K < 1:
        raise ValueError("K must be >= 1")
    out = [f0]
    for _ in range(K):
        out.append(_apply(op, out[-1]))
    return out


@dataclass
class IterationReport:
    kept: dict                # iteration index -> GridFunction (first few and the last)
    residuals: list           # r_k = ||f_k - f_{k-1}||, k = 1..iterations
    bounds: list | None       # SM / (1 - SM) * r_k when a contraction factor < 1 was given
    converged: bool
    iterations: int
    warnings: list = field(default_factory=list)

    @property
    def solution(self) -> GridFunction:
        return self.kept[self.iterations]


def solve(op, f0: GridFunction, tol: float = 1e-6, K_max: int = 50,
          SM: float | None = None, p: float | None = "auto") -> IterationReport:
    """Iterate until the residual drops to ``tol`` or ``K_max`` steps are done.

    ``SM`` is the certified contraction factor; when it is below 1 the
    a-posteriori bound SM/(1-SM) r_k on ||f_k - f|| is recorded for every k.
    ``p`` defaults to the operator's own norm.
    """
    if tol <= 0 or K_max < 1:
        raise ValueError("need tol > 0 and K_max >= 1")
    if p == "auto":
        p = getattr(op, "p", None)
    factor = SM / (1.0 - SM) if SM is not None and SM < 1 else None

    kept = {0: f0}
    residuals, bounds, notes = [], ([] if factor is not None else None), []
    f, rises, converged = f0, 0, False
    for k in range(1, K_max + 1):
        g = _apply(op, f)
        r = norm(g - f, p)
        if residuals and r > residuals[-1]:
            rises += 1
            if rises == 3:
                msg = f"residuals increased for 3 consecutive steps (k={k})"
                warnings.warn(msg, NotContractive, stacklevel=2)
                notes.append(msg)
        else:
            rises = 0
        residuals.append(r)
        if factor is not None:
            bounds.append(factor * r)
        if k <= KEEP_FIRST:
            kept[k] = g
        f = g
        if r <= tol:
            converged = True
            break
    kept[len(residuals)] = f
    return IterationReport(kept, residuals, bounds, converged, len(residuals), notes)


__all__ = ["iterate", "solve", "IterationReport", "NotContractive"]
