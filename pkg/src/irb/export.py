"""CSV, SVG and JSON report writers."""

from __future__ import annotations

import csv
import json
import math

import numpy as np

STROKES = ("#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#d62728", "#8c564b", "#e377c2", "#17becf")
WIDTH, HEIGHT, MARGIN = 800, 600, 40


def _items(iterates):
    if isinstance(iterates, dict):
        items = sorted(iterates.items())
    else:
        items = list(enumerate(iterates))
    if not items:
        raise ValueError("no iterates to export")
    return items


def export_csv(iterates, path):
    """Columns x, f<k>...; 17 significant digits so values read back bitwise."""
    items = _items(iterates)
    x = items[0][1].x
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["x"] + [f"f{k}" for k, _ in items])
        for i in range(x.size):
            w.writerow([f"{x[i]:.17g}"] + [f"{f.values[i]:.17g}" for _, f in items])


def read_csv(path):
    """Inverse of :func:`export_csv`: (x, {k: values})."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], np.array([[float(v) for v in r] for r in rows[1:]])
    return data[:, 0], {int(h[1:]): data[:, j] for j, h in enumerate(header) if j}


def export_svg(iterates, path):
    items = _items(iterates)
    x = items[0][1].x
    ys = np.concatenate([f.values for _, f in items])
    lo, hi = float(ys.min()), float(ys.max())
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    sx = (WIDTH - 2 * MARGIN) / (x[-1] - x[0])
    sy = (HEIGHT - 2 * MARGIN) / (hi - lo)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}">',
             f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
    for n, (k, f) in enumerate(items):
        px = MARGIN + (x - x[0]) * sx
        py = HEIGHT - MARGIN - (f.values - lo) * sy
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        parts.append(f'<polyline fill="none" stroke="{STROKES[n % len(STROKES)]}" '
                     f'stroke-width="1.5" points="{pts}"><title>f{k}</title></polyline>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {k: _clean(w) for k, w in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(w) for w in v]
    if isinstance(v, np.generic):
        return _clean(v.item())
    return v


def report_dict(scenario, certificate, report, extra_warnings=()):
    from .config import dump_config
    return _clean({
        "scenario": {"name": scenario.name, "config": dump_config(scenario)},
        "certificate": certificate.to_dict(),
        "iterations": {"count": report.iterations, "converged": report.converged},
        "residuals": list(report.residuals),
        "bounds": None if report.bounds is None else list(report.bounds),
        "warnings": list(extra_warnings) + list(report.warnings) + list(certificate.notes),
    })


def export_report(scenario, certificate, report, path, extra_warnings=()):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_dict(scenario, certificate, report, extra_warnings), fh, indent=2, ensure_ascii=False)
        fh.write("\n")


__all__ = ["export_csv", "read_csv", "export_svg", "export_report", "report_dict"]
