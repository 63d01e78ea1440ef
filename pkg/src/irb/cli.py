"""Command line interface.

    irb run <config|scenario-name> [--nt N] [--nx N] [--tol T] [--out-dir D] [--svg]
    irb certify <config|scenario-name>
    irb embed-rb <config|scenario-name>
    irb approx-rb <config|scenario-name> --k 4,8,16,32
    irb scenario list
    irb scenario dump <name>

Exit status of ``run``: 0 when the certificate passes and the iteration
converges, 2 when the certificate fails (the iteration still runs), 1 on
errors or when K_max is exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import warnings

import numpy as np

from .certify import approx_rb_study, certify, continuity_diagnostic, embed_rb_check
from .config import ConfigError, Scenario, dump_config, load_config
from .expr import DomainError
from .export import export_csv, export_report, export_svg
from .family import FamilyError, NonInjective
from .fixpoint import NotContractive, solve
from .operator import GridFunction
from .scenarios import TEXTS, lookup

log = logging.getLogger("irb")

EXIT_OK, EXIT_ERROR, EXIT_CERT_FAIL = 0, 1, 2


def resolve(source: str) -> Scenario:
    if os.path.exists(source):
        return load_config(source)
    if source in TEXTS:
        return lookup(source)
    raise ConfigError(f"{source!r} is neither a config file nor a builtin scenario")


def _scenario(args) -> Scenario:
    sc = resolve(args.source)
    return sc.replace(nt=getattr(args, "nt", None), nx=getattr(args, "nx", None),
                      tol=getattr(args, "tol", None))


def _out_path(args, sc, configured, suffix):
    name = os.path.basename(configured) if configured else f"{sc.name}{suffix}"
    if args.out_dir:
        return os.path.join(args.out_dir, name)
    return configured or name


def run(sc: Scenario, out_dir=None, svg=False):
    """Certify, solve and export one scenario; returns (exit code, cert, report, paths)."""
    spec = sc.operator()
    cert = certify(spec)
    notes = []
    if spec.compiled.non_monotone_nodes:
        notes.append(f"{spec.compiled.non_monotone_nodes} quadrature nodes with non-injective l_t "
                     "contribute zero")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotContractive)
        report = solve(spec, sc.initial(), tol=sc.tol, K_max=sc.kmax,
                       SM=cert.criterion if cert.passed else None)
    ns = argparse.Namespace(out_dir=out_dir)
    paths = {"csv": _out_path(ns, sc, sc.csv, ".csv"),
             "report": _out_path(ns, sc, sc.report, ".report.json")}
    if svg or sc.svg:
        paths["svg"] = _out_path(ns, sc, sc.svg, ".svg")
    for p in paths.values():
        d = os.path.dirname(p)
        if d:
            os.makedirs(d, exist_ok=True)
    export_csv(report.kept, paths["csv"])
    export_report(sc, cert, report, paths["report"], notes)
    if "svg" in paths:
        export_svg(report.kept, paths["svg"])
    if not cert.passed:
        code = EXIT_CERT_FAIL
    elif report.converged:
        code = EXIT_OK
    else:
        code = EXIT_ERROR
    return code, cert, report, paths


def cmd_run(args):
    sc = _scenario(args)
    code, cert, report, paths = run(sc, args.out_dir, args.svg)
    print(f"{sc.name}: {cert.kind} criterion {cert.criterion:.6g} "
          f"({'pass' if cert.passed else 'FAIL'}), "
          f"{'converged' if report.converged else 'not converged'} after {report.iterations} iterations, "
          f"last residual {report.residuals[-1]:.3e}")
    for k, p in paths.items():
        print(f"  {k}: {p}")
    return code


def cmd_certify(args):
    sc = _scenario(args)
    spec = sc.operator()
    cert = certify(spec)
    out = {"certificate": cert.to_dict()}
    if spec.p is None:
        out["continuity"] = continuity_diagnostic(spec).certificate().to_dict()
    print(json.dumps(out, indent=2))
    return EXIT_OK if cert.passed else EXIT_CERT_FAIL


def cmd_embed(args):
    sc = _scenario(args)
    base = sc.triple()
    rng = np.random.default_rng(args.seed)
    f0 = sc.initial()
    fs = [f0] + [GridFunction(f0.a, f0.b, rng.uniform(-1, 1, f0.nx)) for _ in range(args.samples)]
    worst = max(embed_rb_check(base, f, sc.nt) for f in fs)
    print(f"{sc.name}: max |iRB - RB| over {len(fs)} functions = {worst:.3e}")
    return EXIT_OK


def cmd_approx(args):
    sc = _scenario(args)
    ks = [int(k) for k in args.k.split(",") if k.strip()]
    study = approx_rb_study(sc.triple(), ks, sc.initial(), sc.nt, double=sc.q.double or sc.s.double)
    print(f"{'k':>6} {'e_k':>14} {'bound_k':>14}")
    for k, e, b in zip(study.ks, study.e, study.bound):
        print(f"{k:>6d} {e:>14.6e} {b:>14.6e}")
    print(f"log-log slope {study.slope():.3f}; non-uniformity probe {study.nonuniform_probe:.6f}")
    for w in study.warnings:
        print(f"warning: {w}")
    return EXIT_OK


def cmd_scenario(args):
    if args.action == "list":
        for name in TEXTS:
            print(f"{name:20s} {lookup(name).description}")
        return EXIT_OK
    if not args.name:
        raise ConfigError("scenario dump needs a name")
    print(dump_config(lookup(args.name)), end="")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="irb", description="Integral Read-Bajraktarevic operators")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("source", help="config file or builtin scenario name")
        sp.add_argument("--nt", type=int, help="quadrature panels over [1, n]")
        sp.add_argument("--nx", type=int, help="grid points over the domain")
        sp.add_argument("--tol", type=float, help="residual tolerance")
        sp.add_argument("--out-dir", help="directory for output files")

    sp = sub.add_parser("run", help="certify and solve a scenario")
    common(sp)
    sp.add_argument("--svg", action="store_true", help="also write an SVG plot")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("certify", help="print contraction and continuity certificates")
    common(sp)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("embed-rb", help="compare the RB operator with its step-homotopy iRB twin")
    common(sp)
    sp.add_argument("--samples", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_embed)

    sp = sub.add_parser("approx-rb", help="ramp-homotopy approximation study")
    common(sp)
    sp.add_argument("--k", default="4,8,16,32", help="comma separated ramp parameters")
    sp.set_defaults(func=cmd_approx)

    sp = sub.add_parser("scenario", help="list or dump builtin scenarios")
    sp.add_argument("action", choices=("list", "dump"))
    sp.add_argument("name", nargs="?")
    sp.set_defaults(func=cmd_scenario)
    return p


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FamilyError, NonInjective, DomainError, KeyError, OSError, ValueError) as err:
        log.error("%s", err)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
