"""Run every builtin scenario and write CSV, SVG and report files."""

import argparse
import warnings
from dataclasses import dataclass

from irb.cli import run
from irb.fixpoint import NotContractive
from irb.scenarios import TEXTS, lookup


@dataclass
class Config:
    out_dir: str = "out/examples"
    scenarios: tuple = tuple(TEXTS)


def main(cfg: Config):
    for name in cfg.scenarios:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NotContractive)
            code, cert, rep, paths = run(lookup(name), cfg.out_dir, svg=True)
        print(f"{name:18s} exit {code}  {cert.kind:7s} criterion {cert.criterion:.4f}  "
              f"iterations {rep.iterations:3d}  residual {rep.residuals[-1]:.2e}  -> {paths['svg']}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default=Config.out_dir)
    ap.add_argument("names", nargs="*")
    a = ap.parse_args()
    main(Config(a.out_dir, tuple(a.names) or Config.scenarios))
