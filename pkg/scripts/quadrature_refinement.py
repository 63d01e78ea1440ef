"""Sup-norm change of T f when the number of t-panels doubles."""

import argparse
from dataclasses import dataclass

from irb import apply_irb, norm
from irb.scenarios import lookup


@dataclass
class Config:
    scenarios: tuple = ("exa1", "exa2")
    panels: tuple = (16, 32, 64, 128, 256, 512)


def main(cfg: Config):
    for name in cfg.scenarios:
        sc = lookup(name)
        prev = None
        print(name)
        for nt in cfg.panels:
            spec = sc.replace(nt=nt).operator()
            g = apply_irb(spec, spec.grid_function(lambda x: x * x))
            if prev is not None:
                d = norm(g - prev)
                print(f"  N_t {nt // 2:>5d} -> {nt:<5d} diff {d:.3e}  N_t * diff {d * nt / 2:.4f}")
            prev = g


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*")
    a = ap.parse_args()
    main(Config(tuple(a.names) or Config.scenarios))
