"""L1 residual ratios of the spike scenario across x-grid sizes.

When the grid step (b - a)/(N_x - 1) carries a large power of two, the
doubling maps send grid points (almost) onto grid points, so the singular
sample next to x = 0 is copied at full height into ever more cells instead
of being thinned out.  The discrete L1 residual then grows by about 3/2 per
step until the copies fill the grid; other grid sizes contract at 3/4.
"""

import argparse
from dataclasses import dataclass

from irb import certify, iterate, norm
from irb.scenarios import lookup


@dataclass
class Config:
    sizes: tuple = (600, 999, 1000, 1001, 1024, 1025, 1500, 2048, 2049)
    K: int = 30


def two_adic(m):
    v = 0
    while m % 2 == 0:
        m //= 2
        v += 1
    return v


def main(cfg: Config):
    print(f"{'N_x':>6} {'v2(N_x-1)':>9} {'max r_k+1/r_k':>14} {'bound margin':>13}")
    for nx in cfg.sizes:
        spec = lookup("lp-spike").replace(nx=nx).operator()
        SM = certify(spec).criterion
        its = iterate(spec, spec.zero(), cfg.K)
        r = [norm(its[k] - its[k - 1], 1) for k in range(1, cfg.K + 1)]
        ratio = max(b / a for a, b in zip(r, r[1:]))
        margin = min(SM / (1 - SM) * r[k - 1] - norm(its[k] - its[cfg.K], 1) + 5e-4
                     for k in range(2, cfg.K + 1))
        print(f"{nx:>6d} {two_adic(nx - 1):>9d} {ratio:>14.4f} {margin:>13.3e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default=",".join(map(str, Config.sizes)))
    a = ap.parse_args()
    main(Config(tuple(int(s) for s in a.sizes.split(","))))
