"""Builtin scenarios reproducing the worked examples."""

from __future__ import annotations

from .config import Scenario, parse_config

_AFFINE_PAIR = "x/2; x/2 + 1/2"

TEXTS = {
    "exa1": f"""
[scenario]
name = exa1
description = discontinuous bounded solution, h = identity

[domain]
a = 0
b = 1

[time]
n = 2

[maps]
base = {_AFFINE_PAIR}
homotopy = identity

[q]
expr = ge(x, 2 - t)

[s]
expr = (1/2)*x*(t - 1)
""",
    "exa2": f"""
[scenario]
name = exa2
description = continuous bounded solution, h = identity

[domain]
a = 0
b = 1

[time]
n = 2

[maps]
base = {_AFFINE_PAIR}
homotopy = identity

[q]
expr = 2*x*(t - 1)

[s]
expr = (1/2)*x*(t - 1)
""",
    "parabola": f"""
[scenario]
name = parabola
description = step-homotopy iRB operator equal to an RB operator with fixed point 2x(1-x)

[domain]
a = 0
b = 1
right_open = true

[time]
n = 2

[maps]
base = {_AFFINE_PAIR}
homotopy = step(0.5)

[q]
base = x/2; -x/2 + 1/2
double = true

[s]
base = 1/4; 1/4
double = true
""",
    "takagi": f"""
[scenario]
name = takagi
description = Takagi function as an iRB fixed point

[domain]
a = 0
b = 1
right_open = true

[time]
n = 2

[maps]
base = {_AFFINE_PAIR}
homotopy = step(0.5)

[q]
base = x/2; -x/2 + 1/2
double = true

[s]
base = 1/2; 1/2
double = true

[run]
kmax = 60
""",
    "lp-spike": f"""
[scenario]
name = lp-spike
description = L1 solution with 1/sqrt(x) spikes

[domain]
a = 0
b = 1
right_open = true
delta = 1e-6
# a grid step without a large power-of-two factor avoids aliasing x -> 2x
nx = 1000

[time]
n = 2

[maps]
base = {_AFFINE_PAIR}
homotopy = step(0.5)

[q]
expr = 1/sqrt(x)

[s]
expr = 3/2

[run]
space = lp(1)
tol = 1e-4
""",
    "noninjective-demo": """
[scenario]
name = noninjective-demo
description = extension of two injective maps that is not injective for t in (4/3, 2)

[domain]
a = 0
b = 1

[time]
n = 2

[maps]
base = x/2; 1 - x^2/2
homotopy = identity

[q]
expr = x

[s]
expr = 1/2
""",
    "nonuniform-demo": f"""
[scenario]
name = nonuniform-demo
description = ramp operators converge to the step operator pointwise but not uniformly

[domain]
a = 0
b = 1
right_open = true

[time]
n = 2

[maps]
base = {_AFFINE_PAIR}
homotopy = step(0.5)

[q]
base = 0; 0
double = false

[s]
base = 1; 1
double = false
""",
}


def builtin_scenarios() -> dict[str, Scenario]:
    return {name: parse_config(text) for name, text in TEXTS.items()}


def lookup(name: str) -> Scenario:
    try:
        return parse_config(TEXTS[name])
    except KeyError:
        raise KeyError(f"no builtin scenario {name!r}; known: {', '.join(TEXTS)}") from None


__all__ = ["TEXTS", "builtin_scenarios", "lookup"]
