"""Scenario files: a small INI dialect whose values are mostly expressions.

Example::

    [scenario]
    name = exa1

    [domain]
    a = 0
    b = 1

    [time]
    n = 2

    [maps]
    base = x/2; x/2 + 1/2
    homotopy = identity

    [q]
    expr = ge(x, 2 - t)

    [s]
    expr = (1/2)*x*(t - 1)

Lists of expressions are separated by ``;`` (commas belong to function
calls).  Comment lines start with ``#``.  The reader is hand-written
because errors must carry line numbers, which ``configparser`` does not
expose.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass

import numpy as np

from .expr import Expr, LexError, ParseError, evaluate, parse, pretty
from .family import BaseTriple, Domain, Family, FamilyError, Homotopy, MapFamily, double_endpoints
from .operator import GridFunction, OperatorSpec

SECTIONS = ("scenario", "domain", "time", "maps", "q", "s", "run", "output")
KEYS = {
    "scenario": {"name", "description"},
    "domain": {"a", "b", "nx", "delta", "right_open"},
    "time": {"n", "nt"},
    "maps": {"expr", "base", "homotopy"},
    "q": {"expr", "base", "double"},
    "s": {"expr", "base", "double"},
    "run": {"space", "tol", "kmax", "f0"},
    "output": {"csv", "svg", "report"},
}
MANDATORY = ("domain", "time", "maps", "q", "s")


class ConfigError(ValueError):
    def __init__(self, message, section=None, key=None, line=None):
        where = []
        if section:
            where.append(f"[{section}]" + (f" {key}" if key else ""))
        if line:
            where.append(f"line {line}")
        super().__init__(f"{message}" + (f" ({', '.join(where)})" if where else ""))
        self.section, self.key, self.line = section, key, line


@dataclass(frozen=True)
class FieldSpec:
    """A parameter function given directly or as n base functions."""

    expr: Expr | None = None
    base: tuple | None = None
    double: bool = False


@dataclass(frozen=True, kw_only=True)
class Scenario:
    name: str = "scenario"
    description: str = ""
    a: float
    b: float
    nx: int = 1025
    delta: float = 0.0
    right_open: bool = False
    n: int
    nt: int = 512
    maps: FieldSpec
    homotopy: Homotopy = Homotopy()
    q: FieldSpec
    s: FieldSpec
    p: float | None = None
    tol: float = 1e-6
    kmax: int = 50
    f0: object = "zero"  # "zero" | "one" | Expr in x
    csv: str | None = None
    svg: str | None = None
    report: str | None = None

    def __post_init__(self):
        if self.nt % (2 * (self.n - 1)):
            raise ConfigError(f"nt={self.nt} must be divisible by 2(n-1)={2 * (self.n - 1)}", "time", "nt")
        if self.nx < 2:
            raise ConfigError("nx must be >= 2", "domain", "nx")
        if not self.tol > 0:
            raise ConfigError("tol must be > 0", "run", "tol")
        for sec, fs in (("maps", self.maps), ("q", self.q), ("s", self.s)):
            if fs.base is not None and len(fs.base) != self.n:
                raise ConfigError(f"{len(fs.base)} base expressions for n={self.n}", sec, "base")

    @property
    def domain(self):
        return Domain(self.a, self.b, self.right_open)

    def replace(self, **changes):
        changes = {k: v for k, v in changes.items() if v is not None}
        return dataclasses.replace(self, **changes)

    def _family(self, fs: FieldSpec, section):
        if fs.expr is not None:
            return Family.direct(fs.expr, self.n)
        if self.maps.base is None:
            raise ConfigError("base lists need extended maps", section, "base")
        base = double_endpoints(fs.base) if fs.double else list(fs.base)
        return Family.extended(base, self.homotopy)

    def map_family(self) -> MapFamily:
        if self.maps.expr is not None:
            return MapFamily(Family.direct(self.maps.expr, self.n), self.domain)
        return MapFamily(Family.extended(self.maps.base, self.homotopy), self.domain)

    def operator(self) -> OperatorSpec:
        return OperatorSpec(self.map_family(), self._family(self.q, "q"), self._family(self.s, "s"),
                            nt=self.nt, nx=self.nx, delta=self.delta, p=self.p)

    def triple(self) -> BaseTriple:
        for sec, fs in (("maps", self.maps), ("q", self.q), ("s", self.s)):
            if fs.base is None:
                raise ConfigError("RB comparison needs base lists for maps, q and s", sec, "base")
        return BaseTriple(self.maps.base, self.q.base, self.s.base, self.domain)

    def initial(self) -> GridFunction:
        a0 = self.a + self.delta
        if self.f0 == "zero":
            return GridFunction.constant(0.0, a0, self.b, self.nx)
        if self.f0 == "one":
            return GridFunction.constant(1.0, a0, self.b, self.nx)
        return GridFunction.from_callable(lambda x: evaluate(self.f0, 1.0, x), a0, self.b, self.nx)


# ----------------------------------------------------------------- reader

_SECTION = re.compile(r"^\[\s*([A-Za-z_-]+)\s*\]$")


def _read_ini(text):
    sections, current = {}, None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _SECTION.match(line)
        if m:
            current = m.group(1).lower()
            if current not in SECTIONS:
                raise ConfigError(f"unknown section [{current}]", line=lineno)
            if current in sections:
                raise ConfigError(f"duplicate section [{current}]", current, line=lineno)
            sections[current] = {"__line__": lineno}
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", current, line=lineno)
        if current is None:
            raise ConfigError("key outside of any section", line=lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.lower()
        if key not in KEYS[current]:
            raise ConfigError(f"unknown key {key!r}", current, key, lineno)
        if key in sections[current]:
            raise ConfigError(f"duplicate key {key!r}", current, key, lineno)
        sections[current][key] = (value, lineno)
    return sections


class _Reader:
    def __init__(self, sections):
        self.sections = sections

    def has(self, section, key):
        return key in self.sections.get(section, {})

    def raw(self, section, key, default=None, required=False):
        sec = self.sections.get(section)
        if sec is None or key not in sec:
            if required:
                line = sec["__line__"] if sec else None
                raise ConfigError("missing mandatory key", section, key, line)
            return default, None
        return sec[key]

    def get(self, section, key, conv, default=None, required=False):
        value, line = self.raw(section, key, default, required)
        if line is None:
            return default
        try:
            return conv(value)
        except (ValueError, LexError, ParseError, FamilyError) as err:
            raise ConfigError(f"bad value {value!r}: {err}", section, key, line) from None


def _bool(text):
    t = text.lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError("expected true/false")


def _int(text):
    v = float(text)
    if not v.is_integer():
        raise ValueError("expected an integer")
    return int(v)


def _space(text):
    t = text.replace(" ", "").lower()
    if t == "sup":
        return None
    m = re.fullmatch(r"lp\(([^)]+)\)", t)
    if not m:
        raise ValueError("expected 'sup' or 'lp(p)'")
    p = float(m.group(1))
    if p < 1:
        raise ValueError("p must be >= 1")
    return p


def _expr_list(text):
    parts = [p.strip() for p in text.split(";")]
    if any(not p for p in parts):
        raise ValueError("empty entry in ';'-separated list")
    return tuple(parse(p) for p in parts)


def _f0(text):
    t = text.strip()
    return t if t in ("zero", "one") else parse(t)


def _field(r, section, allow_double):
    has_expr, has_base = r.has(section, "expr"), r.has(section, "base")
    line = r.sections[section]["__line__"]
    if has_expr == has_base:
        raise ConfigError("give exactly one of 'expr' or 'base'", section, line=line)
    if has_expr:
        if allow_double and r.has(section, "double"):
            raise ConfigError("'double' applies to base lists only", section, "double",
                              r.raw(section, "double")[1])
        return FieldSpec(expr=r.get(section, "expr", parse))
    double = r.get(section, "double", _bool, False) if allow_double else False
    return FieldSpec(base=r.get(section, "base", _expr_list), double=double)


def parse_config(text: str) -> Scenario:
    sections = _read_ini(text)
    for sec in MANDATORY:
        if sec not in sections:
            raise ConfigError(f"missing section [{sec}]", sec)
    r = _Reader(sections)
    maps = _field(r, "maps", False)
    if maps.expr is not None and r.has("maps", "homotopy"):
        raise ConfigError("homotopy applies to base maps only", "maps", "homotopy",
                          r.raw("maps", "homotopy")[1])
    kwargs = dict(
        name=r.get("scenario", "name", str, "scenario"),
        description=r.get("scenario", "description", str, ""),
        a=r.get("domain", "a", float, required=True),
        b=r.get("domain", "b", float, required=True),
        nx=r.get("domain", "nx", _int, 1025),
        delta=r.get("domain", "delta", float, 0.0),
        right_open=r.get("domain", "right_open", _bool, False),
        n=r.get("time", "n", _int, required=True),
        nt=r.get("time", "nt", _int, 512),
        maps=maps,
        homotopy=r.get("maps", "homotopy", Homotopy.from_string, Homotopy()),
        q=_field(r, "q", True),
        s=_field(r, "s", True),
        p=r.get("run", "space", _space, None),
        tol=r.get("run", "tol", float, 1e-6),
        kmax=r.get("run", "kmax", _int, 50),
        f0=r.get("run", "f0", _f0, "zero"),
        csv=r.get("output", "csv", str, None),
        svg=r.get("output", "svg", str, None),
        report=r.get("output", "report", str, None),
    )
    if kwargs["n"] < 2:
        raise ConfigError("n must be >= 2", "time", "n", r.raw("time", "n")[1])
    try:
        return Scenario(**kwargs)
    except FamilyError as err:
        raise ConfigError(str(err)) from None


def load_config(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


# ----------------------------------------------------------------- writer


def _fmt(v):
    return repr(float(v))


def _field_lines(fs, with_double):
    if fs.expr is not None:
        return [f"expr = {pretty(fs.expr)}"]
    lines = [f"base = {'; '.join(pretty(e) for e in fs.base)}"]
    if with_double:
        lines.append(f"double = {str(fs.double).lower()}")
    return lines


def dump_config(sc: Scenario) -> str:
    out = ["[scenario]", f"name = {sc.name}"]
    if sc.description:
        out.append(f"description = {sc.description}")
    out += ["", "[domain]", f"a = {_fmt(sc.a)}", f"b = {_fmt(sc.b)}", f"nx = {sc.nx}",
            f"delta = {_fmt(sc.delta)}", f"right_open = {str(sc.right_open).lower()}",
            "", "[time]", f"n = {sc.n}", f"nt = {sc.nt}", "", "[maps]"]
    out += _field_lines(sc.maps, False)
    if sc.maps.base is not None:
        out.append(f"homotopy = {sc.homotopy}")
    out += ["", "[q]"] + _field_lines(sc.q, True)
    out += ["", "[s]"] + _field_lines(sc.s, True)
    space = "sup" if sc.p is None else f"lp({sc.p!r})"
    f0 = sc.f0 if isinstance(sc.f0, str) else pretty(sc.f0)
    out += ["", "[run]", f"space = {space}", f"tol = {sc.tol!r}", f"kmax = {sc.kmax}", f"f0 = {f0}"]
    outputs = [(k, getattr(sc, k)) for k in ("csv", "svg", "report") if getattr(sc, k)]
    if outputs:
        out += ["", "[output]"] + [f"{k} = {v}" for k, v in outputs]
    return "\n".join(out) + "\n"


__all__ = ["Scenario", "FieldSpec", "ConfigError", "parse_config", "load_config", "dump_config"]
