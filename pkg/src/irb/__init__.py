"""Integral Read-Bajraktarevic operators: construction, certification and fixed points."""

from .expr import DomainError, LexError, ParseError, evaluate, parse, pretty, tokenize
from .family import (BaseTriple, Domain, Family, Homotopy, MapFamily, NonInjective, NotInImage,
                     double_endpoints, extend, injectivity_profile, invert)
from .hit import HitSet, boundary_time_measure, hit_times, max_hit_measure
from .operator import GridFunction, OperatorSpec, apply_irb, apply_rb, norm
from .fixpoint import IterationReport, NotContractive, iterate, solve
from .certify import (Certificate, approx_rb_study, certify, certify_bounded, certify_lp,
                      continuity_diagnostic, embed_rb_check)
from .config import ConfigError, Scenario, dump_config, parse_config
from .scenarios import builtin_scenarios, lookup

__version__ = "0.1.0"
