"""Sound deterministic negotiations: modeling, minimization, soundness
checking, and active learning from a teacher oracle."""

from .model import (
    Configuration,
    DistributedAlphabet,
    ExecutionOutcome,
    Negotiation,
    compute_I,
    configuration_graph,
    empty_negotiation,
    enabled,
    member_exec,
    member_path,
    run_execution,
    run_local_path,
    step,
    validate,
)
from .automata import (
    PartialDfa,
    is_dom_complete,
    minimize,
    minimize_negotiation,
    neg_equiv,
    negotiation_from_dfa,
    paths_dfa,
)
from .soundness import find_any_pattern, is_sound_semantic
from .teacher import EquivAnswer, QueryStats, Teacher
from .generate import GenParams, generate
from .formats import export_dot, load, parse, save, serialize

__all__ = [
    "Configuration",
    "DistributedAlphabet",
    "EquivAnswer",
    "ExecutionOutcome",
    "GenParams",
    "Negotiation",
    "PartialDfa",
    "QueryStats",
    "Teacher",
    "compute_I",
    "configuration_graph",
    "empty_negotiation",
    "enabled",
    "export_dot",
    "find_any_pattern",
    "generate",
    "is_dom_complete",
    "is_sound_semantic",
    "load",
    "member_exec",
    "member_path",
    "minimize",
    "minimize_negotiation",
    "neg_equiv",
    "negotiation_from_dfa",
    "parse",
    "paths_dfa",
    "run_execution",
    "run_local_path",
    "save",
    "serialize",
    "step",
    "validate",
]
