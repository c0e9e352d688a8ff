"""Finite similarity schemes, their approximation towers and limits."""

from .address import (
    RelationEvidence,
    ShadowTree,
    UltimatelyPeriodicAddress,
    Verdict,
    WitnessClosure,
    format_address,
    gamma_contains,
    hat_related,
    parse_address,
    related,
    shadow,
    step,
)
from .audit import AuditReport, lemma_audit
from .catalog import diagonal, nonunique, not_fully_injective, reference_schemes, singleton
from .fixedpoint import (
    InjectivityReport,
    InjectivityStatus,
    IsoWitness,
    Pair,
    apply_functor,
    injectivity_report,
    is_fixed_point,
    shift_injective,
    shift_map,
)
from .scheme import (
    FiniteScheme,
    SchemeError,
    ValidationReport,
    essential_part,
    is_discrete,
    random_scheme,
    validate,
)
from .textio import (
    ApproxGraph,
    ParseError,
    approx_graph,
    export_graph,
    parse_pair,
    parse_scheme,
    serialize_pair,
    serialize_scheme,
)
from .tower import (
    BasicEquivalenceWitness,
    CellSet,
    Level,
    Tower,
    TowerError,
    cell,
    cells,
    decompose,
    embed,
    extend,
    project_word,
)

__all__ = [
    "ApproxGraph", "AuditReport", "BasicEquivalenceWitness", "CellSet", "FiniteScheme",
    "InjectivityReport", "InjectivityStatus", "IsoWitness", "Level", "Pair", "ParseError",
    "RelationEvidence", "SchemeError", "ShadowTree", "Tower", "TowerError",
    "UltimatelyPeriodicAddress", "ValidationReport", "Verdict", "WitnessClosure",
    "apply_functor", "approx_graph", "cell", "cells", "decompose", "diagonal", "embed",
    "essential_part", "export_graph", "extend", "format_address", "gamma_contains",
    "hat_related", "injectivity_report", "is_discrete", "is_fixed_point", "lemma_audit",
    "nonunique", "not_fully_injective", "parse_address", "parse_pair", "parse_scheme",
    "project_word", "random_scheme", "reference_schemes", "related", "serialize_pair",
    "serialize_scheme", "shadow", "shift_injective", "shift_map", "singleton", "step",
    "validate",
]
