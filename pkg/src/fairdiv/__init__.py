"""Approximate maximin-share fair division over hereditary set systems."""

from .allocator import (
    Allocation,
    EstimateVector,
    RunStats,
    TieBreakConfig,
    TraceEvent,
    VerificationReport,
    Violation,
    allocate_from_estimates,
    allocate_naive,
    fair_divide,
    iteration_bound,
    minimal_set,
    query_budget,
    verify_allocation,
)
from .errors import (
    ConfigError,
    DegenerateInputError,
    DeskCapError,
    FairdivError,
    InputError,
    NoEligibleAgentError,
    ParseError,
)
from .instances import (
    Instance,
    footnote_instance,
    parse_allocation,
    parse_instance,
    random_instance,
    replicate_agents,
    serialize_allocation,
    serialize_instance,
    table1_instance,
)
from .mms import MmsResult, Partition, mms_bounds, mms_exact
from .rationals import format_rational, parse_rational
from .setsystem import (
    Capacity,
    ExplicitMaximal,
    SetSystemSpec,
    capacity,
    capacity_as_explicit,
    equivalence_classes,
    explicit_maximal,
    is_feasible,
)
from .valuation import Valuation, bundle_value, normalize_to_partition, nth_value

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "Capacity",
    "ConfigError",
    "DegenerateInputError",
    "DeskCapError",
    "EstimateVector",
    "ExplicitMaximal",
    "FairdivError",
    "InputError",
    "Instance",
    "MmsResult",
    "NoEligibleAgentError",
    "ParseError",
    "Partition",
    "RunStats",
    "SetSystemSpec",
    "TieBreakConfig",
    "TraceEvent",
    "Valuation",
    "VerificationReport",
    "Violation",
    "allocate_from_estimates",
    "allocate_naive",
    "bundle_value",
    "capacity",
    "capacity_as_explicit",
    "equivalence_classes",
    "explicit_maximal",
    "fair_divide",
    "footnote_instance",
    "format_rational",
    "is_feasible",
    "iteration_bound",
    "minimal_set",
    "mms_bounds",
    "mms_exact",
    "normalize_to_partition",
    "nth_value",
    "parse_allocation",
    "parse_instance",
    "parse_rational",
    "query_budget",
    "random_instance",
    "replicate_agents",
    "serialize_allocation",
    "serialize_instance",
    "table1_instance",
    "verify_allocation",
]
