"""Exact tools for generalized Bell scenarios.

Alice performs one of several dichotomic measurements while Bob runs a
contextuality scenario.  The package builds the no-signaling/no-disturbance
(NSND) polytope, enumerates its vertices, computes nonlocal, contextual and
nonclassical fractions by exact LP, and reproduces the trade-off checks.
"""
from .behavior import (
    Behavior,
    behavior_from_correlators,
    behavior_from_table,
    bob_marginal,
    check_nsnd,
    conditional_behavior,
    correlator,
    load_behavior,
    dump_behavior,
    mix,
    uniform_behavior,
)
from .errors import GBellError
from .quantifiers import (
    FractionCertificate,
    TradeoffReport,
    check_quantifier_tradeoff,
    contextual_fraction,
    nonclassical_fraction,
    nonlocal_fraction,
)
from .scenario import (
    ContextualityScenario,
    GeneralizedBellScenario,
    alice_side,
    generalized_bell,
    n_cycle,
    peres_mermin,
)

__version__ = "0.1.0"

__all__ = [
    "Behavior",
    "ContextualityScenario",
    "FractionCertificate",
    "GBellError",
    "GeneralizedBellScenario",
    "TradeoffReport",
    "alice_side",
    "behavior_from_correlators",
    "behavior_from_table",
    "bob_marginal",
    "check_nsnd",
    "check_quantifier_tradeoff",
    "conditional_behavior",
    "contextual_fraction",
    "correlator",
    "dump_behavior",
    "generalized_bell",
    "load_behavior",
    "mix",
    "n_cycle",
    "nonclassical_fraction",
    "nonlocal_fraction",
    "peres_mermin",
    "uniform_behavior",
]
