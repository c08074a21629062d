"""Social network games: players pick products, or nothing, under the
influence of weighted neighbours.

The package provides exact payoffs, Nash equilibrium search (brute force and
structural procedures), improvement dynamics on the joint state space,
a polymatrix form and a catalogue of gadget networks.
"""
from .network import Network, classify, parse, serialize, validate
from .game import T0, NEKind, best_responses, is_nash, payoff, social_welfare
from .equilibria import (
    NEReport,
    find_ne,
    poa_pos,
    verify_nash_cycle,
    verify_nash_sourcefree,
)
from .dynamics import (
    build_state_graph,
    has_fbrp,
    has_fip,
    has_uniform_fip,
    is_weakly_acyclic,
    simulate,
)
from .polymatrix import check_equivalence, to_polymatrix
from .space import BudgetExceeded

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "NEKind",
    "NEReport",
    "Network",
    "T0",
    "best_responses",
    "build_state_graph",
    "check_equivalence",
    "classify",
    "find_ne",
    "has_fbrp",
    "has_fip",
    "has_uniform_fip",
    "is_nash",
    "is_weakly_acyclic",
    "parse",
    "payoff",
    "poa_pos",
    "serialize",
    "simulate",
    "social_welfare",
    "to_polymatrix",
    "validate",
    "verify_nash_cycle",
    "verify_nash_sourcefree",
]
