"""Payoffs, best and better responses, Nash tests for the game G(S).

A joint strategy is a tuple with one entry per node: a product name, or
``None`` for the null strategy t0. Everything is computed with Fractions.
"""
from __future__ import annotations

import enum
from fractions import Fraction
from typing import Mapping, Sequence

from .network import Network, format_rational

__all__ = [
    "T0",
    "NEKind",
    "adopters",
    "all_of",
    "best_responses",
    "better_responses",
    "check_strategy",
    "format_state",
    "is_nash",
    "parse_state",
    "payoff",
    "payoff_if",
    "social_welfare",
]

T0 = None

JointStrategy = tuple
# a full joint strategy, or a partial {node: strategy} map covering N(i)
Profile = Sequence | Mapping


class NEKind(enum.Enum):
    TRIVIAL = "trivial"
    NON_TRIVIAL = "non-trivial"
    DETERMINED = "determined"
    NOT_NE = "not-ne"

    @property
    def is_ne(self) -> bool:
        return self is not NEKind.NOT_NE


def all_of(net: Network, t: str | None) -> JointStrategy:
    """The joint strategy in which every node plays ``t``."""
    if t is not None and any(t not in p for p in net.product_sets):
        raise ValueError(f"product {t} is not available to every node")
    return (t,) * net.n


def check_strategy(net: Network, s: Sequence) -> JointStrategy:
    s = tuple(s)
    if len(s) != net.n:
        raise ValueError(f"joint strategy has {len(s)} entries, network has {net.n} nodes")
    for i, si in enumerate(s):
        if si is not None and si not in net.product_sets[i]:
            raise ValueError(f"node {i} cannot play {si!r}")
    return s


def adopters(net: Network, s: Profile, i: int, t: str) -> frozenset[int]:
    """Neighbours of ``i`` playing ``t`` in ``s``."""
    return frozenset(j for j in net.neighbours(i) if s[j] == t)


def payoff_if(net: Network, s: Profile, i: int, choice: str | None) -> Fraction:
    """p_i(choice, s_-i). Only the strategies of N(i) are read from ``s``."""
    if choice is None:
        return Fraction(0)
    if net.is_source(i):
        return net.c0
    acc = sum((net.edges[(j, i)] for j in net.neighbours(i) if s[j] == choice), Fraction(0))
    return acc - net.thresholds[(i, choice)]


def payoff(net: Network, s: Profile, i: int) -> Fraction:
    return payoff_if(net, s, i, s[i])


def best_responses(net: Network, s: Profile, i: int) -> frozenset:
    """BR_i via the positive/zero sets.

    Products with positive payoff win outright (all maximisers returned);
    otherwise t0 together with every product at exactly zero.
    """
    if net.is_source(i):
        return frozenset(net.product_sets[i])
    gains = {t: payoff_if(net, s, i, t) for t in net.product_sets[i]}
    positive = {t: g for t, g in gains.items() if g > 0}
    if positive:
        top = max(positive.values())
        return frozenset(t for t, g in positive.items() if g == top)
    return frozenset([None, *(t for t, g in gains.items() if g == 0)])


def better_responses(net: Network, s: Sequence, i: int) -> frozenset:
    current = payoff(net, s, i)
    return frozenset(x for x in net.strategies(i) if x != s[i] and payoff_if(net, s, i, x) > current)


def is_nash(net: Network, s: Sequence) -> NEKind:
    s = check_strategy(net, s)
    for i in range(net.n):
        if better_responses(net, s, i):
            return NEKind.NOT_NE
    if all(x is None for x in s):
        return NEKind.TRIVIAL
    if all(x is not None for x in s):
        return NEKind.DETERMINED
    return NEKind.NON_TRIVIAL


def social_welfare(net: Network, s: Sequence) -> Fraction:
    return sum((payoff(net, s, i) for i in range(net.n)), Fraction(0))


def format_state(s: Sequence) -> str:
    return "state " + " ".join(f"{i}={'_' if x is None else x}" for i, x in enumerate(s))


def parse_state(net: Network, text: str) -> JointStrategy:
    """Parse ``state 0=t1 1=_ ...``; the ``state`` keyword is optional.

    Every node must be assigned exactly once.
    """
    toks = text.split()
    if toks and toks[0] == "state":
        toks = toks[1:]
    out: dict[int, str | None] = {}
    for tok in toks:
        node, sep, val = tok.partition("=")
        if not sep or not node.isdigit():
            raise ValueError(f"bad state token {tok!r}")
        i = int(node)
        if i in out:
            raise ValueError(f"node {i} assigned twice")
        out[i] = None if val == "_" else val
    if sorted(out) != list(range(net.n)):
        raise ValueError(f"state must assign nodes 0..{net.n - 1}")
    return check_strategy(net, [out[i] for i in range(net.n)])


def describe_payoffs(net: Network, s: Sequence) -> str:
    return "(" + ", ".join(format_rational(payoff(net, s, i)) for i in range(net.n)) + ")"
