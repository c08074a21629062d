"""Improvement dynamics over the finite state graph.

FIP and FBRP hold iff the improvement (best-response) graph is acyclic.
Uniform FIP is an AND-OR attractor: a state is good once some unsatisfied
player has all of its deviations leading to good states. Weak acyclicity
is backward reachability from the equilibria.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import networkx as nx
import numpy as np

from . import kernels
from .game import (
    best_responses,
    better_responses,
    check_strategy,
    format_state,
    is_nash,
    payoff,
    payoff_if,
)
from .network import Network, format_rational
from .space import StateSpace

__all__ = [
    "DynamicsVerdict",
    "FirstNegativeScheduler",
    "MapScheduler",
    "OrderedScheduler",
    "Outcome",
    "RandomScheduler",
    "RoundRobinScheduler",
    "SimulationResult",
    "StateGraph",
    "Step",
    "build_state_graph",
    "check_scc2_fip",
    "has_fbrp",
    "has_fip",
    "has_uniform_fip",
    "is_weakly_acyclic",
    "longest_improvement_path",
    "make_scheduler",
    "reachable_ne",
    "simulate",
    "verify_cycle",
    "verify_scheduler",
]

MODES = {"improve": kernels.IMPROVE, "best": kernels.BEST}


@dataclass
class StateGraph:
    """CSR improvement graph. Row ``k`` lists the legal steps out of state
    ``k``, ordered by player then by target option; ``player`` holds the
    deviating node of each edge."""

    space: StateSpace
    mode: str
    indptr: np.ndarray
    succ: np.ndarray
    player: np.ndarray

    @property
    def n_states(self) -> int:
        return self.space.size

    @property
    def n_edges(self) -> int:
        return int(self.succ.shape[0])

    def terminal(self) -> np.ndarray:
        return self.indptr[1:] == self.indptr[:-1]

    def out(self, idx: int) -> list[tuple[int, int]]:
        lo, hi = self.indptr[idx], self.indptr[idx + 1]
        return list(zip(self.player[lo:hi].tolist(), self.succ[lo:hi].tolist()))

    def state(self, idx: int) -> tuple:
        return self.space.decode(idx)

    def index(self, s: Sequence) -> int:
        return self.space.encode(s)

    def to_networkx(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(range(self.n_states))
        src = np.repeat(np.arange(self.n_states), np.diff(self.indptr))
        for a, b, p in zip(src.tolist(), self.succ.tolist(), self.player.tolist()):
            g.add_edge(a, b, player=p)
        return g


def build_state_graph(
    net: Network,
    mode: str = "improve",
    budget: int | None = None,
    restrict: Mapping[int, Sequence] | None = None,
) -> StateGraph:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {sorted(MODES)}")
    space = StateSpace(net, budget=budget, restrict=restrict)
    indptr, succ, player = kernels.edges(space, MODES[mode])
    return StateGraph(space, mode, indptr, succ, player)


@dataclass
class DynamicsVerdict:
    property: str
    holds: bool
    states: int
    edges: int
    cycle: list[tuple] | None = None
    cycle_players: list[int] | None = None
    bad_state: tuple | None = None
    scheduler: np.ndarray | None = field(default=None, repr=False)
    graph: StateGraph | None = field(default=None, repr=False, compare=False)

    def certificate(self) -> dict:
        out: dict = {}
        if self.cycle is not None:
            out["cycle"] = [list(s) for s in self.cycle]
            out["players"] = list(self.cycle_players)
        if self.bad_state is not None:
            out["bad_state"] = list(self.bad_state)
        if self.scheduler is not None:
            out["scheduler_states"] = int((self.scheduler >= 0).sum())
        return out


def _find_cycle(g: StateGraph, alive: np.ndarray) -> tuple[list[tuple], list[int]]:
    """Walk alive successors from the first alive state until a repeat.

    Every alive state keeps an alive successor, so the walk never stalls.
    """
    seen: dict[int, int] = {}
    walk: list[int] = []
    moves: list[int] = []
    cur = int(np.flatnonzero(alive)[0])
    while cur not in seen:
        seen[cur] = len(walk)
        walk.append(cur)
        for p, nxt in g.out(cur):
            if alive[nxt]:
                moves.append(p)
                cur = nxt
                break
    start = seen[cur]
    states = [g.state(k) for k in walk[start:]]
    return states + [states[0]], moves[start:]


def _acyclic_verdict(net: Network, prop: str, mode: str, budget: int | None) -> DynamicsVerdict:
    g = build_state_graph(net, mode, budget)
    alive = kernels.peel(g.indptr, g.succ)
    v = DynamicsVerdict(prop, not alive.any(), g.n_states, g.n_edges, graph=g)
    if alive.any():
        v.cycle, v.cycle_players = _find_cycle(g, alive)
    return v


def has_fip(net: Network, budget: int | None = None) -> DynamicsVerdict:
    return _acyclic_verdict(net, "FIP", "improve", budget)


def has_fbrp(net: Network, budget: int | None = None) -> DynamicsVerdict:
    return _acyclic_verdict(net, "FBRP", "best", budget)


def verify_cycle(net: Network, cycle: Sequence[Sequence], mode: str = "improve") -> bool:
    """True iff ``cycle`` is a closed walk of legal single-player steps.

    Checked with Fractions, independent of the kernels.
    """
    states = [check_strategy(net, s) for s in cycle]
    if len(states) < 3 or states[0] != states[-1]:
        return False
    for a, b in zip(states, states[1:]):
        diff = [i for i in range(net.n) if a[i] != b[i]]
        if len(diff) != 1:
            return False
        i = diff[0]
        if payoff(net, b, i) <= payoff(net, a, i):
            return False
        if mode == "best" and b[i] not in best_responses(net, a, i):
            return False
    return True


def has_uniform_fip(net: Network, mode: str = "improve", budget: int | None = None) -> DynamicsVerdict:
    """Least fixed point of the scheduler game.

    A state is good if it is an NE, or some player has deviations and all
    of them lead to good states. The recorded player per state is a
    memoryless scheduler; it is deterministic (smallest qualifying player
    at the earliest layer).
    """
    g = build_state_graph(net, mode, budget)
    layer, choice = kernels.attractor(g.indptr, g.succ, g.player, g.terminal())
    good = layer >= 0
    v = DynamicsVerdict("UniformFIP", bool(good.all()), g.n_states, g.n_edges, graph=g)
    if good.all():
        v.scheduler = choice
    else:
        v.bad_state = g.state(int(np.flatnonzero(~good)[0]))
    return v


def scheduler_subgraph(g: StateGraph, choice: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Keep, in each state, only the edges of the scheduled player."""
    src = np.repeat(np.arange(g.n_states), np.diff(g.indptr))
    keep = g.player == choice[src]
    counts = np.bincount(src[keep], minlength=g.n_states)
    indptr = np.zeros(g.n_states + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, g.succ[keep]


def verify_scheduler(g: StateGraph, choice: np.ndarray) -> bool:
    """Scheduler is total on non-NE states, picks deviating players, and
    its restricted graph has no cycle."""
    term = g.terminal()
    if np.any((choice >= 0) == term):
        return False
    for k in np.flatnonzero(~term):
        if int(choice[k]) not in g.player[g.indptr[k]:g.indptr[k + 1]]:
            return False
    indptr, succ = scheduler_subgraph(g, choice)
    return not kernels.peel(indptr, succ).any()


def is_weakly_acyclic(net: Network, budget: int | None = None) -> DynamicsVerdict:
    g = build_state_graph(net, "improve", budget)
    ok = kernels.reach(g.indptr, g.succ, g.terminal())
    v = DynamicsVerdict("WeaklyAcyclic", bool(ok.all()), g.n_states, g.n_edges, graph=g)
    if not ok.all():
        v.bad_state = g.state(int(np.flatnonzero(~ok)[0]))
    return v


def reachable_ne(net: Network, start: Sequence, budget: int | None = None) -> list[tuple]:
    """Equilibria reachable from ``start`` along improvement steps."""
    g = build_state_graph(net, "improve", budget)
    root = g.index(start)
    seen = {root}
    stack = [root]
    while stack:
        k = stack.pop()
        for _, nxt in g.out(k):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    term = g.terminal()
    return [g.state(k) for k in sorted(seen) if term[k]]


def longest_improvement_path(net: Network, mode: str = "improve", budget: int | None = None) -> int | None:
    """Number of states on the longest improvement path, None if one is infinite."""
    g = build_state_graph(net, mode, budget)
    dist = kernels.longest(g.indptr, g.succ)
    if g.n_states and dist[0] < 0:
        return None
    return int(dist.max()) + 1


def check_scc2_fip(net: Network) -> bool:
    """Every strongly connected component is a single node or a 2-cycle.

    Networks passing this test have the FIP without any state search.
    """
    return all(len(c) <= 2 for c in nx.strongly_connected_components(net.digraph()))


# --- schedulers and simulation ----------------------------------------------


def unsatisfied(net: Network, s: Sequence) -> list[int]:
    return [i for i in range(net.n) if better_responses(net, s, i)]


class Scheduler:
    name = "scheduler"

    def reset(self) -> None:
        pass

    def select(self, net: Network, s: tuple) -> int:
        raise NotImplementedError


class OrderedScheduler(Scheduler):
    """First player in ``order`` (default 0..n-1) not playing a best response."""

    name = "ordered"

    def __init__(self, order: Sequence[int] | None = None):
        self.order = None if order is None else list(order)

    def select(self, net, s):
        for i in self.order or range(net.n):
            if better_responses(net, s, i):
                return i
        raise LookupError("state is a Nash equilibrium")


class FirstNegativeScheduler(Scheduler):
    """First player with negative payoff, else the first unsatisfied one."""

    name = "first-negative"

    def __init__(self, order: Sequence[int] | None = None):
        self.order = None if order is None else list(order)

    def select(self, net, s):
        order = self.order or range(net.n)
        for i in order:
            if payoff(net, s, i) < 0:
                return i
        return OrderedScheduler(order).select(net, s)


class RoundRobinScheduler(Scheduler):
    """Cycles through the players, skipping satisfied ones."""

    name = "round-robin"

    def __init__(self):
        self.last = -1

    def reset(self):
        self.last = -1

    def select(self, net, s):
        for k in range(1, net.n + 1):
            i = (self.last + k) % net.n
            if better_responses(net, s, i):
                self.last = i
                return i
        raise LookupError("state is a Nash equilibrium")


class RandomScheduler(Scheduler):
    name = "random"

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = random.Random(seed)

    def reset(self):
        self.rng = random.Random(self.seed)

    def select(self, net, s):
        cand = unsatisfied(net, s)
        if not cand:
            raise LookupError("state is a Nash equilibrium")
        return self.rng.choice(cand)


class MapScheduler(Scheduler):
    """Explicit state -> player table, e.g. a uniform-FIP witness."""

    name = "map"

    def __init__(self, table: Mapping[tuple, int] | Callable[[tuple], int]):
        self.table = table

    @classmethod
    def from_verdict(cls, v: DynamicsVerdict) -> "MapScheduler":
        g, choice = v.graph, v.scheduler

        def pick(s):
            return int(choice[g.index(s)])

        return cls(pick)

    def select(self, net, s):
        return self.table(s) if callable(self.table) else self.table[s]


def make_scheduler(spec: str, seed: int = 0) -> Scheduler:
    """``ordered[:i,j,..]``, ``first-negative[:i,j,..]``, ``round-robin`` or ``random``."""
    name, _, arg = spec.partition(":")
    order = [int(x) for x in arg.split(",")] if arg else None
    if name == "ordered":
        return OrderedScheduler(order)
    if name == "first-negative":
        return FirstNegativeScheduler(order)
    if name == "round-robin":
        return RoundRobinScheduler()
    if name == "random":
        return RandomScheduler(seed)
    raise ValueError(f"unknown scheduler {spec!r}")


class Outcome(enum.Enum):
    REACHED_NE = "reached-ne"
    CUTOFF = "cutoff"
    CYCLE = "cycle-detected"


@dataclass(frozen=True)
class Step:
    k: int
    player: int
    before: str | None
    after: str | None
    gain_from: Fraction
    gain_to: Fraction

    def line(self) -> str:
        a = "_" if self.before is None else self.before
        b = "_" if self.after is None else self.after
        return (f"{self.k} player={self.player} {a} -> {b} "
                f"payoff ({format_rational(self.gain_from)})/({format_rational(self.gain_to)})")


@dataclass
class SimulationResult:
    path: list[tuple]
    steps: list[Step]
    outcome: Outcome
    cycle_start: int | None = None

    def trace(self) -> str:
        lines = [format_state(self.path[0])]
        lines += [st.line() for st in self.steps]
        lines.append(f"outcome {self.outcome.value}")
        return "\n".join(lines)


def respond(net: Network, s: tuple, i: int, rule: str) -> str | None:
    """The deviation of player ``i`` under ``rule``.

    ``best``: a best response, products in interned order before t0.
    ``better``: the first better response in the same order.
    """
    order = net.strategies(i)
    if rule == "best":
        opts = best_responses(net, s, i)
    elif rule == "better":
        opts = better_responses(net, s, i)
    else:
        raise ValueError(f"unknown response rule {rule!r}")
    for x in order:
        if x in opts and x != s[i]:
            return x
    raise LookupError(f"player {i} has no improving move")


def simulate(
    net: Network,
    start: Sequence,
    scheduler: Scheduler,
    rule: str = "best",
    max_steps: int = 10_000,
) -> SimulationResult:
    s = check_strategy(net, start)
    scheduler.reset()
    path = [s]
    seen = {s: 0}
    steps: list[Step] = []
    for k in range(1, max_steps + 1):
        if is_nash(net, s).is_ne:
            return SimulationResult(path, steps, Outcome.REACHED_NE)
        i = scheduler.select(net, s)
        if not better_responses(net, s, i):
            raise RuntimeError(f"scheduler picked player {i}, who has no better response")
        x = respond(net, s, i, rule)
        before = payoff(net, s, i)
        after = payoff_if(net, s, i, x)
        nxt = s[:i] + (x,) + s[i + 1:]
        steps.append(Step(k, i, s[i], x, before, after))
        path.append(nxt)
        s = nxt
        if s in seen:
            return SimulationResult(path, steps, Outcome.CYCLE, seen[s])
        seen[s] = k
    if is_nash(net, s).is_ne:
        return SimulationResult(path, steps, Outcome.REACHED_NE)
    return SimulationResult(path, steps, Outcome.CUTOFF)
