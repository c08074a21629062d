"""Nash equilibria: exhaustive search and the polynomial special cases.

Brute force runs over a :class:`~sngame.space.StateSpace` through the
compiled kernels. The special-case procedures (simple cycles, source-free
networks, DAG rank order, two-product phases) work on Fractions directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from . import kernels
from .game import (
    best_responses,
    check_strategy,
    is_nash,
    payoff,
    payoff_if,
    social_welfare,
)
from .network import Network, classify
from .space import StateSpace

__all__ = [
    "GraphClassError",
    "KINDS",
    "NEReport",
    "NoEquilibrium",
    "NotNashError",
    "PriceRatios",
    "SelfSustainingSCS",
    "check_ne_structure",
    "compute_Xt",
    "construct_ne_two_products",
    "covering_sets",
    "dag_rank_ne",
    "enumerate_ne_brute",
    "find_ne",
    "find_self_sustaining",
    "lemma_structure_holds",
    "ne_report_brute",
    "poa_pos",
    "run_phase",
    "social_optimum_brute",
    "verify_nash_cycle",
    "verify_nash_sourcefree",
]

KINDS = ("any", "trivial", "nontrivial", "determined")


class GraphClassError(ValueError):
    """The chosen procedure does not apply to this network's graph class."""


class NotNashError(ValueError):
    pass


class NoEquilibrium(ValueError):
    pass


def _kind_matches(kind: str, s: Sequence) -> bool:
    if kind == "any":
        return True
    used = sum(x is not None for x in s)
    if kind == "trivial":
        return used == 0
    if kind == "nontrivial":
        return used > 0
    if kind == "determined":
        return used == len(s)
    raise ValueError(f"unknown equilibrium kind {kind!r}")


@dataclass
class NEReport:
    """Outcome of an equilibrium query.

    ``exists`` maps each kind in (any, nontrivial, determined) to True,
    False or None (the method does not decide that kind).
    """

    method: str
    exists: dict[str, bool | None]
    witnesses: dict[str, tuple | None] = field(default_factory=dict)
    states: int | None = None
    graph_class: tuple[str, ...] = ()
    notes: list[str] = field(default_factory=list)

    def holds(self, kind: str) -> bool | None:
        return self.exists.get(kind)

    def check_witnesses(self, net: Network) -> None:
        for kind, s in self.witnesses.items():
            if s is None:
                continue
            found = is_nash(net, s)
            if not found.is_ne or not _kind_matches(kind, s):
                raise AssertionError(f"{self.method}: witness for {kind} fails ({found.value})")


# --- brute force -----------------------------------------------------------


def enumerate_ne_brute(
    net: Network,
    kind: str = "any",
    limit: int | None = None,
    sources_dominant: bool = False,
    budget: int | None = None,
) -> list[tuple]:
    """All NE of ``kind`` in lexicographic state order (t0 last per node).

    With ``sources_dominant`` the sources never play t0; no equilibrium is
    lost since a source playing t0 always has a profitable deviation.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown equilibrium kind {kind!r}")
    space = StateSpace(net, budget=budget, sources_dominant=sources_dominant)
    ne, _ = kernels.scan(space)
    out = []
    for idx in np.flatnonzero(ne):
        s = space.decode(idx)
        if _kind_matches(kind, s):
            out.append(s)
            if limit is not None and len(out) >= limit:
                break
    return out


def ne_report_brute(net: Network, sources_dominant: bool = True, budget: int | None = None) -> NEReport:
    space = StateSpace(net, budget=budget, sources_dominant=sources_dominant)
    ne, _ = kernels.scan(space)
    witnesses: dict[str, tuple | None] = {"any": None, "nontrivial": None, "determined": None}
    for idx in np.flatnonzero(ne):
        s = space.decode(idx)
        for kind in witnesses:
            if witnesses[kind] is None and _kind_matches(kind, s):
                witnesses[kind] = s
        if all(w is not None for w in witnesses.values()):
            break
    return NEReport(
        method="brute",
        exists={k: w is not None for k, w in witnesses.items()},
        witnesses=witnesses,
        states=space.size,
        graph_class=tuple(sorted(classify(net).labels)),
    )


# --- simple cycles -----------------------------------------------------------


def verify_nash_cycle(net: Network, kind: str = "nontrivial") -> NEReport:
    """Non-trivial (equivalently determined) NE on a simple cycle.

    Such an NE exists iff some product t is shared by every node and each
    node's single in-edge covers its threshold for t; the witness is all-t.
    """
    if kind not in ("nontrivial", "determined", "any"):
        raise ValueError(f"unsupported kind {kind!r}")
    gc = classify(net)
    if not gc.simple_cycle:
        raise GraphClassError("network is not a simple cycle")
    order = gc.cycle_order
    pred = {order[k]: order[k - 1] for k in range(len(order))}
    found = None
    for t in net.products:
        if all(t in net.product_sets[i] and net.weight(pred[i], i) >= net.theta(i, t) for i in order):
            found = t
            break
    witness = None if found is None else (found,) * net.n
    return NEReport(
        method="cycle",
        exists={"any": True, "nontrivial": found is not None, "determined": found is not None},
        witnesses={"any": witness or (None,) * net.n, "nontrivial": witness, "determined": witness},
        graph_class=tuple(sorted(gc.labels)),
    )


# --- source-free networks ----------------------------------------------------


def _require_source_free(net: Network) -> None:
    if net.sources:
        raise GraphClassError(f"network has source nodes {list(net.sources)}")


def _prune(net: Network, nodes: Iterable[int], t: str) -> set[int]:
    """Greatest subset where each member's in-weight from the subset reaches theta."""
    alive = {i for i in nodes if t in net.product_sets[i]}
    while True:
        drop = {
            i for i in alive
            if sum((net.weight(j, i) for j in net.neighbours(i) if j in alive), Fraction(0)) < net.theta(i, t)
        }
        if not drop:
            return alive
        alive -= drop


def compute_Xt(net: Network, t: str, trace: bool = False):
    """X_t, the greatest fixed point of the in-weight condition for ``t``.

    With ``trace`` the whole sequence X^0 ⊇ X^1 ⊇ ... is returned; its
    length minus one is the number of shrinking steps (at most n).
    """
    _require_source_free(net)
    cur = frozenset(i for i in range(net.n) if t in net.product_sets[i])
    seq = [cur]
    while True:
        nxt = frozenset(
            i for i in cur
            if sum((net.weight(j, i) for j in net.neighbours(i) if j in cur), Fraction(0)) >= net.theta(i, t)
        )
        if nxt == cur:
            break
        seq.append(nxt)
        cur = nxt
    assert len(seq) - 1 <= net.n
    return seq if trace else cur


def verify_nash_sourcefree(net: Network) -> NEReport:
    """Non-trivial NE on a source-free network: exists iff some X_t is nonempty."""
    _require_source_free(net)
    witness = None
    for t in net.products:
        xt = compute_Xt(net, t)
        if xt:
            witness = tuple(t if i in xt else None for i in range(net.n))
            break
    return NEReport(
        method="sourcefree",
        exists={"any": True, "nontrivial": witness is not None, "determined": None},
        witnesses={"any": (None,) * net.n, "nontrivial": witness},
        graph_class=tuple(sorted(classify(net).labels)),
    )


@dataclass(frozen=True)
class SelfSustainingSCS:
    product: str
    nodes: frozenset[int]

    def holds(self, net: Network) -> bool:
        if not self.nodes:
            return False
        g = net.digraph().subgraph(self.nodes)
        if len(self.nodes) > 1 and not nx.is_strongly_connected(g):
            return False
        for i in self.nodes:
            if self.product not in net.product_sets[i]:
                return False
            acc = sum((net.weight(j, i) for j in net.neighbours(i) if j in self.nodes), Fraction(0))
            if acc < net.theta(i, self.product):
                return False
        return True


def _source_components(net: Network, residue: set[int]) -> list[frozenset[int]]:
    """Strongly connected components of G[residue] with no edge entering from the residue."""
    g = net.digraph().subgraph(residue)
    comps = [frozenset(c) for c in nx.strongly_connected_components(g)]
    where = {i: k for k, c in enumerate(comps) for i in c}
    entered = {where[i] for j, i in g.edges if where[j] != where[i]}
    return sorted((c for k, c in enumerate(comps) if k not in entered), key=min)


def find_self_sustaining(net: Network, t: str, within: Iterable[int] | None = None) -> SelfSustainingSCS | None:
    """Some self-sustaining SCS for ``t`` (inside ``within`` if given), else None.

    After pruning, every source component of the residue is self-sustaining:
    its members draw all their residue in-weight from the component itself.
    Conversely any self-sustaining SCS survives pruning, so an empty residue
    means none exists.
    """
    residue = _prune(net, range(net.n) if within is None else within, t)
    if not residue:
        return None
    best = _source_components(net, residue)[0]
    return SelfSustainingSCS(t, best)


def lemma_structure_holds(net: Network, s: Sequence) -> bool:
    """For every used product t and adopter i, some self-sustaining SCS
    inside A_t(s) reaches i in G. Does not require s to be an NE."""
    s = check_strategy(net, s)
    g = net.digraph()
    for t in {x for x in s if x is not None}:
        adopters = {i for i, x in enumerate(s) if x == t}
        residue = _prune(net, adopters, t)
        if not residue:
            return False
        roots = set().union(*_source_components(net, residue))
        reach = set(roots)
        for j in roots:
            reach |= nx.descendants(g, j)
        if not adopters <= reach:
            return False
    return True


def check_ne_structure(net: Network, s: Sequence) -> bool:
    _require_source_free(net)
    if not is_nash(net, s).is_ne:
        raise NotNashError("joint strategy is not a Nash equilibrium")
    return lemma_structure_holds(net, s)


# --- DAG ---------------------------------------------------------------------


def _preferred(options: Iterable, order: Sequence) -> object:
    """Deterministic tie-break: products in interned order, t0 last."""
    pos = {x: k for k, x in enumerate(order)}
    return min(options, key=lambda x: pos[x])


def dag_rank_ne(net: Network) -> tuple:
    """NE of a DAG network: nodes pick a best response in rank order.

    Each node only depends on earlier-ranked nodes, so choices made this
    way stay best responses. Sources take a product, so the NE is
    non-trivial.
    """
    gc = classify(net)
    if not gc.dag:
        raise GraphClassError("network is not a DAG")
    s: list = [None] * net.n
    for i in gc.rank:
        s[i] = _preferred(best_responses(net, s, i), net.strategies(i))
    return tuple(s)


# --- two-product phases ------------------------------------------------------


@dataclass
class PhaseLog:
    phases: int = 0
    rounds: int = 0
    switches: list[int] = field(default_factory=list)


def run_phase(net: Network, s: Sequence, t: str | None, log: PhaseLog | None = None) -> tuple:
    """Maximal sequence of best-response switches to ``t``.

    Sweeps the nodes in ascending order, switching every node for which
    ``t`` is both a best response and a strict improvement, until a sweep
    changes nothing.
    """
    s = list(check_strategy(net, s))
    switched = 0
    while True:
        changed = False
        for i in range(net.n):
            if s[i] == t or (t is not None and t not in net.product_sets[i]):
                continue
            if payoff_if(net, s, i, t) > payoff(net, s, i) and t in best_responses(net, s, i):
                s[i] = t
                switched += 1
                changed = True
        if not changed:
            break
    if log is not None:
        log.phases += 1
        log.switches.append(switched)
    return tuple(s)


def covering_sets(net: Network) -> list[tuple[str, ...]]:
    """All X with 1 <= |X| <= 2 meeting every source's product set."""
    out = []
    prods = net.products
    srcs = [set(net.product_sets[i]) for i in net.sources]
    for k, a in enumerate(prods):
        if all(a in p for p in srcs):
            out.append((a,))
    for k, a in enumerate(prods):
        for b in prods[k + 1:]:
            if all(a in p or b in p for p in srcs) and (a,) not in out and (b,) not in out:
                out.append((a, b))
    return out


def construct_ne_two_products(net: Network, X: Sequence[str], log: PhaseLog | None = None) -> tuple:
    """NE for networks where every source can play a product of X, |X| <= 2.

    A t1-phase from all-t0 first (sources lacking t1 stay at t0, which is
    the restriction to the subnetwork without them), then t2-phases and
    t0-phases alternate until nothing changes.
    """
    X = tuple(X)
    if not 1 <= len(X) <= 2 or len(set(X)) != len(X):
        raise ValueError("X must hold one or two distinct products")
    if any(t not in net.products for t in X):
        raise ValueError(f"unknown product in {X}")
    for i in net.sources:
        if not set(X) & set(net.product_sets[i]):
            raise ValueError(f"source {i} has no product in {X}")
    log = log if log is not None else PhaseLog()
    s = run_phase(net, (None,) * net.n, X[0], log)
    if len(X) == 2:
        limit = 4 * net.n
        while True:
            nxt = run_phase(net, run_phase(net, s, X[1], log), None, log)
            log.rounds += 1
            if log.rounds > limit:
                raise RuntimeError(f"phase alternation exceeded {limit} rounds")
            if nxt == s:
                break
            s = nxt
    if max(log.switches, default=0) > net.n:
        raise RuntimeError("a phase switched more than n nodes")
    return s


# --- routing ---------------------------------------------------------------------


def find_ne(net: Network, kind: str = "any", method: str = "auto", budget: int | None = None) -> NEReport:
    """Decide NE existence of ``kind`` with the requested method.

    ``auto`` prefers a polynomial procedure when the graph class allows it
    and falls back to brute force otherwise.
    """
    if kind not in ("any", "nontrivial", "determined"):
        raise ValueError(f"unknown kind {kind!r}")
    gc = classify(net)
    labels = tuple(sorted(gc.labels))
    if method == "brute":
        rep = ne_report_brute(net, budget=budget)
    elif method == "cycle":
        rep = verify_nash_cycle(net)
    elif method == "sourcefree":
        rep = verify_nash_sourcefree(net)
    elif method == "two-product":
        cover = covering_sets(net)
        if not cover:
            raise GraphClassError("no set of at most two products covers every source")
        s = construct_ne_two_products(net, cover[0])
        rep = NEReport("two-product", exists={"any": True}, witnesses={"any": s}, graph_class=labels)
        if _kind_matches("nontrivial", s):
            rep.exists["nontrivial"] = True
            rep.witnesses["nontrivial"] = s
        if _kind_matches("determined", s):
            rep.exists["determined"] = True
            rep.witnesses["determined"] = s
        rep.notes.append(f"X = {{{', '.join(cover[0])}}}")
    elif method == "dag":
        s = dag_rank_ne(net)
        rep = NEReport("dag", exists={"any": True, "nontrivial": True}, witnesses={"any": s, "nontrivial": s},
                       graph_class=labels)
    elif method == "auto":
        if gc.simple_cycle:
            rep = verify_nash_cycle(net)
        elif gc.source_free and kind != "determined":
            rep = verify_nash_sourcefree(net)
        elif gc.dag and kind != "determined":
            rep = find_ne(net, kind, "dag")
        elif kind == "any" and covering_sets(net):
            rep = find_ne(net, kind, "two-product")
        else:
            rep = ne_report_brute(net, budget=budget)
        rep.notes.append(f"auto selected {rep.method}")
    else:
        raise ValueError(f"unknown method {method!r}")
    if rep.exists.get(kind) is None:
        raise GraphClassError(f"method {rep.method} does not decide {kind} equilibria")
    rep.check_witnesses(net)
    return rep


# --- welfare ratios ------------------------------------------------------------


def social_optimum_brute(net: Network, budget: int | None = None) -> tuple[tuple, Fraction]:
    space = StateSpace(net, budget=budget)
    _, welfare = kernels.scan(space)
    idx = int(np.argmax(welfare))
    s = space.decode(idx)
    value = social_welfare(net, s)
    assert value == space.to_fraction(welfare[idx])
    return s, value


Ratio = Fraction | float | None


def _ratio(num: Fraction, den: Fraction) -> Ratio:
    if den == 0:
        return math.inf
    if den < 0:
        return None
    return num / den


@dataclass
class PriceRatios:
    optimum: Fraction
    optimum_state: tuple
    worst_ne: Fraction
    worst_state: tuple
    best_ne: Fraction
    best_state: tuple
    ne_count: int
    poa: Ratio
    pos: Ratio


def poa_pos(net: Network, budget: int | None = None) -> PriceRatios:
    """Price of anarchy and stability by exhaustive scan.

    A zero denominator gives ``math.inf``; a negative one gives None
    (undefined), with both welfares kept in the result.
    """
    space = StateSpace(net, budget=budget)
    ne, welfare = kernels.scan(space)
    idx = np.flatnonzero(ne)
    if idx.size == 0:
        raise NoEquilibrium("no NE")
    opt = int(np.argmax(welfare))
    ne_w = welfare[idx]
    worst = int(idx[np.argmin(ne_w)])
    best = int(idx[np.argmax(ne_w)])
    optimum = space.to_fraction(welfare[opt])
    lo = space.to_fraction(welfare[worst])
    hi = space.to_fraction(welfare[best])
    return PriceRatios(
        optimum=optimum,
        optimum_state=space.decode(opt),
        worst_ne=lo,
        worst_state=space.decode(worst),
        best_ne=hi,
        best_state=space.decode(best),
        ne_count=int(idx.size),
        poa=_ratio(optimum, lo),
        pos=_ratio(optimum, hi),
    )
