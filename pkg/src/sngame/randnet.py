"""Seeded random valid networks for property tests and benchmarks.

All rationals have denominators at most ``max_den`` (default 12). In-weight
sums never exceed 1 and thresholds lie in (0, 1].
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .network import Network

__all__ = [
    "random_cycle",
    "random_dag",
    "random_general",
    "random_network",
    "random_scc2",
    "random_source_free",
    "random_two_node",
]


def _products(k: int) -> list[str]:
    return [f"t{i + 1}" for i in range(k)]


def _product_set(rng: random.Random, prods: Sequence[str]) -> tuple[str, ...]:
    size = rng.randint(1, len(prods))
    return tuple(sorted(rng.sample(list(prods), size)))


def _threshold(rng: random.Random, max_den: int) -> Fraction:
    q = rng.randint(1, max_den)
    return Fraction(rng.randint(1, q), q)


def _in_weights(rng: random.Random, k: int, max_den: int) -> list[Fraction]:
    """k weights on a common denominator whose sum is at most 1."""
    d = rng.randint(1, max_den)
    cuts = sorted(rng.randint(0, d) for _ in range(k))
    parts = [b - a for a, b in zip([0] + cuts, cuts)]
    return [Fraction(p, d) for p in parts]


def _assemble(rng, n, arcs, n_products, max_den, shared=None, c0=1) -> Network:
    prods = _products(n_products)
    psets = [shared if shared else _product_set(rng, prods) for _ in range(n)]
    preds: dict[int, list[int]] = {i: [] for i in range(n)}
    for j, i in sorted(set(arcs)):
        preds[i].append(j)
    edges = {}
    for i, js in preds.items():
        for j, w in zip(js, _in_weights(rng, len(js), max_den)):
            edges[(j, i)] = w
    theta = {(i, t): _threshold(rng, max_den) for i in range(n) for t in psets[i]}
    return Network(tuple(psets), edges, theta, c0)


def random_cycle(rng: random.Random, n: int, n_products: int = 3, max_den: int = 12) -> Network:
    """Simple cycle 0 -> 1 -> ... -> n-1 -> 0 under a random relabelling."""
    perm = list(range(n))
    rng.shuffle(perm)
    arcs = [(perm[k], perm[(k + 1) % n]) for k in range(n)]
    return _assemble(rng, n, arcs, n_products, max_den)


def random_source_free(rng: random.Random, n: int, n_products: int = 3, max_den: int = 12,
                       p: float = 0.3) -> Network:
    arcs = set()
    for i in range(n):
        others = [j for j in range(n) if j != i]
        arcs.add((rng.choice(others), i))
        for j in others:
            if rng.random() < p:
                arcs.add((j, i))
    return _assemble(rng, n, arcs, n_products, max_den)


def random_dag(rng: random.Random, n: int, n_products: int = 3, max_den: int = 12,
               p: float = 0.4) -> Network:
    order = list(range(n))
    rng.shuffle(order)
    arcs = [(order[a], order[b]) for a in range(n) for b in range(a + 1, n) if rng.random() < p]
    return _assemble(rng, n, arcs, n_products, max_den)


def random_two_node(rng: random.Random, n_products: int = 3, max_den: int = 12) -> Network:
    """Any 2-node network: no edge, one edge, or the 2-cycle."""
    shape = rng.choice(["none", "one", "cycle", "cycle"])
    arcs = {"none": [], "one": [(0, 1)], "cycle": [(0, 1), (1, 0)]}[shape]
    return _assemble(rng, 2, arcs, n_products, max_den)


def random_scc2(rng: random.Random, n: int, n_products: int = 3, max_den: int = 12,
                p: float = 0.4) -> Network:
    """Strongly connected components are single nodes or 2-cycles."""
    nodes = list(range(n))
    rng.shuffle(nodes)
    comps: list[list[int]] = []
    k = 0
    while k < n:
        if k + 1 < n and rng.random() < 0.6:
            comps.append(nodes[k:k + 2])
            k += 2
        else:
            comps.append([nodes[k]])
            k += 1
    arcs = set()
    for c in comps:
        if len(c) == 2:
            arcs.add((c[0], c[1]))
            arcs.add((c[1], c[0]))
    for a in range(len(comps)):
        for b in range(a + 1, len(comps)):
            for j in comps[a]:
                for i in comps[b]:
                    if rng.random() < p:
                        arcs.add((j, i))
    return _assemble(rng, n, arcs, n_products, max_den)


def random_general(rng: random.Random, n: int, n_products: int = 3, max_den: int = 12,
                   p: float = 0.3) -> Network:
    arcs = [(j, i) for i in range(n) for j in range(n) if i != j and rng.random() < p]
    return _assemble(rng, n, arcs, n_products, max_den)


def random_network(rng: random.Random, kind: str, n: int, **kw) -> Network:
    makers = {
        "cycle": random_cycle,
        "source-free": random_source_free,
        "dag": random_dag,
        "scc2": random_scc2,
        "general": random_general,
    }
    if kind == "two-node":
        return random_two_node(rng, **kw)
    return makers[kind](rng, n, **kw)
