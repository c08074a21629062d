"""Generators for the fixed and parametric networks used in the theory.

Node ids are assigned canonically: partition summands first (when the
construction has them), then the named nodes in a fixed order documented
per generator. Products are named ``t1``, ``t2``, ... and ``t1'``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .network import Network, as_fraction

__all__ = [
    "PartitionInstance",
    "compute_tau",
    "gen_br_cycle",
    "gen_equitable_example",
    "gen_fbrp",
    "gen_fip",
    "gen_no_source_infinite",
    "gen_not_weakly_acyclic",
    "gen_partition_determined",
    "gen_partition_ne",
    "gen_poa_cycle",
    "gen_poa_dag",
    "gen_triangle_no_ne",
    "gen_ufip",
    "gen_weakly_acyclic",
    "twin_transform",
    "TRIANGLE_DEVIATORS",
    "GADGETS",
]

F = Fraction
HALF = F(1, 2)
QUARTER = F(1, 4)


@dataclass(frozen=True)
class PartitionInstance:
    """Positive rationals a_1..a_n whose sum is 1 (``mode="1"``) or 1/2 (``mode="1/2"``)."""

    values: tuple[Fraction, ...]
    mode: str = "1"

    def __post_init__(self):
        vals = tuple(as_fraction(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if self.mode not in ("1", "1/2"):
            raise ValueError("mode must be '1' or '1/2'")
        if not vals or any(v <= 0 for v in vals):
            raise ValueError("partition values must be positive")
        if sum(vals) != self.total:
            raise ValueError(f"values sum to {sum(vals)}, expected {self.total}")

    @classmethod
    def of(cls, values: Iterable, mode: str | None = None) -> "PartitionInstance":
        vals = tuple(as_fraction(v) for v in values)
        if mode is None:
            mode = "1" if sum(vals) == 1 else "1/2"
        return cls(vals, mode)

    @property
    def total(self) -> Fraction:
        return F(1) if self.mode == "1" else HALF

    @property
    def n(self) -> int:
        return len(self.values)

    def equal_splits(self) -> list[frozenset[int]]:
        """Index sets S with sum(S) = total/2, by exhaustive search."""
        half = self.total / 2
        out = []
        for mask in range(1 << self.n):
            S = frozenset(i for i in range(self.n) if mask >> i & 1)
            if sum((self.values[i] for i in S), F(0)) == half:
                out.append(S)
        return out

    def has_equal_split(self) -> bool:
        return bool(self.equal_splits())


def _instance(inst, mode: str) -> PartitionInstance:
    if not isinstance(inst, PartitionInstance):
        inst = PartitionInstance.of(inst)
    if inst.mode != mode:
        raise ValueError(f"construction needs values summing to {mode}, got sum {sum(inst.values)}")
    return inst


def compute_tau(inst) -> Fraction:
    """1 / (4 * r_1 * ... * r_n) for a_i = l_i / r_i in lowest terms."""
    vals = inst.values if isinstance(inst, PartitionInstance) else tuple(as_fraction(v) for v in inst)
    return F(1, 4 * math.prod(v.denominator for v in vals))


class _Builder:
    def __init__(self):
        self.psets: list[tuple[str, ...]] = []
        self.edges: dict[tuple[int, int], Fraction] = {}
        self.theta: dict[tuple[int, str], Fraction] = {}

    def node(self, products: Sequence[str], theta=None) -> int:
        i = len(self.psets)
        self.psets.append(tuple(products))
        if theta is not None:
            for t in products:
                self.theta[(i, t)] = as_fraction(theta)
        return i

    def edge(self, j: int, i: int, w) -> None:
        if (j, i) in self.edges:
            raise ValueError(f"duplicate edge {j}->{i}")
        self.edges[(j, i)] = as_fraction(w)

    def build(self, c0=1) -> Network:
        return Network(tuple(self.psets), self.edges, self.theta, as_fraction(c0))


def _triangle_params(w1, w2, theta) -> tuple[Fraction, Fraction, Fraction]:
    w1, w2, theta = as_fraction(w1), as_fraction(w2), as_fraction(theta)
    if not 0 < theta < w1 < w2 <= 1:
        raise ValueError("need 0 < theta < w1 < w2 <= 1")
    if w1 + w2 > 1:
        raise ValueError("need w1 + w2 <= 1 (in-weight of triangle nodes)")
    return w1, w2, theta


def _attach_triangle(b: _Builder, w1, w2, theta, first: str = "t1",
                     feeders: dict[str, int] | None = None) -> tuple[int, int, int]:
    """The no-NE triangle: nodes x0 {first,t2}, x1 {first,t3}, x2 {t2,t3},
    edges x0->x1->x2->x0 of weight w2. Each product gets a feeding node
    (a fresh single-product source unless given in ``feeders``): ``first``
    feeds x0, t3 feeds x1, t2 feeds x2, each with weight w1."""
    x0 = b.node((first, "t2"), theta)
    x1 = b.node((first, "t3"), theta)
    x2 = b.node(("t2", "t3"), theta)
    b.edge(x0, x1, w2)
    b.edge(x1, x2, w2)
    b.edge(x2, x0, w2)
    feeders = dict(feeders or {})
    for t in ("t2", "t3"):
        if t not in feeders:
            feeders[t] = b.node((t,), theta)
    b.edge(feeders[first], x0, w1)
    b.edge(feeders["t3"], x1, w1)
    b.edge(feeders["t2"], x2, w1)
    return x0, x1, x2


def gen_triangle_no_ne(w1=F(1, 4), w2=F(1, 3), theta=F(1, 8)) -> Network:
    """Six nodes with no NE.

    Ids: 0 {t1,t2}, 1 {t1,t3}, 2 {t2,t3} on the triangle 0->1->2->0
    (weight w2); sources 3 {t1} -> 0, 4 {t2} -> 2, 5 {t3} -> 1 (weight w1).
    Every threshold is ``theta``.
    """
    w1, w2, theta = _triangle_params(w1, w2, theta)
    b = _Builder()
    x = [b.node(p, theta) for p in (("t1", "t2"), ("t1", "t3"), ("t2", "t3"))]
    s1, s2, s3 = (b.node((t,), theta) for t in ("t1", "t2", "t3"))
    b.edge(x[0], x[1], w2)
    b.edge(x[1], x[2], w2)
    b.edge(x[2], x[0], w2)
    b.edge(s1, x[0], w1)
    b.edge(s2, x[2], w1)
    b.edge(s3, x[1], w1)
    return b.build()


# The eight all-product profiles of the triangle and the node that is not
# best responding in each (triangle ids 0, 1, 2).
TRIANGLE_DEVIATORS: tuple[tuple[tuple[str, str, str], int], ...] = (
    (("t1", "t1", "t2"), 0),
    (("t1", "t1", "t3"), 2),
    (("t1", "t3", "t2"), 2),
    (("t1", "t3", "t3"), 1),
    (("t2", "t1", "t2"), 1),
    (("t2", "t1", "t3"), 1),
    (("t2", "t3", "t2"), 2),
    (("t2", "t3", "t3"), 0),
)


def gen_partition_ne(inst, w1=F(1, 4), w2=F(1, 3), theta=F(1, 8)) -> Network:
    """Summands glued to two no-NE triangles; an NE exists iff an equal split does.

    Ids: 0..n-1 summands {t1,t1'}; n = a {t1}; n+1 = b {t1'}; a and b have
    threshold 1/2 and w_ia = w_ib = a_i. Then the t1 triangle copy (three
    triangle nodes, {t2} source, {t3} source) with a as its {t1} feeder,
    then the t1' copy with b as its feeder.
    """
    inst = _instance(inst, "1")
    w1, w2, theta = _triangle_params(w1, w2, theta)
    b = _Builder()
    srcs = [b.node(("t1", "t1'")) for _ in range(inst.n)]
    na = b.node(("t1",), HALF)
    nb = b.node(("t1'",), HALF)
    for i, a in zip(srcs, inst.values):
        b.edge(i, na, a)
        b.edge(i, nb, a)
        b.theta[(i, "t1")] = HALF
        b.theta[(i, "t1'")] = HALF
    _attach_triangle(b, w1, w2, theta, "t1", {"t1": na})
    _attach_triangle(b, w1, w2, theta, "t1'", {"t1'": nb})
    return b.build()


def gen_partition_determined(inst) -> Network:
    """Summands feeding a {t1} and b {t1'} only; a determined NE exists iff an equal split does.

    Ids: 0..n-1 summands, n = a, n+1 = b.
    """
    inst = _instance(inst, "1")
    b = _Builder()
    srcs = [b.node(("t1", "t1'"), HALF) for _ in range(inst.n)]
    na = b.node(("t1",), HALF)
    nb = b.node(("t1'",), HALF)
    for i, a in zip(srcs, inst.values):
        b.edge(i, na, a)
        b.edge(i, nb, a)
    return b.build()


def gen_fbrp(inst) -> Network:
    """Summands (sum 1/2) feeding a and b; FBRP fails iff an equal split exists.

    Ids: 0..n-1 summands, n = a, n+1 = b, n+2 = c. Every node has
    {t1,t2}; edges a->b->c->a carry 1/2; theta(a,t1) = theta(b,t2) = 3/4,
    every other threshold 1/2.
    """
    inst = _instance(inst, "1/2")
    b = _Builder()
    srcs = [b.node(("t1", "t2"), HALF) for _ in range(inst.n)]
    na, nb, nc = (b.node(("t1", "t2"), HALF) for _ in range(3))
    b.theta[(na, "t1")] = F(3, 4)
    b.theta[(nb, "t2")] = F(3, 4)
    for i, a in zip(srcs, inst.values):
        b.edge(i, na, a)
        b.edge(i, nb, a)
    b.edge(na, nb, HALF)
    b.edge(nb, nc, HALF)
    b.edge(nc, na, HALF)
    return b.build()


def gen_fip(inst) -> Network:
    """Summands (sum 1/2) feeding a and b; FIP fails iff an equal split exists.

    Ids: 0..n-1 summands {t1,t2}, n = a {t2,t3}, n+1 = b {t1,t2},
    n+2 = c {t1,t3}, n+3 = d {t3}. Edges a->b, b->c, c->a carry 3/4,
    d->c carries 1/2 and w_ia = w_ib = a_i. Thresholds: theta(a,t2) = 1/2,
    theta(a,t3) = 1/4 + tau, theta(b,t1) = 1/2, theta(b,t2) = 1/2 + tau,
    theta(c,t1) = theta(c,t3) = 1/4; summands and d use 1/2.

    These weights give in-weight 5/4 at a, b and c, so :func:`validate`
    reports three in-weight diagnostics for this network.
    """
    inst = _instance(inst, "1/2")
    tau = compute_tau(inst)
    b = _Builder()
    srcs = [b.node(("t1", "t2"), HALF) for _ in range(inst.n)]
    na = b.node(("t2", "t3"))
    nb = b.node(("t1", "t2"))
    nc = b.node(("t1", "t3"))
    nd = b.node(("t3",), HALF)
    b.theta.update({
        (na, "t2"): HALF, (na, "t3"): QUARTER + tau,
        (nb, "t1"): HALF, (nb, "t2"): HALF + tau,
        (nc, "t1"): QUARTER, (nc, "t3"): QUARTER,
    })
    for i, a in zip(srcs, inst.values):
        b.edge(i, na, a)
        b.edge(i, nb, a)
    b.edge(na, nb, F(3, 4))
    b.edge(nb, nc, F(3, 4))
    b.edge(nc, na, F(3, 4))
    b.edge(nd, nc, HALF)
    return b.build()


def gen_ufip(inst, w1=F(1, 4), w2=F(1, 3), theta=F(1, 8)) -> Network:
    """Summands (sum 1) feeding a {t1} and b {t2}, glued to a no-NE triangle.

    Ids follow the scheduler order of the argument: 0..n-1 summands
    {t1,t2}, n = a, n+1 = b, n+2 = g {t3}, n+3 = c {t1,t2},
    n+4 = e {t1,t3}, n+5 = d {t2,t3}. Triangle c->e->d->c has weight w2;
    a->c, b->d and g->e have weight w1; a and b have threshold 1/2, the
    rest ``theta``.
    """
    inst = _instance(inst, "1")
    w1, w2, theta = _triangle_params(w1, w2, theta)
    b = _Builder()
    srcs = [b.node(("t1", "t2"), theta) for _ in range(inst.n)]
    na = b.node(("t1",), HALF)
    nb = b.node(("t2",), HALF)
    ng = b.node(("t3",), theta)
    nc = b.node(("t1", "t2"), theta)
    ne = b.node(("t1", "t3"), theta)
    nd = b.node(("t2", "t3"), theta)
    for i, a in zip(srcs, inst.values):
        b.edge(i, na, a)
        b.edge(i, nb, a)
    b.edge(nc, ne, w2)
    b.edge(ne, nd, w2)
    b.edge(nd, nc, w2)
    b.edge(na, nc, w1)
    b.edge(nb, nd, w1)
    b.edge(ng, ne, w1)
    return b.build()


def twin_transform(net: Network, targets: Iterable[int], w_pair, theta_pair) -> Network:
    """Give each source in ``targets`` a twin with the same products.

    Twins get ids n, n+1, ... in ascending target order. Each pair is
    joined both ways by ``w_pair`` and both members use ``theta_pair``
    for all their products, so a common choice pays w_pair - theta_pair.
    """
    w_pair, theta_pair = as_fraction(w_pair), as_fraction(theta_pair)
    if not 0 < theta_pair <= w_pair <= 1:
        raise ValueError("need 0 < theta_pair <= w_pair <= 1")
    targets = sorted(set(targets))
    for i in targets:
        if not 0 <= i < net.n or not net.is_source(i):
            raise ValueError(f"node {i} is not a source")
    psets = list(net.product_sets)
    edges = dict(net.edges)
    theta = dict(net.thresholds)
    for i in targets:
        twin = len(psets)
        psets.append(net.product_sets[i])
        edges[(i, twin)] = w_pair
        edges[(twin, i)] = w_pair
        for t in net.product_sets[i]:
            theta[(i, t)] = theta_pair
            theta[(twin, t)] = theta_pair
    return Network(tuple(psets), edges, theta, net.c0)


def gen_poa_dag(r, c0=1) -> Network:
    """i {t1} -> j {t2} -> k_1..k_m {t2}; PoA = PoS > r.

    m = 1 when r*c0 < 1, else ceil(r*c0 + 1). All weights are 1; with
    delta = (m - r*c0) / (2(m+1)) as theta(j,t2) and every theta(k,t2),
    the optimum exceeds the only NE (i alone adopts) by (m + r*c0)/2 > r*c0.
    """
    r, c0 = as_fraction(r), as_fraction(c0)
    if r <= 0 or c0 <= 0:
        raise ValueError("need r > 0 and c0 > 0")
    rc = r * c0
    m = 1 if rc < 1 else math.ceil(rc + 1)
    delta = (m - rc) / (2 * (m + 1))
    b = _Builder()
    i = b.node(("t1",), 1)
    j = b.node(("t2",), delta)
    b.edge(i, j, 1)
    for _ in range(m):
        k = b.node(("t2",), delta)
        b.edge(j, k, 1)
    return b.build(c0)


def gen_poa_cycle(eps=F(1, 8)) -> Network:
    """Two-node cycle, both {t1,t2}: optimum 1 - 2eps at all-t2, NE welfares 2eps and 0.

    w_12 = 1, w_21 = 1/2, theta(0,t1) = 1/2 - eps, theta(0,t2) = 1/2 + eps,
    theta(1,t1) = 1 - eps, theta(1,t2) = eps.
    """
    eps = as_fraction(eps)
    if not 0 < eps < QUARTER:
        raise ValueError("need 0 < eps < 1/4")
    b = _Builder()
    n1 = b.node(("t1", "t2"))
    n2 = b.node(("t1", "t2"))
    b.edge(n1, n2, 1)
    b.edge(n2, n1, HALF)
    b.theta.update({
        (n1, "t1"): HALF - eps, (n1, "t2"): HALF + eps,
        (n2, "t1"): 1 - eps, (n2, "t2"): eps,
    })
    return b.build()


def _wa_params(theta, w3, w1, w2):
    theta, w3, w1, w2 = map(as_fraction, (theta, w3, w1, w2))
    if not 0 < theta < w3 < w1 < w2 <= 1:
        raise ValueError("need 0 < theta < w3 < w1 < w2 <= 1")
    if w1 + w2 + w3 > 1:
        raise ValueError("need w1 + w2 + w3 <= 1 (in-weight of node 0)")
    return theta, w3, w1, w2


def gen_weakly_acyclic(theta=F(1, 10), w3=F(1, 5), w1=F(1, 4), w2=F(1, 3)) -> Network:
    """The no-NE triangle with t4 added: weakly acyclic, no uniform FIP.

    Ids: 0 {t1,t2,t4}, 1 {t1,t3,t4}, 2 {t2,t3,t4}; sources 3 {t1} -> 0,
    4 {t2} -> 2, 5 {t3} -> 1 (weight w1), 6 {t4} -> 0 (weight w3).
    """
    theta, w3, w1, w2 = _wa_params(theta, w3, w1, w2)
    b = _Builder()
    x = [b.node(p, theta) for p in (("t1", "t2", "t4"), ("t1", "t3", "t4"), ("t2", "t3", "t4"))]
    s1, s2, s3, s4 = (b.node((t,), theta) for t in ("t1", "t2", "t3", "t4"))
    b.edge(x[0], x[1], w2)
    b.edge(x[1], x[2], w2)
    b.edge(x[2], x[0], w2)
    b.edge(s1, x[0], w1)
    b.edge(s2, x[2], w1)
    b.edge(s3, x[1], w1)
    b.edge(s4, x[0], w3)
    return b.build()


def gen_not_weakly_acyclic(theta=F(1, 10), w3=F(1, 5), w1=F(1, 4), w2=F(1, 3), w=None) -> Network:
    """:func:`gen_weakly_acyclic` with the {t4} source (id 6) twinned as id 7.

    Twin edges carry ``w`` (default w1, must be >= theta); the pair keeps
    threshold ``theta``.
    """
    base = gen_weakly_acyclic(theta, w3, w1, w2)
    w = w1 if w is None else w
    return twin_transform(base, [6], w, theta)


def gen_no_source_infinite(w1=F(1, 4), w2=F(1, 3), theta=F(1, 8)) -> Network:
    """The no-NE triangle with all three sources twinned (weight w1): source free.

    Ids 0..5 as in :func:`gen_triangle_no_ne`; twins 6, 7, 8 of 3, 4, 5.
    """
    base = gen_triangle_no_ne(w1, w2, theta)
    return twin_transform(base, base.sources, w1, theta)


def gen_br_cycle(kind: str = "single-product", n: int = 3) -> Network:
    """Simple cycle 0->1->...->0 with weight 1 and thresholds 1/2.

    ``single-product``: every node has {t}; ``two-product``: {t1,t2}.
    Both have an infinite best-response improvement path.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    if kind == "single-product":
        prods = ("t",)
    elif kind == "two-product":
        prods = ("t1", "t2")
    else:
        raise ValueError(f"unknown kind {kind!r}")
    b = _Builder()
    for _ in range(n):
        b.node(prods, HALF)
    for i in range(n):
        b.edge(i, (i + 1) % n, 1)
    return b.build()


def gen_equitable_example(theta=F(1, 4)) -> Network:
    """Six-node source-free network with w_ji = 1/|N(i)| and constant theta < 1/3.

    Edges 0->1, 1->2, 2->0, 1->3, 3->4, 3->2, 5->3, 5->2, 4->5. Products:
    0, 1 {t1,t2}; 2 {t1,t2,t3,t4}; 3, 4, 5 {t3,t4}.
    """
    theta = as_fraction(theta)
    if not 0 < theta < F(1, 3):
        raise ValueError("need 0 < theta < 1/3")
    arcs = [(0, 1), (1, 2), (2, 0), (1, 3), (3, 4), (3, 2), (5, 3), (5, 2), (4, 5)]
    psets = [("t1", "t2"), ("t1", "t2"), ("t1", "t2", "t3", "t4"), ("t3", "t4"), ("t3", "t4"), ("t3", "t4")]
    indeg = {i: sum(1 for _, d in arcs if d == i) for i in range(6)}
    b = _Builder()
    for p in psets:
        b.node(p, theta)
    for j, i in arcs:
        b.edge(j, i, F(1, indeg[i]))
    return b.build()


# name -> (generator, parameter names); used by the command line
GADGETS = {
    "triangle-no-ne": (gen_triangle_no_ne, ("w1", "w2", "theta")),
    "partition-ne": (gen_partition_ne, ("a", "w1", "w2", "theta")),
    "partition-determined": (gen_partition_determined, ("a",)),
    "fbrp": (gen_fbrp, ("a",)),
    "fip": (gen_fip, ("a",)),
    "ufip": (gen_ufip, ("a", "w1", "w2", "theta")),
    "poa-dag": (gen_poa_dag, ("r", "c0")),
    "poa-cycle": (gen_poa_cycle, ("eps",)),
    "weakly-acyclic": (gen_weakly_acyclic, ("theta", "w3", "w1", "w2")),
    "not-weakly-acyclic": (gen_not_weakly_acyclic, ("theta", "w3", "w1", "w2", "w")),
    "no-source-infinite": (gen_no_source_infinite, ("w1", "w2", "theta")),
    "br-cycle": (gen_br_cycle, ("kind", "n")),
    "equitable": (gen_equitable_example, ("theta",)),
}
