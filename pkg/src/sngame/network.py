"""Social network model: weighted digraph, product sets, thresholds.

Nodes are dense integer ids ``0..n-1``. Products are strings; the global
product order is the order of first appearance across the node product sets
and is used everywhere a deterministic product order is needed.

All numbers are :class:`fractions.Fraction`. Nothing here touches floats.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import networkx as nx

__all__ = [
    "Diagnostic",
    "GraphClass",
    "Network",
    "ParseError",
    "as_fraction",
    "classify",
    "format_rational",
    "parse",
    "parse_rational",
    "serialize",
    "validate",
]

HEADER = "sngame v1"

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")
_PRODUCT_RE = re.compile(r"^[^\s,=#]+$")


def parse_rational(token: str) -> Fraction:
    """Parse ``p/q`` or an integer literal into a Fraction."""
    if not _RATIONAL_RE.match(token):
        raise ValueError(f"malformed rational {token!r}")
    num, _, den = token.partition("/")
    if den and int(den) == 0:
        raise ValueError(f"zero denominator in {token!r}")
    return Fraction(int(num), int(den) if den else 1)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings. Floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


@dataclass(frozen=True)
class Network:
    """The tuple (G, products, P, theta) plus the source payoff constant c0.

    ``edges`` maps ``(j, i)`` to the weight of edge ``j -> i``; ``thresholds``
    maps ``(i, t)`` to theta(i, t). The constructor only checks structural
    sanity (ids in range); model invariants are reported by :func:`validate`.
    """

    product_sets: tuple[tuple[str, ...], ...]
    edges: Mapping[tuple[int, int], Fraction]
    thresholds: Mapping[tuple[int, str], Fraction]
    c0: Fraction = Fraction(1)
    products: tuple[str, ...] = field(init=False)
    _in: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _out: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        psets = tuple(tuple(p) for p in self.product_sets)
        order: dict[str, None] = {}
        for p in psets:
            for t in p:
                order.setdefault(t, None)
        products = tuple(order)
        rank = {t: k for k, t in enumerate(products)}
        # per-node sets follow the global order
        psets = tuple(tuple(sorted(dict.fromkeys(p), key=rank.__getitem__)) for p in psets)
        n = len(psets)
        edges = {(int(j), int(i)): as_fraction(w) for (j, i), w in self.edges.items()}
        for j, i in edges:
            if not (0 <= j < n and 0 <= i < n):
                raise ValueError(f"edge {j}->{i} references a node outside 0..{n - 1}")
        thresholds = {(int(i), t): as_fraction(v) for (i, t), v in self.thresholds.items()}
        for i, _t in thresholds:
            if not 0 <= i < n:
                raise ValueError(f"threshold for node {i} outside 0..{n - 1}")
        ins: list[list[int]] = [[] for _ in range(n)]
        outs: list[list[int]] = [[] for _ in range(n)]
        for j, i in sorted(edges):
            ins[i].append(j)
            outs[j].append(i)
        object.__setattr__(self, "product_sets", psets)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "thresholds", thresholds)
        object.__setattr__(self, "c0", as_fraction(self.c0))
        object.__setattr__(self, "products", products)
        object.__setattr__(self, "_in", tuple(map(tuple, ins)))
        object.__setattr__(self, "_out", tuple(map(tuple, outs)))

    @property
    def n(self) -> int:
        return len(self.product_sets)

    def neighbours(self, i: int) -> tuple[int, ...]:
        """N(i): nodes with an edge into ``i`` (weight-0 edges included)."""
        return self._in[i]

    def successors(self, i: int) -> tuple[int, ...]:
        return self._out[i]

    def weight(self, j: int, i: int) -> Fraction:
        return self.edges[(j, i)]

    def theta(self, i: int, t: str) -> Fraction:
        return self.thresholds[(i, t)]

    def is_source(self, i: int) -> bool:
        return not self._in[i]

    @property
    def sources(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if not self._in[i])

    def strategies(self, i: int) -> tuple[str | None, ...]:
        """S_i in canonical order: products in global order, t0 (``None``) last."""
        return self.product_sets[i] + (None,)

    def digraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    @classmethod
    def build(
        cls,
        product_sets: Iterable[Iterable[str]],
        edges: Mapping[tuple[int, int], object] | Iterable[tuple[int, int, object]],
        thresholds: Mapping[tuple[int, str], object] | object,
        c0=1,
    ) -> "Network":
        """Convenience constructor.

        ``edges`` may be a mapping or ``(src, dst, w)`` triples. ``thresholds``
        may be a mapping or a single value applied to every ``(i, t)`` pair.
        """
        psets = [tuple(p) for p in product_sets]
        if isinstance(edges, Mapping):
            emap = dict(edges)
        else:
            emap = {}
            for j, i, w in edges:
                if (j, i) in emap:
                    raise ValueError(f"duplicate edge {j}->{i}")
                emap[(j, i)] = w
        if isinstance(thresholds, Mapping):
            tmap = dict(thresholds)
        else:
            tmap = {(i, t): thresholds for i, p in enumerate(psets) for t in p}
        return cls(tuple(psets), emap, tmap, c0)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    node: int | None = None
    edge: tuple[int, int] | None = None

    def __str__(self):
        return self.message


def validate(net: Network) -> list[Diagnostic]:
    """Every violated model invariant; an empty list means the network is valid."""
    out: list[Diagnostic] = []
    if net.n < 2:
        out.append(Diagnostic("too-few-nodes", f"need at least 2 nodes, got {net.n}"))
    if net.c0 <= 0:
        out.append(Diagnostic("c0-not-positive", f"c0 must be positive, got {format_rational(net.c0)}"))
    for i, p in enumerate(net.product_sets):
        if not p:
            out.append(Diagnostic("empty-product-set", f"node {i}: empty product set", node=i))
    for (j, i), w in sorted(net.edges.items()):
        if j == i:
            out.append(Diagnostic("self-loop", f"self loop on node {i}", node=i, edge=(j, i)))
        if not 0 <= w <= 1:
            out.append(Diagnostic(
                "weight-out-of-range",
                f"weight out of range on edge {j}->{i}: {format_rational(w)}",
                edge=(j, i),
            ))
    for i in range(net.n):
        nbrs = net.neighbours(i)
        if nbrs:
            total = sum((net.edges[(j, i)] for j in nbrs), Fraction(0))
            if total > 1:
                out.append(Diagnostic(
                    "in-weight-exceeds-1",
                    f"in-weight sum exceeds 1 at node {i}: {format_rational(total)}",
                    node=i,
                ))
    for i, p in enumerate(net.product_sets):
        for t in p:
            th = net.thresholds.get((i, t))
            if th is None:
                out.append(Diagnostic("missing-threshold", f"node {i}: no threshold for product {t}", node=i))
            elif not 0 < th <= 1:
                out.append(Diagnostic(
                    "threshold-out-of-range",
                    f"threshold out of range at node {i}, product {t}: {format_rational(th)}",
                    node=i,
                ))
    for (i, t) in sorted(net.thresholds):
        if t not in net.product_sets[i]:
            out.append(Diagnostic("threshold-unlisted-product", f"threshold for unlisted product {t} at node {i}", node=i))
    return out


@dataclass(frozen=True)
class GraphClass:
    """Structural classes of the underlying graph, with witness orders.

    The flags overlap: a simple cycle is also source free.
    """

    dag: bool
    rank: tuple[int, ...] | None
    simple_cycle: bool
    cycle_order: tuple[int, ...] | None
    source_free: bool

    @property
    def general(self) -> bool:
        return not (self.dag or self.simple_cycle or self.source_free)

    @property
    def labels(self) -> frozenset[str]:
        names = set()
        if self.dag:
            names.add("DAG")
        if self.simple_cycle:
            names.add("SimpleCycle")
        if self.source_free:
            names.add("SourceFree")
        if not names:
            names.add("General")
        return frozenset(names)


def _cycle_order(net: Network) -> tuple[int, ...] | None:
    n = net.n
    if n < 2 or len(net.edges) != n:
        return None
    if any(len(net.neighbours(i)) != 1 or len(net.successors(i)) != 1 for i in range(n)):
        return None
    order = [0]
    while True:
        nxt = net.successors(order[-1])[0]
        if nxt == 0:
            break
        order.append(nxt)
    return tuple(order) if len(order) == n else None


def classify(net: Network) -> GraphClass:
    g = net.digraph()
    dag = nx.is_directed_acyclic_graph(g)
    rank = None
    if dag:
        # level by level: a node's level is one more than its deepest predecessor
        rank = tuple(i for gen in nx.topological_generations(g) for i in sorted(gen))
    cyc = _cycle_order(net)
    return GraphClass(
        dag=dag,
        rank=rank,
        simple_cycle=cyc is not None,
        cycle_order=cyc,
        source_free=all(net.neighbours(i) for i in range(net.n)),
    )


# --- text format ---------------------------------------------------------


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno
        self.reason = message


def serialize(net: Network) -> str:
    lines = [HEADER, f"c0 {format_rational(net.c0)}"]
    for i, p in enumerate(net.product_sets):
        lines.append(f"node {i} products {','.join(p)}")
    for i, p in enumerate(net.product_sets):
        for t in p:
            if (i, t) in net.thresholds:
                lines.append(f"theta {i} {t} {format_rational(net.thresholds[(i, t)])}")
    for (j, i) in sorted(net.edges):
        lines.append(f"edge {j} {i} {format_rational(net.edges[(j, i)])}")
    return "\n".join(lines) + "\n"


def parse(text: str) -> Network:
    """Parse the ``sngame v1`` text format. Blank lines and ``#`` comments are skipped."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows or rows[0][1] != HEADER.split():
        raise ParseError(rows[0][0] if rows else 1, f"expected header {HEADER!r}")

    def rational(lineno, tok):
        try:
            return parse_rational(tok)
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from None

    def node_id(lineno, tok):
        if not tok.isdigit():
            raise ParseError(lineno, f"bad node id {tok!r}")
        return int(tok)

    c0 = Fraction(1)
    psets: dict[int, tuple[str, ...]] = {}
    thetas: dict[tuple[int, str], Fraction] = {}
    edges: dict[tuple[int, int], Fraction] = {}
    edge_line: dict[tuple[int, int], int] = {}
    seen_c0 = False
    for lineno, toks in rows[1:]:
        kind = toks[0]
        if kind == "c0":
            if len(toks) != 2:
                raise ParseError(lineno, "expected: c0 <rational>")
            if seen_c0:
                raise ParseError(lineno, "duplicate c0 line")
            c0, seen_c0 = rational(lineno, toks[1]), True
        elif kind == "node":
            if len(toks) != 4 or toks[2] != "products":
                raise ParseError(lineno, "expected: node <id> products <t1,t2,...>")
            i = node_id(lineno, toks[1])
            if i in psets:
                raise ParseError(lineno, f"duplicate node {i}")
            names = toks[3].split(",")
            if any(not _PRODUCT_RE.match(t) for t in names):
                raise ParseError(lineno, f"bad product list {toks[3]!r}")
            if len(set(names)) != len(names):
                raise ParseError(lineno, f"repeated product in {toks[3]!r}")
            psets[i] = tuple(names)
        elif kind == "theta":
            if len(toks) != 4:
                raise ParseError(lineno, "expected: theta <id> <product> <rational>")
            i = node_id(lineno, toks[1])
            if i not in psets:
                raise ParseError(lineno, f"theta for undeclared node {i}")
            if toks[2] not in psets[i]:
                raise ParseError(lineno, f"threshold for unlisted product {toks[2]} at node {i}")
            if (i, toks[2]) in thetas:
                raise ParseError(lineno, f"duplicate threshold for node {i}, product {toks[2]}")
            thetas[(i, toks[2])] = rational(lineno, toks[3])
        elif kind == "edge":
            if len(toks) != 4:
                raise ParseError(lineno, "expected: edge <src> <dst> <rational>")
            j, i = node_id(lineno, toks[1]), node_id(lineno, toks[2])
            if (j, i) in edges:
                raise ParseError(lineno, f"duplicate edge {j}->{i}")
            edges[(j, i)] = rational(lineno, toks[3])
            edge_line[(j, i)] = lineno
        else:
            raise ParseError(lineno, f"unknown record {kind!r}")
    n = len(psets)
    if sorted(psets) != list(range(n)):
        raise ParseError(rows[-1][0], "node ids must be exactly 0..n-1")
    for (j, i) in edges:
        if j >= n or i >= n:
            raise ParseError(edge_line[(j, i)], f"edge {j}->{i} references an undeclared node")
    return Network(tuple(psets[i] for i in range(n)), edges, thetas, c0)
