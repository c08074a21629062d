"""Payoff-equivalent polymatrix form of a social network game.

Each player's payoff splits into pairwise tables a^{ij}(s_i, s_j); the
threshold (or c0 for sources) is spread evenly over the n - 1 opponents.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .game import payoff
from .network import Network, format_rational, parse_rational
from .space import StateSpace

__all__ = [
    "PolymatrixGame",
    "check_equivalence",
    "export_polymatrix",
    "parse_polymatrix",
    "polymatrix_payoff",
    "to_polymatrix",
]

Table = dict[tuple, Fraction]


@dataclass(frozen=True)
class PolymatrixGame:
    strategies: tuple[tuple, ...]
    # (i, j) -> {(s_i, s_j): a^{ij}(s_i, s_j)}
    tables: Mapping[tuple[int, int], Table]

    @property
    def n(self) -> int:
        return len(self.strategies)


def to_polymatrix(net: Network) -> PolymatrixGame:
    n = net.n
    if n < 2:
        raise ValueError("polymatrix form needs at least two players")
    share = Fraction(1, n - 1)
    tables: dict[tuple[int, int], Table] = {}
    for i in range(n):
        nb = set(net.neighbours(i))
        for j in range(n):
            if j == i:
                continue
            tab: Table = {}
            for si in net.strategies(i):
                for sj in net.strategies(j):
                    if si is None:
                        v = Fraction(0)
                    elif net.is_source(i):
                        v = net.c0 * share
                    elif j in nb and si == sj:
                        v = net.weight(j, i) - net.theta(i, si) * share
                    else:
                        v = -net.theta(i, si) * share
                    tab[(si, sj)] = v
            tables[(i, j)] = tab
    return PolymatrixGame(tuple(net.strategies(i) for i in range(n)), tables)


def polymatrix_payoff(g: PolymatrixGame, s: Sequence, i: int) -> Fraction:
    return sum((g.tables[(i, j)][(s[i], s[j])] for j in range(g.n) if j != i), Fraction(0))


@dataclass
class EquivalenceResult:
    ok: bool
    checked: int
    exhaustive: bool
    counterexample: tuple | None = None  # (state, player, direct, polymatrix)


_LIMIT = 1 << 62


def _scaled_tables(g: PolymatrixGame, space: StateSpace):
    """Integer tables T[i][j][k_i, k_j] on the space's option order, plus the
    common denominator. Falls back to Python ints when int64 could overflow."""
    vals = [v for tab in g.tables.values() for v in tab.values()]
    den = math.lcm(*(v.denominator for v in vals)) if vals else 1
    top = max((abs(v) * den for v in vals), default=0)
    # |direct| <= max(c0, 1) in scaled units; |sum of table entries| <= n * top
    wide = top * g.n * space.scale >= _LIMIT or max(space.c0, space.scale) * den >= _LIMIT
    dtype = object if wide else np.int64
    out = {}
    for (i, j), tab in g.tables.items():
        arr = np.zeros((len(space.options[i]), len(space.options[j])), dtype=dtype)
        for a, x in enumerate(space.options[i]):
            for b, y in enumerate(space.options[j]):
                arr[a, b] = int(tab[(x, y)] * den)
        out[(i, j)] = arr
    return out, den, dtype


def check_equivalence(
    net: Network,
    g: PolymatrixGame | None = None,
    samples: int | None = None,
    seed: int = 0,
    budget: int | None = None,
) -> EquivalenceResult:
    """Compare the polymatrix payoffs with the direct ones.

    Exhaustive (``samples=None``): every state, vectorised with exact
    integers on a common denominator and compared against the kernel
    payoffs. Sampled: ``samples`` random states, both sides in Fractions.
    """
    g = g or to_polymatrix(net)
    if samples is None:
        from . import kernels

        space = StateSpace(net, budget=budget)
        tables, den, dtype = _scaled_tables(g, space)
        checked = 0
        for start in range(0, space.size, 1 << 14):
            stop = min(space.size, start + (1 << 14))
            codes = space.codes(start, stop)
            direct = kernels.payoffs(space, start, stop).astype(dtype)
            for i in range(net.n):
                acc = np.zeros(stop - start, dtype=dtype)
                for j in range(net.n):
                    if j != i:
                        acc = acc + tables[(i, j)][codes[:, i], codes[:, j]]
                # direct * den == acc * scale, exactly
                bad = np.flatnonzero(direct[:, i] * den != acc * space.scale)
                if bad.size:
                    s = space.decode(start + int(bad[0]))
                    return EquivalenceResult(False, checked, True,
                                             (s, i, payoff(net, s, i), polymatrix_payoff(g, s, i)))
            checked += stop - start
        return EquivalenceResult(True, checked, True)
    rng = random.Random(seed)
    for k in range(samples):
        s = tuple(rng.choice(net.strategies(i)) for i in range(net.n))
        for i in range(net.n):
            a, b = payoff(net, s, i), polymatrix_payoff(g, s, i)
            if a != b:
                return EquivalenceResult(False, k, False, (s, i, a, b))
    return EquivalenceResult(True, samples, False)


def _tok(x) -> str:
    return "_" if x is None else x


def export_polymatrix(g: PolymatrixGame) -> str:
    """``a <i> <j> <s_i> <s_j> <rational>`` lines, pairs ascending, strategies in canonical order."""
    lines = ["polymatrix v1", f"players {g.n}"]
    for i, strat in enumerate(g.strategies):
        lines.append(f"strategies {i} " + ",".join(_tok(x) for x in strat))
    for (i, j) in sorted(g.tables):
        tab = g.tables[(i, j)]
        for x in g.strategies[i]:
            for y in g.strategies[j]:
                lines.append(f"a {i} {j} {_tok(x)} {_tok(y)} {format_rational(tab[(x, y)])}")
    return "\n".join(lines) + "\n"


def parse_polymatrix(text: str) -> PolymatrixGame:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0] != "polymatrix v1":
        raise ValueError("missing 'polymatrix v1' header")
    n = None
    strategies: dict[int, tuple] = {}
    tables: dict[tuple[int, int], Table] = {}

    def sym(t):
        return None if t == "_" else t

    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if parts[0] == "players":
            n = int(parts[1])
        elif parts[0] == "strategies":
            strategies[int(parts[1])] = tuple(sym(t) for t in parts[2].split(","))
        elif parts[0] == "a" and len(parts) == 6:
            i, j = int(parts[1]), int(parts[2])
            key = (sym(parts[3]), sym(parts[4]))
            tab = tables.setdefault((i, j), {})
            if key in tab:
                raise ValueError(f"line {lineno}: duplicate entry")
            tab[key] = parse_rational(parts[5])
        else:
            raise ValueError(f"line {lineno}: cannot parse {ln!r}")
    if n is None or sorted(strategies) != list(range(n)):
        raise ValueError("player count and strategy lines disagree")
    return PolymatrixGame(tuple(strategies[i] for i in range(n)), tables)
