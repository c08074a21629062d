"""Mixed-radix encoding of joint strategies and exact integer scaling.

Every rational in a network (weights, thresholds, c0) is multiplied by the
least common multiple of their denominators, so payoffs become int64 values
that compare exactly like the Fractions they stand for. The bound check in
:class:`StateSpace` makes overflow a hard error rather than a silent wrap.
"""
from __future__ import annotations

import math
import os
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .network import Network

__all__ = ["BudgetExceeded", "StateSpace", "default_budget"]

DEFAULT_BUDGET = 1 << 24
_INT_LIMIT = 1 << 62


class BudgetExceeded(RuntimeError):
    def __init__(self, count: int, budget: int):
        super().__init__(f"state space has {count} joint strategies, budget is {budget}")
        self.count = count
        self.budget = budget


def default_budget() -> int:
    raw = os.environ.get("SNGAME_BUDGET")
    if raw:
        value = int(raw)
        if value <= 0:
            raise ValueError("SNGAME_BUDGET must be positive")
        return value
    return DEFAULT_BUDGET


class StateSpace:
    """All joint strategies of ``net`` (optionally restricted), as integers.

    Node 0 is the most significant digit and each node's digit runs over its
    options in canonical order (products, then t0), so index order equals
    lexicographic order of joint strategies.

    ``sources_dominant`` drops t0 from every source node: no equilibrium uses
    it there since any product pays c0 > 0. ``restrict`` maps a node to the
    subset of strategies it may use.
    """

    def __init__(
        self,
        net: Network,
        budget: int | None = None,
        sources_dominant: bool = False,
        restrict: Mapping[int, Iterable] | None = None,
        scale_factor: int = 1,
    ):
        self.net = net
        n = net.n
        self.n = n
        self.budget = default_budget() if budget is None else budget
        options = []
        for i in range(n):
            opts = net.strategies(i)
            if sources_dominant and net.is_source(i):
                opts = net.product_sets[i]
            if restrict and i in restrict:
                allowed = set(restrict[i])
                opts = tuple(x for x in opts if x in allowed)
            if not opts:
                raise ValueError(f"node {i} has no strategy left after restriction")
            options.append(tuple(opts))
        self.options: tuple[tuple, ...] = tuple(options)
        self.restricted = any(len(o) != len(net.strategies(i)) for i, o in enumerate(options))
        self.size = math.prod(len(o) for o in options)
        if self.size > self.budget:
            raise BudgetExceeded(self.size, self.budget)

        self.radix = np.array([len(o) for o in options], dtype=np.int64)
        stride = np.ones(n, dtype=np.int64)
        for i in range(n - 2, -1, -1):
            stride[i] = stride[i + 1] * self.radix[i + 1]
        self.stride = stride
        self._code = [{x: k for k, x in enumerate(o)} for o in options]

        denominators = [net.c0.denominator]
        denominators += [w.denominator for w in net.edges.values()]
        denominators += [v.denominator for v in net.thresholds.values()]
        self.scale = math.lcm(*denominators) * scale_factor

        prod_id = {t: k for k, t in enumerate(net.products)}
        width = int(self.radix.max())
        self.opt_prod = np.full((n, width), -2, dtype=np.int64)
        self.opt_theta = np.zeros((n, width), dtype=np.int64)
        for i, opts in enumerate(options):
            for k, x in enumerate(opts):
                if x is None:
                    self.opt_prod[i, k] = -1
                else:
                    self.opt_prod[i, k] = prod_id[x]
                    self.opt_theta[i, k] = self._int(net.thresholds[(i, x)])
        ptr = [0]
        src, wts = [], []
        for i in range(n):
            for j in net.neighbours(i):
                src.append(j)
                wts.append(self._int(net.edges[(j, i)]))
            ptr.append(len(src))
        self.in_ptr = np.array(ptr, dtype=np.int64)
        self.in_src = np.array(src, dtype=np.int64)
        self.in_w = np.array(wts, dtype=np.int64)
        self.is_source = np.array([net.is_source(i) for i in range(n)], dtype=np.bool_)
        self.c0 = self._int(net.c0)

        worst = abs(self.c0)
        for i in range(n):
            row = np.abs(self.in_w[self.in_ptr[i]:self.in_ptr[i + 1]]).sum() if n else 0
            worst = max(worst, int(row) + int(np.abs(self.opt_theta[i]).max()))
        if 4 * (n + 1) * worst >= _INT_LIMIT:
            raise OverflowError(
                f"scaled payoffs exceed the int64 kernel range (scale {self.scale}); "
                "use the Fraction API for this network"
            )

    def _int(self, x: Fraction) -> int:
        v = x * self.scale
        assert v.denominator == 1
        return int(v)

    def to_fraction(self, v: int) -> Fraction:
        return Fraction(int(v), self.scale)

    def encode(self, s: Sequence) -> int:
        if len(s) != self.n:
            raise ValueError("wrong joint strategy length")
        idx = 0
        for i, x in enumerate(s):
            try:
                idx += self._code[i][x] * int(self.stride[i])
            except KeyError:
                raise ValueError(f"node {i}: strategy {x!r} outside the state space") from None
        return idx

    def decode(self, idx: int) -> tuple:
        idx = int(idx)
        if not 0 <= idx < self.size:
            raise IndexError(idx)
        out = []
        for i in range(self.n):
            k, idx = divmod(idx, int(self.stride[i]))
            out.append(self.options[i][k])
        return tuple(out)

    def codes(self, start: int, stop: int) -> np.ndarray:
        idx = np.arange(start, stop, dtype=np.int64)
        return (idx[:, None] // self.stride[None, :]) % self.radix[None, :]

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"StateSpace(n={self.n}, size={self.size}, scale={self.scale})"
