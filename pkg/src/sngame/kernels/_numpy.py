"""Vectorised numpy kernels, processed in blocks of states."""
import numpy as np

IMPROVE = 0
BEST = 1

BLOCK = 1 << 15
_NEG = np.int64(-(1 << 62))


def _codes(start, stop, radix):
    idx = np.arange(start, stop, dtype=np.int64)
    stride = np.ones_like(radix)
    stride[:-1] = np.cumprod(radix[::-1])[::-1][1:]
    return (idx[:, None] // stride[None, :]) % radix[None, :]


def _deviations(codes, radix, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0):
    """dev[b, i, k]: payoff of node i playing option k; _NEG on padding."""
    n = radix.shape[0]
    width = opt_prod.shape[1]
    played = opt_prod[np.arange(n)[None, :], codes]
    dev = np.empty((codes.shape[0], n, width), dtype=np.int64)
    for i in range(n):
        prods = opt_prod[i]
        if is_source[i]:
            row = np.where(prods >= 0, c0, 0)
            dev[:, i, :] = row[None, :]
        else:
            lo, hi = in_ptr[i], in_ptr[i + 1]
            nb = played[:, in_src[lo:hi]]
            match = nb[:, :, None] == prods[None, None, :]
            acc = (match * in_w[lo:hi][None, :, None]).sum(axis=1)
            dev[:, i, :] = np.where(prods[None, :] >= 0, acc - opt_theta[i][None, :], 0)
        dev[:, i, radix[i]:] = _NEG
    return dev


def payoffs(start, stop, radix, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0):
    codes = _codes(start, stop, radix)
    dev = _deviations(codes, radix, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0)
    return np.take_along_axis(dev, codes[:, :, None], axis=2)[:, :, 0]


def scan(size, radix, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0):
    ne = np.empty(size, dtype=np.bool_)
    welfare = np.empty(size, dtype=np.int64)
    for start in range(0, size, BLOCK):
        stop = min(size, start + BLOCK)
        codes = _codes(start, stop, radix)
        dev = _deviations(codes, radix, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0)
        cur = np.take_along_axis(dev, codes[:, :, None], axis=2)
        ne[start:stop] = ~(dev > cur).any(axis=(1, 2))
        welfare[start:stop] = cur[:, :, 0].sum(axis=1)
    return ne, welfare


def edges(size, mode, radix, stride, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0):
    counts = np.zeros(size, dtype=np.int64)
    succ_parts, player_parts = [], []
    for start in range(0, size, BLOCK):
        stop = min(size, start + BLOCK)
        codes = _codes(start, stop, radix)
        dev = _deviations(codes, radix, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0)
        cur = np.take_along_axis(dev, codes[:, :, None], axis=2)
        mask = dev > cur
        if mode == BEST:
            mask &= dev == dev.max(axis=2, keepdims=True)
        b, i, k = np.nonzero(mask)
        counts[start:stop] = np.bincount(b, minlength=stop - start)
        s = b + start
        succ_parts.append(s + (k - codes[b, i]) * stride[i])
        player_parts.append(i)
    indptr = np.zeros(size + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    succ = np.concatenate(succ_parts).astype(np.int64) if succ_parts else np.empty(0, np.int64)
    player = np.concatenate(player_parts).astype(np.int64) if player_parts else np.empty(0, np.int64)
    return indptr, succ, player


def _row_count(indptr, flags):
    c = np.zeros(flags.shape[0] + 1, dtype=np.int64)
    np.cumsum(flags, out=c[1:])
    return c[indptr[1:]] - c[indptr[:-1]]


def peel(indptr, succ):
    alive = np.ones(indptr.shape[0] - 1, dtype=np.bool_)
    while True:
        deg = _row_count(indptr, alive[succ])
        drop = alive & (deg == 0)
        if not drop.any():
            return alive
        alive &= ~drop


def reach(indptr, succ, target):
    seen = target.copy()
    while True:
        hit = _row_count(indptr, seen[succ]) > 0
        grow = hit & ~seen
        if not grow.any():
            return seen
        seen |= grow


def attractor(indptr, succ, player, terminal):
    size = indptr.shape[0] - 1
    m = succ.shape[0]
    esrc = np.repeat(np.arange(size, dtype=np.int64), np.diff(indptr))
    new_group = np.ones(m, dtype=np.bool_)
    if m:
        new_group[1:] = (esrc[1:] != esrc[:-1]) | (player[1:] != player[:-1])
    gstart = np.flatnonzero(new_group)
    gptr = np.append(gstart, m)
    gstate = esrc[gstart]
    gplayer = player[gstart]
    layer = np.full(size, -1, dtype=np.int64)
    choice = np.full(size, -1, dtype=np.int64)
    layer[terminal] = 0
    r = 0
    while True:
        good = layer >= 0
        bad_in_group = _row_count(gptr, ~good[succ])
        full = (bad_in_group == 0) & ~good[gstate]
        if not full.any():
            return layer, choice
        r += 1
        pick = np.full(size, np.iinfo(np.int64).max, dtype=np.int64)
        np.minimum.at(pick, gstate[full], gplayer[full])
        new = pick != np.iinfo(np.int64).max
        layer[new] = r
        choice[new] = pick[new]


def longest(indptr, succ):
    size = indptr.shape[0] - 1
    alive = peel(indptr, succ)
    if alive.any():
        return np.full(size, -1, dtype=np.int64)
    has = indptr[1:] > indptr[:-1]
    rows = indptr[:-1][has]
    dist = np.zeros(size, dtype=np.int64)
    while True:
        nxt = np.zeros(size, dtype=np.int64)
        if rows.size:
            nxt[has] = np.maximum.reduceat(dist[succ] + 1, rows)
        if np.array_equal(nxt, dist):
            return dist
        dist = nxt
