"""numba kernels. Same contracts and output order as ``_numpy``."""
import numpy as np
from numba import njit

IMPROVE = 0
BEST = 1


@njit(cache=True, nogil=True, inline="always")
def _decode(idx, radix, codes):
    for i in range(radix.shape[0] - 1, -1, -1):
        codes[i] = idx % radix[i]
        idx //= radix[i]


@njit(cache=True, nogil=True, inline="always")
def _advance(codes, prod_of, radix, opt_prod):
    """Step ``codes`` to the next state (last node least significant).

    Returns the smallest node index whose strategy changed.
    """
    i = radix.shape[0] - 1
    while i >= 0:
        codes[i] += 1
        if codes[i] < radix[i]:
            prod_of[i] = opt_prod[i, codes[i]]
            return i
        codes[i] = 0
        prod_of[i] = opt_prod[i, 0]
        i -= 1
    return 0


@njit(cache=True, nogil=True, inline="always")
def _values(i, prod_of, dev, acc, r, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0):
    """dev[i, k] = payoff of option k for player i; one pass over the in-edges.

    Returns the best value.
    """
    best = np.int64(-(1 << 62))
    if is_source[i]:
        for k in range(r):
            dev[i, k] = 0 if opt_prod[i, k] < 0 else c0
            best = max(best, dev[i, k])
        return best
    for e in range(in_ptr[i], in_ptr[i + 1]):
        p = prod_of[in_src[e]]
        if p >= 0:
            acc[p] += in_w[e]
    for k in range(r):
        p = opt_prod[i, k]
        dev[i, k] = 0 if p < 0 else acc[p] - opt_theta[i, k]
        best = max(best, dev[i, k])
    for e in range(in_ptr[i], in_ptr[i + 1]):
        p = prod_of[in_src[e]]
        if p >= 0:
            acc[p] = 0
    return best


@njit(cache=True, nogil=True)
def _out_edges(n, in_ptr, in_src):
    """Transpose of the in-edge CSR: out_ptr, out_dst."""
    out_ptr = np.zeros(n + 1, dtype=np.int64)
    for e in range(in_src.shape[0]):
        out_ptr[in_src[e] + 1] += 1
    for j in range(n):
        out_ptr[j + 1] += out_ptr[j]
    fill = out_ptr[:-1].copy()
    out_dst = np.empty(in_src.shape[0], dtype=np.int64)
    for i in range(n):
        for e in range(in_ptr[i], in_ptr[i + 1]):
            j = in_src[e]
            out_dst[fill[j]] = i
            fill[j] += 1
    return out_ptr, out_dst


@njit(cache=True, nogil=True)
def _setup(start, radix, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0):
    """Cursor at ``start`` with every player's deviation row filled in."""
    n = radix.shape[0]
    codes = np.empty(n, dtype=np.int64)
    _decode(start, radix, codes)
    prod_of = np.empty(n, dtype=np.int64)
    for j in range(n):
        prod_of[j] = opt_prod[j, codes[j]]
    acc = np.zeros(max(opt_prod.max() + 1, 1), dtype=np.int64)
    dev = np.empty(opt_prod.shape, dtype=np.int64)
    best = np.empty(n, dtype=np.int64)
    for i in range(n):
        best[i] = _values(i, prod_of, dev, acc, radix[i], opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0)
    out_ptr, out_dst = _out_edges(n, in_ptr, in_src)
    return codes, prod_of, acc, dev, best, out_ptr, out_dst


@njit(cache=True, nogil=True, inline="always")
def _step(codes, prod_of, acc, dev, best, out_ptr, out_dst, stamp, s,
          radix, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0):
    """Advance to state s and refresh the players whose neighbourhood changed."""
    lo = _advance(codes, prod_of, radix, opt_prod)
    for j in range(lo, radix.shape[0]):
        for e in range(out_ptr[j], out_ptr[j + 1]):
            i = out_dst[e]
            if stamp[i] != s:
                stamp[i] = s
                best[i] = _values(i, prod_of, dev, acc, radix[i], opt_prod, opt_theta,
                                  in_ptr, in_src, in_w, is_source, c0)


@njit(cache=True, nogil=True)
def payoffs(start, stop, radix, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0):
    n = radix.shape[0]
    out = np.empty((max(stop - start, 0), n), dtype=np.int64)
    if stop <= start:
        return out
    codes, prod_of, acc, dev, best, out_ptr, out_dst = _setup(
        start, radix, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0)
    stamp = np.full(n, -1, dtype=np.int64)
    for s in range(start, stop):
        if s > start:
            _step(codes, prod_of, acc, dev, best, out_ptr, out_dst, stamp, s,
                  radix, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0)
        for i in range(n):
            out[s - start, i] = dev[i, codes[i]]
    return out


@njit(cache=True, nogil=True)
def scan(size, radix, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0):
    """NE flag and social welfare of every state."""
    n = radix.shape[0]
    ne = np.ones(size, dtype=np.bool_)
    welfare = np.zeros(size, dtype=np.int64)
    if size == 0:
        return ne, welfare
    codes, prod_of, acc, dev, best, out_ptr, out_dst = _setup(
        0, radix, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0)
    stamp = np.full(n, -1, dtype=np.int64)
    for s in range(size):
        if s > 0:
            _step(codes, prod_of, acc, dev, best, out_ptr, out_dst, stamp, s,
                  radix, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0)
        total = 0
        flag = True
        for i in range(n):
            cur = dev[i, codes[i]]
            total += cur
            if cur < best[i]:
                flag = False
        ne[s] = flag
        welfare[s] = total
    return ne, welfare


@njit(cache=True, nogil=True)
def _edge_pass(size, mode, fill, indptr, succ, player, radix, stride,
               opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0):
    n = radix.shape[0]
    codes, prod_of, acc, dev, best, out_ptr, out_dst = _setup(
        0, radix, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0)
    stamp = np.full(n, -1, dtype=np.int64)
    pos = 0
    for s in range(size):
        if s > 0:
            _step(codes, prod_of, acc, dev, best, out_ptr, out_dst, stamp, s,
                  radix, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0)
        for i in range(n):
            cur = dev[i, codes[i]]
            if cur == best[i]:
                continue
            for k in range(radix[i]):
                if dev[i, k] > cur and (mode == IMPROVE or dev[i, k] == best[i]):
                    if fill:
                        succ[pos] = s + (k - codes[i]) * stride[i]
                        player[pos] = i
                    pos += 1
        if not fill:
            indptr[s + 1] = pos


@njit(cache=True, nogil=True)
def edges(size, mode, radix, stride, opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0):
    indptr = np.zeros(size + 1, dtype=np.int64)
    dummy = np.empty(0, dtype=np.int64)
    if size == 0:
        return indptr, dummy, dummy.copy()
    _edge_pass(size, mode, False, indptr, dummy, dummy, radix, stride,
               opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0)
    succ = np.empty(indptr[size], dtype=np.int64)
    player = np.empty(indptr[size], dtype=np.int64)
    _edge_pass(size, mode, True, indptr, succ, player, radix, stride,
               opt_prod, opt_theta, in_ptr, in_src, in_w, is_source, c0)
    return indptr, succ, player


@njit(cache=True, nogil=True)
def _reverse(indptr, succ):
    size = indptr.shape[0] - 1
    rptr = np.zeros(size + 1, dtype=np.int64)
    for e in range(succ.shape[0]):
        rptr[succ[e] + 1] += 1
    for v in range(size):
        rptr[v + 1] += rptr[v]
    fill = rptr[:-1].copy()
    redge = np.empty(succ.shape[0], dtype=np.int64)
    for s in range(size):
        for e in range(indptr[s], indptr[s + 1]):
            v = succ[e]
            redge[fill[v]] = e
            fill[v] += 1
    # source state of every edge
    esrc = np.empty(succ.shape[0], dtype=np.int64)
    for s in range(size):
        for e in range(indptr[s], indptr[s + 1]):
            esrc[e] = s
    return rptr, redge, esrc


@njit(cache=True, nogil=True)
def peel(indptr, succ):
    """Repeatedly delete sinks; survivors are the states with an infinite path."""
    size = indptr.shape[0] - 1
    rptr, redge, esrc = _reverse(indptr, succ)
    deg = np.empty(size, dtype=np.int64)
    alive = np.ones(size, dtype=np.bool_)
    queue = np.empty(size, dtype=np.int64)
    head = 0
    tail = 0
    for s in range(size):
        deg[s] = indptr[s + 1] - indptr[s]
        if deg[s] == 0:
            queue[tail] = s
            tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        alive[v] = False
        for r in range(rptr[v], rptr[v + 1]):
            u = esrc[redge[r]]
            deg[u] -= 1
            if deg[u] == 0:
                queue[tail] = u
                tail += 1
    return alive


@njit(cache=True, nogil=True)
def reach(indptr, succ, target):
    """States from which some target state is reachable."""
    size = indptr.shape[0] - 1
    rptr, redge, esrc = _reverse(indptr, succ)
    seen = target.copy()
    queue = np.empty(size, dtype=np.int64)
    tail = 0
    for s in range(size):
        if seen[s]:
            queue[tail] = s
            tail += 1
    head = 0
    while head < tail:
        v = queue[head]
        head += 1
        for r in range(rptr[v], rptr[v + 1]):
            u = esrc[redge[r]]
            if not seen[u]:
                seen[u] = True
                queue[tail] = u
                tail += 1
    return seen


@njit(cache=True, nogil=True)
def attractor(indptr, succ, player, terminal):
    """Layered AND-OR fixed point over (state, player) edge groups.

    Layer 0 holds the terminal states. A state joins layer r+1 when some
    player's whole edge group lands in layers <= r; its recorded choice is
    the smallest such player. Returns (layer, choice), -1 when absent.
    """
    size = indptr.shape[0] - 1
    m = succ.shape[0]
    gid = np.empty(m, dtype=np.int64)
    g = -1
    for s in range(size):
        for e in range(indptr[s], indptr[s + 1]):
            if e == indptr[s] or player[e] != player[e - 1]:
                g += 1
            gid[e] = g
    ngroups = g + 1
    gcount = np.zeros(ngroups, dtype=np.int64)
    for e in range(m):
        gcount[gid[e]] += 1
    rptr, redge, esrc = _reverse(indptr, succ)
    layer = np.full(size, -1, dtype=np.int64)
    choice = np.full(size, -1, dtype=np.int64)
    frontier = np.empty(size, dtype=np.int64)
    nf = 0
    for s in range(size):
        if terminal[s]:
            layer[s] = 0
            frontier[nf] = s
            nf += 1
    cand = np.empty(size, dtype=np.int64)
    marked = np.zeros(size, dtype=np.bool_)
    r = 0
    while nf > 0:
        nc = 0
        for f in range(nf):
            v = frontier[f]
            for q in range(rptr[v], rptr[v + 1]):
                e = redge[q]
                gcount[gid[e]] -= 1
                if gcount[gid[e]] == 0:
                    u = esrc[e]
                    if layer[u] < 0 and not marked[u]:
                        marked[u] = True
                        cand[nc] = u
                        nc += 1
        r += 1
        for c in range(nc):
            u = cand[c]
            layer[u] = r
            best = -1
            for e in range(indptr[u], indptr[u + 1]):
                if gcount[gid[e]] == 0:
                    if best < 0 or player[e] < best:
                        best = player[e]
            choice[u] = best
            frontier[c] = u
        nf = nc
    return layer, choice


@njit(cache=True, nogil=True)
def longest(indptr, succ):
    """Edges on the longest path from each state; -1 everywhere on a cycle."""
    size = indptr.shape[0] - 1
    rptr, redge, esrc = _reverse(indptr, succ)
    deg = np.empty(size, dtype=np.int64)
    dist = np.zeros(size, dtype=np.int64)
    queue = np.empty(size, dtype=np.int64)
    head = 0
    tail = 0
    for s in range(size):
        deg[s] = indptr[s + 1] - indptr[s]
        if deg[s] == 0:
            queue[tail] = s
            tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        for r in range(rptr[v], rptr[v + 1]):
            u = esrc[redge[r]]
            if dist[v] + 1 > dist[u]:
                dist[u] = dist[v] + 1
            deg[u] -= 1
            if deg[u] == 0:
                queue[tail] = u
                tail += 1
    if tail < size:
        dist[:] = -1
    return dist
