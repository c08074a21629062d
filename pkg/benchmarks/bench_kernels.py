"""Time the state-space kernels on both backends.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--max-states 1000000]

Numba compilation is triggered once before timing. Every timed pair is
also checked for identical output.
"""
import argparse
import random
import time
from fractions import Fraction as F

import numpy as np

from sngame import kernels
from sngame.gadgets import gen_fip, gen_ufip
from sngame.randnet import random_general
from sngame.space import StateSpace


def workloads(max_states):
    rng = random.Random(0)
    out = [
        ("fip gadget n=6", gen_fip((F(1, 4), F(1, 4)))),
        ("ufip gadget n=8", gen_ufip((F(1, 2), F(1, 2)))),
    ]
    for n in (8, 10, 12):
        out.append((f"random n={n}", random_general(rng, n, n_products=3, p=0.3)))
    return [(name, net) for name, net in out if StateSpace(net).size <= max_states]


def kernel_calls(space):
    def scan():
        return kernels.scan(space)

    def edges():
        return kernels.edges(space, kernels.IMPROVE)

    indptr, succ, player = kernels.edges(space, kernels.IMPROVE)
    term = indptr[1:] == indptr[:-1]
    return {
        "scan": scan,
        "edges": edges,
        "peel": lambda: kernels.peel(indptr, succ),
        "reach": lambda: kernels.reach(indptr, succ, term),
        "attractor": lambda: kernels.attractor(indptr, succ, player, term),
    }


def best_of(fn, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--max-states", type=int, default=1 << 20)
    args = ap.parse_args()

    if not kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy backend can be timed")
    backends = sorted(kernels.BACKENDS)
    for name, net in workloads(1 << 8)[:1]:  # compile once
        for b in backends:
            with kernels.use_backend(b):
                for fn in kernel_calls(StateSpace(net)).values():
                    fn()

    print(f"{'workload':<18} {'states':>9} {'kernel':<10} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for name, net in workloads(args.max_states):
        space = StateSpace(net)
        results = {}
        for b in backends:
            with kernels.use_backend(b):
                results[b] = {k: best_of(fn, args.repeat) for k, fn in kernel_calls(space).items()}
        for k in results[backends[0]]:
            times = [results[b][k][0] for b in backends]
            if len(backends) == 2:
                assert same(results["numba"][k][1], results["numpy"][k][1]), f"{name}/{k}: backends disagree"
                speed = f"{results['numpy'][k][0] / max(results['numba'][k][0], 1e-9):8.1f}x"
            else:
                speed = ""
            print(f"{name:<18} {space.size:>9} {k:<10} " + " ".join(f"{t * 1e3:>8.1f}ms" for t in times)
                  + f"  {speed}")


if __name__ == "__main__":
    main()
