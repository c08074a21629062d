import os
import random
import subprocess
import sys
from fractions import Fraction as F

import numpy as np
import pytest

from sngame import kernels
from sngame.game import is_nash, payoff, social_welfare
from sngame.gadgets import gen_fip, gen_ufip
from sngame.randnet import random_network
from sngame.space import BudgetExceeded, StateSpace

needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")


def _run_all(space):
    out = {"payoffs": kernels.payoffs(space)}
    out["ne"], out["welfare"] = kernels.scan(space)
    for mode in (kernels.IMPROVE, kernels.BEST):
        indptr, succ, player = kernels.edges(space, mode)
        term = indptr[1:] == indptr[:-1]
        out[f"edges{mode}"] = (indptr, succ, player)
        out[f"peel{mode}"] = kernels.peel(indptr, succ)
        out[f"reach{mode}"] = kernels.reach(indptr, succ, term)
        out[f"attr{mode}"] = kernels.attractor(indptr, succ, player, term)
        out[f"long{mode}"] = kernels.longest(indptr, succ)
    return out


def _equal(a, b):
    if isinstance(a, tuple):
        return all(_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


@needs_numba
def test_backends_agree():
    rng = random.Random(41)
    nets = [random_network(rng, rng.choice(["general", "cycle", "source-free", "dag"]), rng.randint(2, 6))
            for _ in range(40)]
    nets += [gen_fip((F(1, 4), F(1, 4))), gen_ufip((F(1, 2), F(1, 2)))]
    for net in nets:
        space = StateSpace(net)
        with kernels.use_backend("numba"):
            a = _run_all(space)
        with kernels.use_backend("numpy"):
            b = _run_all(space)
        for key in a:
            assert _equal(a[key], b[key]), key


@pytest.mark.parametrize("backend", sorted(kernels.BACKENDS))
def test_scan_matches_fractions(backend):
    rng = random.Random(42)
    with kernels.use_backend(backend):
        for _ in range(20):
            net = random_network(rng, "general", rng.randint(2, 4))
            space = StateSpace(net)
            pay = kernels.payoffs(space)
            ne, welfare = kernels.scan(space)
            for idx in range(space.size):
                s = space.decode(idx)
                assert space.encode(s) == idx
                assert [space.to_fraction(v) for v in pay[idx]] == [payoff(net, s, i) for i in range(net.n)]
                assert space.to_fraction(welfare[idx]) == social_welfare(net, s)
                assert bool(ne[idx]) == is_nash(net, s).is_ne


def test_use_backend_restores():
    before = kernels.get_backend()
    with kernels.use_backend("numpy"):
        assert kernels.get_backend() == "numpy"
    assert kernels.get_backend() == before
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


def test_budget():
    net = gen_ufip((F(1, 2), F(1, 2)))
    with pytest.raises(BudgetExceeded):
        StateSpace(net, budget=100)


def test_env_selection():
    env = dict(os.environ, SNGAME_KERNEL="numpy")
    code = "from sngame import kernels; print(kernels.get_backend())"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "numpy"
    env["SNGAME_KERNEL"] = "bogus"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.returncode != 0 and "SNGAME_KERNEL" in out.stderr
