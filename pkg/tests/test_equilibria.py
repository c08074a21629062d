import itertools
import math
import random
from fractions import Fraction as F

import pytest

from sngame.equilibria import (
    GraphClassError,
    NoEquilibrium,
    NotNashError,
    SelfSustainingSCS,
    check_ne_structure,
    compute_Xt,
    dag_rank_ne,
    enumerate_ne_brute,
    find_ne,
    find_self_sustaining,
    lemma_structure_holds,
    ne_report_brute,
    poa_pos,
    run_phase,
    social_optimum_brute,
    verify_nash_cycle,
    verify_nash_sourcefree,
)
from sngame.gadgets import gen_equitable_example, gen_poa_cycle, gen_triangle_no_ne
from sngame.game import NEKind, is_nash, social_welfare
from sngame.network import Network, classify
from sngame.randnet import random_cycle, random_dag, random_network, random_source_free


def _all_states(net):
    return itertools.product(*(net.strategies(i) for i in range(net.n)))


def test_brute_matches_fraction_oracle():
    rng = random.Random(11)
    for _ in range(30):
        net = random_network(rng, rng.choice(["general", "dag", "cycle"]), rng.randint(2, 4))
        slow = [s for s in _all_states(net) if is_nash(net, s).is_ne]
        assert enumerate_ne_brute(net) == sorted(slow, key=lambda s: [net.strategies(i).index(x)
                                                                        for i, x in enumerate(s)])


def test_sources_dominant_loses_nothing():
    rng = random.Random(12)
    for _ in range(30):
        net = random_network(rng, "general", rng.randint(2, 5))
        assert enumerate_ne_brute(net) == enumerate_ne_brute(net, sources_dominant=True)


def test_two_node_cycle_example():
    net = Network.build([("t1",), ("t1",)], [(0, 1, F(1, 2)), (1, 0, F(1, 2))], F(1, 4))
    rep = verify_nash_cycle(net)
    assert rep.exists["nontrivial"] and rep.witnesses["nontrivial"] == ("t1", "t1")
    net = Network.build([("t1",), ("t1",)], [(0, 1, F(1, 2)), (1, 0, F(1, 2))], F(3, 4))
    assert not verify_nash_cycle(net).exists["nontrivial"]


def test_cycle_method_rejects_other_graphs():
    with pytest.raises(GraphClassError):
        verify_nash_cycle(gen_triangle_no_ne())


def test_compute_Xt_trace_shrinks():
    rng = random.Random(13)
    for _ in range(50):
        net = random_source_free(rng, rng.randint(2, 7))
        for t in net.products:
            seq = compute_Xt(net, t, trace=True)
            assert all(b < a for a, b in zip(seq, seq[1:]))
            assert len(seq) - 1 <= net.n
            assert seq[-1] == compute_Xt(net, t)


def test_self_sustaining_matches_subset_search():
    rng = random.Random(14)
    for _ in range(60):
        net = random_network(rng, "general", rng.randint(2, 6))
        for t in net.products:
            found = find_self_sustaining(net, t)
            exists = any(SelfSustainingSCS(t, frozenset(c)).holds(net)
                         for k in range(1, net.n + 1) for c in itertools.combinations(range(net.n), k))
            assert (found is not None) == exists
            if found is not None:
                assert found.holds(net)


def test_equitable_example():
    net = gen_equitable_example()
    assert is_nash(net, (None, None, "t3", "t3", "t3", "t3")) is NEKind.NON_TRIVIAL
    s = ("t1",) * 3 + ("t3",) * 3
    assert not is_nash(net, s).is_ne
    assert lemma_structure_holds(net, s)
    assert find_self_sustaining(net, "t3").nodes == {3, 4, 5}
    with pytest.raises(NotNashError):
        check_ne_structure(net, s)
    assert check_ne_structure(net, (None, None, "t3", "t3", "t3", "t3"))


def test_dag_rank_ne_is_nash():
    rng = random.Random(15)
    for _ in range(100):
        net = random_dag(rng, rng.randint(2, 8))
        s = dag_rank_ne(net)
        assert is_nash(net, s).is_ne
        assert any(x is not None for x in s)


def test_run_phase_is_monotone():
    rng = random.Random(16)
    for _ in range(50):
        net = random_network(rng, "general", rng.randint(2, 6))
        t = net.products[0]
        s = run_phase(net, (None,) * net.n, t)
        assert all(x in (None, t) for x in s)
        assert run_phase(net, s, t) == s


@pytest.mark.parametrize("kind", ["any", "nontrivial", "determined"])
def test_auto_matches_brute(kind):
    rng = random.Random(17)
    for _ in range(80):
        net = random_network(rng, rng.choice(["cycle", "source-free", "dag", "general"]), rng.randint(2, 6))
        auto = find_ne(net, kind)
        assert auto.exists[kind] == ne_report_brute(net).exists[kind]


def test_find_ne_method_errors():
    with pytest.raises(GraphClassError):
        find_ne(gen_triangle_no_ne(), "any", "cycle")
    net = random_cycle(random.Random(1), 4)
    with pytest.raises(GraphClassError):
        find_ne(net, "determined", "sourcefree")
    with pytest.raises(ValueError):
        find_ne(net, "weird")


def test_sourcefree_witness():
    rng = random.Random(18)
    for _ in range(50):
        net = random_source_free(rng, rng.randint(2, 6))
        rep = verify_nash_sourcefree(net)
        rep.check_witnesses(net)


def test_poa_cycle_values():
    net = gen_poa_cycle(F(1, 8))
    p = poa_pos(net)
    assert (p.optimum, p.worst_ne, p.best_ne) == (F(3, 4), 0, F(1, 4))
    assert p.poa == math.inf and p.pos == 3
    s, v = social_optimum_brute(net)
    assert v == F(3, 4) == social_welfare(net, s)


def test_poa_no_equilibrium():
    with pytest.raises(NoEquilibrium):
        poa_pos(gen_triangle_no_ne())


def test_optimum_oracle():
    rng = random.Random(19)
    for _ in range(20):
        net = random_network(rng, "general", rng.randint(2, 4))
        best = max(social_welfare(net, s) for s in _all_states(net))
        assert social_optimum_brute(net)[1] == best


def test_graph_class_cycle_is_source_free():
    net = random_cycle(random.Random(2), 5)
    gc = classify(net)
    assert gc.simple_cycle and gc.source_free
