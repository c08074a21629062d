import random
from fractions import Fraction as F

import pytest

from sngame.network import Network, ParseError, classify, format_rational, parse, parse_rational, serialize, validate
from sngame.randnet import random_network

SMALL = """\
sngame v1
c0 1
# two nodes feeding each other
node 0 products t1,t2
node 1 products t1
theta 0 t1 1/2
theta 0 t2 1/3
theta 1 t1 1/4
edge 0 1 1
edge 1 0 1/2
"""


def test_parse_small():
    net = parse(SMALL)
    assert net.n == 2
    assert net.products == ("t1", "t2")
    assert net.weight(1, 0) == F(1, 2)
    assert net.theta(0, "t2") == F(1, 3)
    assert list(net.neighbours(0)) == [1]
    assert validate(net) == []


@pytest.mark.parametrize("tok,val", [("3", F(3)), ("-1/4", F(-1, 4)), ("6/8", F(3, 4))])
def test_parse_rational(tok, val):
    assert parse_rational(tok) == val


@pytest.mark.parametrize("tok", ["0.5", "1/0", "a", "1/-2", ""])
def test_parse_rational_rejects(tok):
    with pytest.raises(ValueError):
        parse_rational(tok)


def test_format_rational():
    assert format_rational(F(4, 2)) == "2"
    assert format_rational(F(-3, 9)) == "-1/3"


@pytest.mark.parametrize("text", [
    "",
    "sngame v2\n",
    SMALL.replace("edge 0 1 1", "edge 0 1 x"),
    SMALL.replace("node 1 products t1", "node 1 products t1\nnode 1 products t2"),
    SMALL + "bogus line\n",
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_roundtrip_random():
    rng = random.Random(1)
    for kind in ("cycle", "source-free", "dag", "scc2", "general"):
        for _ in range(20):
            net = random_network(rng, kind, rng.randint(2, 6))
            text = serialize(net)
            again = parse(text)
            assert again == net
            assert serialize(again) == text


def test_validate_codes():
    net = Network.build([("t1",), ("t1",)], [(0, 1, F(3, 4)), (1, 1, F(1, 4))], F(1, 2))
    codes = {d.code for d in validate(net)}
    assert "self-loop" in codes
    net = Network.build([("t1",), ("t1",), ("t1",)], [(0, 2, F(3, 4)), (1, 2, F(1, 2))], F(1, 2))
    assert [d.code for d in validate(net)] == ["in-weight-exceeds-1"]
    net = Network.build([("t1",), ()], [(0, 1, 1)], F(1, 2))
    assert "empty-product-set" in {d.code for d in validate(net)}
    net = Network(( ("t1",), ("t1",) ), {(0, 1): F(1)}, {(1, "t1"): F(1, 2)}, 1)
    assert "missing-threshold" in {d.code for d in validate(net)}


def test_validate_too_few_and_c0():
    net = Network.build([("t1",)], [], F(1, 2))
    assert "too-few-nodes" in {d.code for d in validate(net)}
    net = Network.build([("t1",), ("t1",)], [(0, 1, 1)], F(1, 2), c0=0)
    assert "c0-not-positive" in {d.code for d in validate(net)}


def _net(n, arcs):
    return Network.build([("t1",)] * n, [(j, i, F(1, 2)) for j, i in arcs], F(1, 2))


def test_classify():
    cyc = classify(_net(3, [(0, 1), (1, 2), (2, 0)]))
    assert cyc.simple_cycle and cyc.source_free and not cyc.dag
    assert sorted(cyc.cycle_order) == [0, 1, 2]
    dag = classify(_net(3, [(0, 1), (1, 2), (0, 2)]))
    assert dag.dag and dag.labels == {"DAG"}
    assert dag.rank is not None and list(dag.rank).index(0) < list(dag.rank).index(2)
    sf = classify(_net(4, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 2)]))
    assert sf.source_free and not sf.simple_cycle
    gen = classify(_net(3, [(0, 1), (1, 2), (2, 1)]))
    assert gen.general and gen.labels == {"General"}


def test_sources():
    net = _net(3, [(0, 1), (1, 2)])
    assert list(net.sources) == [0]
    assert net.is_source(0) and not net.is_source(2)
    assert net.strategies(1) == ("t1", None)
