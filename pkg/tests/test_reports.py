import math
from fractions import Fraction as F

import pytest

from sngame import reports
from sngame.dynamics import Outcome, OrderedScheduler, has_fip, has_uniform_fip, simulate
from sngame.equilibria import find_ne, poa_pos
from sngame.gadgets import gen_fip, gen_poa_cycle, gen_poa_dag, gen_weakly_acyclic


def test_ne_roundtrip():
    net = gen_weakly_acyclic()
    rep = find_ne(net, "any", "brute")
    d = reports.loads(reports.dumps(reports.ne_report(rep)))
    assert reports.ne_report_from_dict(d) == rep


def test_verdict_roundtrip():
    v = has_fip(gen_fip((F(1, 4), F(1, 4))))
    back = reports.verdict_from_dict(reports.loads(reports.dumps(reports.verdict_report(v))))
    assert (back.property, back.holds, back.cycle, back.cycle_players) == (v.property, v.holds, v.cycle,
                                                                             v.cycle_players)
    v = has_uniform_fip(gen_weakly_acyclic())
    back = reports.verdict_from_dict(reports.loads(reports.dumps(reports.verdict_report(v))))
    assert back.bad_state == v.bad_state and not back.holds


def test_price_roundtrip():
    for net in (gen_poa_cycle(), gen_poa_dag(F(1, 2))):
        p = poa_pos(net)
        assert reports.price_from_dict(reports.loads(reports.dumps(reports.price_report(p)))) == p
    assert poa_pos(gen_poa_cycle()).poa == math.inf


def test_simulation_report():
    net = gen_weakly_acyclic()
    r = simulate(net, ("t1", "t1", "t2", "t1", "t2", "t3", "t4"), OrderedScheduler(), "best", 50)
    d = reports.loads(reports.dumps(reports.simulation_report(r)))
    assert d["outcome"] == r.outcome.value and len(d["steps"]) == len(r.steps)
    assert d["start"] == list(r.path[0])
    assert r.outcome in Outcome


def test_dumps_is_stable():
    rep = find_ne(gen_poa_cycle(), "any", "brute")
    assert reports.dumps(reports.ne_report(rep)) == reports.dumps(reports.ne_report(rep))


def test_loads_rejects():
    with pytest.raises(ValueError):
        reports.loads('{"type": "x", "version": 99}')
    with pytest.raises(ValueError):
        reports.loads("[]")
    with pytest.raises(ValueError):
        reports.ne_report_from_dict({"type": "other"})
