"""Machine-readable reports (JSON) for equilibria, dynamics and welfare.

Rationals are written as ``"p/q"`` strings, t0 as ``null`` and an
unbounded ratio as ``"inf"``. Keys are sorted so output is byte-stable.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Any

from .dynamics import DynamicsVerdict, SimulationResult
from .equilibria import NEReport, PriceRatios
from .network import format_rational, parse_rational

__all__ = ["dumps", "loads", "ne_report", "price_report", "simulation_report", "verdict_report",
           "ne_report_from_dict", "verdict_from_dict"]

VERSION = 1


def _rat(x) -> Any:
    if x is None:
        return None
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return format_rational(Fraction(x))


def _unrat(x) -> Any:
    if x is None:
        return None
    if x == "inf":
        return math.inf
    return parse_rational(x)


def _state(s) -> list | None:
    return None if s is None else list(s)


def ne_report(rep: NEReport) -> dict:
    return {
        "type": "ne-report",
        "version": VERSION,
        "method": rep.method,
        "exists": dict(rep.exists),
        "witnesses": {k: _state(v) for k, v in rep.witnesses.items()},
        "states": rep.states,
        "graph_class": list(rep.graph_class),
        "notes": list(rep.notes),
    }


def ne_report_from_dict(d: dict) -> NEReport:
    if d.get("type") != "ne-report":
        raise ValueError("not an ne-report")
    return NEReport(
        method=d["method"],
        exists=dict(d["exists"]),
        witnesses={k: None if v is None else tuple(v) for k, v in d["witnesses"].items()},
        states=d["states"],
        graph_class=tuple(d["graph_class"]),
        notes=list(d["notes"]),
    )


def verdict_report(v: DynamicsVerdict) -> dict:
    return {
        "type": "dynamics-verdict",
        "version": VERSION,
        "property": v.property,
        "holds": v.holds,
        "states": v.states,
        "edges": v.edges,
        "certificate": v.certificate(),
    }


def verdict_from_dict(d: dict) -> DynamicsVerdict:
    if d.get("type") != "dynamics-verdict":
        raise ValueError("not a dynamics-verdict")
    cert = d["certificate"]
    return DynamicsVerdict(
        property=d["property"],
        holds=d["holds"],
        states=d["states"],
        edges=d["edges"],
        cycle=[tuple(s) for s in cert["cycle"]] if "cycle" in cert else None,
        cycle_players=list(cert["players"]) if "players" in cert else None,
        bad_state=tuple(cert["bad_state"]) if "bad_state" in cert else None,
    )


def price_report(p: PriceRatios) -> dict:
    return {
        "type": "price-report",
        "version": VERSION,
        "optimum": _rat(p.optimum),
        "optimum_state": _state(p.optimum_state),
        "worst_ne": _rat(p.worst_ne),
        "worst_state": _state(p.worst_state),
        "best_ne": _rat(p.best_ne),
        "best_state": _state(p.best_state),
        "ne_count": p.ne_count,
        "poa": "undefined" if p.poa is None else _rat(p.poa),
        "pos": "undefined" if p.pos is None else _rat(p.pos),
    }


def price_from_dict(d: dict) -> PriceRatios:
    def ratio(x):
        return None if x == "undefined" else _unrat(x)

    return PriceRatios(
        optimum=_unrat(d["optimum"]),
        optimum_state=tuple(d["optimum_state"]),
        worst_ne=_unrat(d["worst_ne"]),
        worst_state=tuple(d["worst_state"]),
        best_ne=_unrat(d["best_ne"]),
        best_state=tuple(d["best_state"]),
        ne_count=d["ne_count"],
        poa=ratio(d["poa"]),
        pos=ratio(d["pos"]),
    )


def simulation_report(r: SimulationResult) -> dict:
    return {
        "type": "simulation",
        "version": VERSION,
        "outcome": r.outcome.value,
        "start": _state(r.path[0]),
        "end": _state(r.path[-1]),
        "cycle_start": r.cycle_start,
        "steps": [
            {"k": st.k, "player": st.player, "from": st.before, "to": st.after,
             "payoff_from": _rat(st.gain_from), "payoff_to": _rat(st.gain_to)}
            for st in r.steps
        ],
    }


def dumps(d: dict) -> str:
    return json.dumps(d, sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str) -> dict:
    d = json.loads(text)
    if not isinstance(d, dict) or "type" not in d or d.get("version") != VERSION:
        raise ValueError("unrecognised report")
    return d
