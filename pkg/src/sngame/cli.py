"""Command line entry point: ``sngame <command> ...``.

Exit codes: 0 when the property holds / an equilibrium exists, 1 when it
fails / none exists, 2 on usage, input or budget errors.
"""
from __future__ import annotations

import argparse
import random
import sys

from . import reports
from .dynamics import (
    Outcome,
    has_fbrp,
    has_fip,
    has_uniform_fip,
    is_weakly_acyclic,
    make_scheduler,
    simulate,
)
from .equilibria import GraphClassError, NoEquilibrium, find_ne, poa_pos
from .gadgets import GADGETS
from .game import format_state, parse_state
from .network import ParseError, classify, format_rational, parse, parse_rational, serialize, validate
from .polymatrix import check_equivalence, export_polymatrix, to_polymatrix
from .space import BudgetExceeded

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(path: str):
    net = parse(_read(path))
    problems = validate(net)
    # payoffs stay well defined when in-weights exceed 1, so only warn
    soft = [d for d in problems if d.code == "in-weight-exceeds-1"]
    hard = [d for d in problems if d.code != "in-weight-exceeds-1"]
    if hard:
        raise UsageError("invalid network:\n" + "\n".join(f"  {d}" for d in hard))
    for d in soft:
        print(f"sngame: warning: {d}", file=sys.stderr)
    return net


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _state_text(s) -> str:
    return "none" if s is None else format_state(s)


def _ratio_text(x) -> str:
    if x is None:
        return "undefined"
    if isinstance(x, float):
        return "inf"
    return format_rational(x)


# --- commands ----------------------------------------------------------------


def cmd_validate(args) -> int:
    net = parse(_read(args.path))
    problems = validate(net)
    if args.format == "machine":
        d = {"type": "validation", "version": reports.VERSION, "valid": not problems,
             "diagnostics": [{"code": p.code, "message": p.message, "node": p.node,
                              "edge": None if p.edge is None else list(p.edge)} for p in problems],
             "graph_class": sorted(classify(net).labels)}
        _emit(args, reports.dumps(d))
    else:
        lines = [f"{p}" for p in problems] or ["valid"]
        lines.append("class " + ",".join(sorted(classify(net).labels)))
        _emit(args, "\n".join(lines) + "\n")
    return FAIL if problems else OK


def cmd_ne(args) -> int:
    net = _load(args.path)
    try:
        rep = find_ne(net, args.kind, args.method, budget=args.budget)
    except GraphClassError as e:
        raise UsageError(str(e)) from None
    found = rep.exists[args.kind]
    if args.format == "machine":
        _emit(args, reports.dumps(reports.ne_report(rep)))
    else:
        lines = [f"method {rep.method}", f"kind {args.kind}"]
        if found:
            lines.append("exists")
            lines.append(_state_text(rep.witnesses.get(args.kind)))
        else:
            lines.append("none")
        if rep.states is not None:
            lines.append(f"states {rep.states}")
        _emit(args, "\n".join(lines) + "\n")
    return OK if found else FAIL


CHECKS = {"fip": has_fip, "fbrp": has_fbrp, "ufip": has_uniform_fip, "weak": is_weakly_acyclic}


def cmd_dynamics(args) -> int:
    net = _load(args.path)
    v = CHECKS[args.check](net, budget=args.budget)
    if args.format == "machine":
        _emit(args, reports.dumps(reports.verdict_report(v)))
    else:
        lines = [f"{v.property} {'holds' if v.holds else 'fails'}", f"states {v.states} edges {v.edges}"]
        if v.cycle:
            lines.append(f"cycle of {len(v.cycle) - 1} steps:")
            lines += [f"  {format_state(s)}" for s in v.cycle]
        if v.bad_state is not None:
            lines.append(f"bad {format_state(v.bad_state)}")
        _emit(args, "\n".join(lines) + "\n")
    return OK if v.holds else FAIL


def cmd_simulate(args) -> int:
    net = _load(args.path)
    if args.start and args.random:
        raise UsageError("give --start or --random, not both")
    if args.start:
        start = parse_state(net, args.start)
    else:
        rng = random.Random(args.seed)
        start = tuple(rng.choice(net.strategies(i)) for i in range(net.n))
    sched = make_scheduler(args.scheduler, args.seed)
    res = simulate(net, start, sched, args.rule, args.max_steps)
    if args.format == "machine":
        _emit(args, reports.dumps(reports.simulation_report(res)))
    else:
        _emit(args, res.trace() + "\n")
    return OK if res.outcome is Outcome.REACHED_NE else FAIL


def cmd_polymatrix(args) -> int:
    net = _load(args.path)
    g = to_polymatrix(net)
    text = export_polymatrix(g)
    code = OK
    if args.verify:
        res = check_equivalence(net, g, samples=args.samples, seed=args.seed, budget=args.budget)
        mode = "exhaustive" if res.exhaustive else "sampled"
        text += f"# equivalence {'ok' if res.ok else 'FAILED'} ({mode}, {res.checked} states)\n"
        if not res.ok:
            s, i, a, b = res.counterexample
            text += f"# counterexample {format_state(s)} player {i}: {a} vs {b}\n"
            code = FAIL
    _emit(args, text)
    return code


def cmd_metrics(args) -> int:
    net = _load(args.path)
    try:
        p = poa_pos(net, budget=args.budget)
    except NoEquilibrium:
        _emit(args, "no NE\n" if args.format == "text" else reports.dumps(
            {"type": "price-report", "version": reports.VERSION, "error": "no NE"}))
        return FAIL
    if args.format == "machine":
        _emit(args, reports.dumps(reports.price_report(p)))
    else:
        lines = [
            f"optimum {format_rational(p.optimum)} at {format_state(p.optimum_state)}",
            f"worst NE {format_rational(p.worst_ne)} at {format_state(p.worst_state)}",
            f"best NE {format_rational(p.best_ne)} at {format_state(p.best_state)}",
            f"equilibria {p.ne_count}",
            f"PoA {_ratio_text(p.poa)}",
            f"PoS {_ratio_text(p.pos)}",
        ]
        _emit(args, "\n".join(lines) + "\n")
    return OK


def cmd_gen(args) -> int:
    fn, names = GADGETS[args.gadget]
    kw = {}
    for name in names:
        raw = getattr(args, name, None)
        if raw is None:
            continue
        if name == "a":
            kw["inst"] = tuple(parse_rational(x) for x in raw.split(","))
        elif name == "n":
            kw["n"] = int(raw)
        elif name == "kind":
            kw["kind"] = raw
        else:
            kw[name] = parse_rational(raw)
    if "a" in names and "inst" not in kw:
        raise UsageError(f"{args.gadget} needs --a")
    try:
        net = fn(**kw)
    except (TypeError, ValueError) as e:  # TypeError: a required parameter is missing
        raise UsageError(str(e)) from None
    _emit(args, serialize(net))
    return OK


# --- parser --------------------------------------------------------------------


def _budget(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("budget must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "machine"), default="text")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--budget", type=_budget, default=None,
                        help="maximum number of joint strategies (default SNGAME_BUDGET or 2^24)")

    p = argparse.ArgumentParser(prog="sngame", description="Social network game analysis.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check network invariants")
    s.add_argument("path")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("ne", parents=[common], help="Nash equilibrium existence")
    s.add_argument("path")
    s.add_argument("--kind", choices=("any", "nontrivial", "determined"), default="any")
    s.add_argument("--method", choices=("auto", "brute", "cycle", "sourcefree", "two-product", "dag"),
                   default="auto")
    s.set_defaults(func=cmd_ne)

    s = sub.add_parser("dynamics", parents=[common], help="FIP, FBRP, uniform FIP, weak acyclicity")
    s.add_argument("path")
    s.add_argument("--check", choices=sorted(CHECKS), required=True)
    s.set_defaults(func=cmd_dynamics)

    s = sub.add_parser("simulate", parents=[common], help="follow an improvement path")
    s.add_argument("path")
    s.add_argument("--start", help="e.g. 'state 0=t1 1=_'")
    s.add_argument("--random", action="store_true", help="random start (uses --seed)")
    s.add_argument("--scheduler", default="ordered",
                   help="ordered[:i,j,..], first-negative[:i,j,..], round-robin, random")
    s.add_argument("--rule", choices=("best", "better"), default="best")
    s.add_argument("--max-steps", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("polymatrix", parents=[common], help="export the polymatrix form")
    s.add_argument("path")
    s.add_argument("--verify", action="store_true")
    s.add_argument("--samples", type=int, default=None, help="sample this many states instead of all")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_polymatrix)

    s = sub.add_parser("gen", parents=[common], help="emit a gadget network")
    s.add_argument("gadget", choices=sorted(GADGETS))
    for name in sorted({n for _, names in GADGETS.values() for n in names}):
        s.add_argument(f"--{name}", help="rational; --a takes a comma list, --n an int" if name == "a" else None)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("metrics", parents=[common], help="price of anarchy and stability")
    s.add_argument("path")
    s.set_defaults(func=cmd_metrics)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParseError, BudgetExceeded, OverflowError, OSError, ValueError) as e:
        print(f"sngame: error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
