"""Command-line front end.

Exit codes: 0 on success, 1 when a verdict is negative (distinguished,
rejected, disagreement), 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional, Tuple

from .ccs import CcsError, Process, parse_ccs, print_ccs
from .canon import interfaced_graph
from .diagrams import DiagramError, position
from .equiv import fair_eq_ccs, fair_eq_semantic, full_abstraction_report
from .lts import StateCapExceeded, to_dot, to_text
from .plays import (PlayError, causal_dot, causal_graph, check_play, decompose_play, play_dot,
                    play_from_text, play_to_text)
from .strategies import (StratState, StrategyError, parse_strategy, strat_next,
                         strategy_to_text, translate, translate_state)
from .terms import (Interfaced, TermError, TermState, initial_state, parse_term_text,
                    term_next, term_to_text, theta)

KINDS = {".ccs": "ccs", ".term": "term", ".strat": "strat", ".play": "play"}
INPUT_ERRORS = (CcsError, TermError, StrategyError, DiagramError, PlayError, StateCapExceeded,
                OSError, ValueError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def read_input(arg: str) -> Tuple[str, str]:
    """(kind, text) from a file path or inline text."""
    ext = os.path.splitext(arg)[1]
    if ext in KINDS and os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            return KINDS[ext], fh.read()
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = arg
    head = text.lstrip()
    if head.startswith("channels"):
        return "ccs", text
    if head.startswith("final"):
        return "play", text
    if head.startswith("arity"):
        return ("strat" if "<" in text else "term"), text
    raise UsageError(f"cannot tell the input kind of {arg!r}")


def _interfaced(kind: str, text: str, strategies: bool) -> Interfaced:
    """Single-player state over its own channels, all in the interface."""
    if kind == "ccs":
        st = initial_state(parse_ccs(text))
    elif kind == "term":
        n, t = parse_term_text(text)
        st = TermState(position(n, [tuple(range(n))]), (t,))
    elif kind == "strat":
        n, s = parse_strategy(text)
        if len(s.components) != 1:
            raise StrategyError("a state needs exactly one definite strategy")
        if not strategies:
            raise UsageError("strategy input needs --side strategies")
        return Interfaced(tuple(range(n)), StratState(position(n, [tuple(range(n))]),
                                                     s.components))
    else:
        raise UsageError(f"{kind} input does not describe a process")
    iface = tuple(range(st.position.channels))
    return Interfaced(iface, translate_state(st) if strategies else st)


def _show_state(s) -> str:
    if isinstance(s, Process):
        return print_ccs(s)
    st = s.state
    labels = st.terms if isinstance(st, TermState) else st.strats
    parts = [f"[{','.join(str(c) for c in slots)}] {lab}"
             for slots, lab in zip(st.position.players, labels)]
    return " ; ".join(parts) if parts else "empty"


def _lts(args):
    kind, text = read_input(args.input)
    if args.side == "ccs":
        if kind != "ccs":
            raise UsageError("--side ccs needs a CCS process")
        from .ccs import ccs_graph
        return ccs_graph(parse_ccs(text), depth=args.depth)
    if args.side == "terms":
        from .terms import term_next as nxt
        return interfaced_graph(_interfaced(kind, text, False), nxt, depth=args.depth)
    return interfaced_graph(_interfaced(kind, text, True), strat_next, depth=args.depth)


def cmd_parse(args, out) -> int:
    kind, text = read_input(args.input)
    if kind == "ccs":
        out.write(print_ccs(parse_ccs(text)) + "\n")
    elif kind == "term":
        out.write(term_to_text(*parse_term_text(text)) + "\n")
    elif kind == "strat":
        out.write(strategy_to_text(*parse_strategy(text)) + "\n")
    else:
        out.write(play_to_text(play_from_text(text)))
    return 0


def cmd_lts(args, out) -> int:
    out.write(to_text(_lts(args), _show_state))
    return 0


def _read_play(arg: str):
    kind, text = read_input(arg)
    if kind != "play":
        raise UsageError("expected a play")
    return play_from_text(text)


def cmd_check(args, out) -> int:
    v = check_play(_read_play(args.input))
    out.write(("accept" if v.ok else f"reject ({v.condition}): {v.witness}") + "\n")
    return 0 if v.ok else 1


def cmd_decompose(args, out) -> int:
    c = _read_play(args.input)
    v = check_play(c)
    if not v.ok:
        out.write(f"reject ({v.condition}): {v.witness}\n")
        return 1
    moves = decompose_play(c)
    out.write(f"moves {len(moves)}\n")
    for i, m in enumerate(moves):
        out.write(f"move {i}: {m.cls} players={len(m.play.initial.players)}"
                  f" spectators={len(m.spectators)}\n")
    return 0


def cmd_translate(args, out) -> int:
    kind, text = read_input(args.input)
    if kind == "ccs":
        p = parse_ccs(text)
        n, t = p.gamma, theta(p)
    elif kind == "term":
        n, t = parse_term_text(text)
    else:
        raise UsageError("translate needs a CCS process or a process term")
    out.write(strategy_to_text(n, translate(t, n)) + "\n")
    return 0


def _pair(args):
    (k1, t1), (k2, t2) = read_input(args.left), read_input(args.right)
    return k1, t1, k2, t2


def cmd_fair(args, out) -> int:
    k1, t1, k2, t2 = _pair(args)
    if k1 == k2 == "ccs":
        v = fair_eq_ccs(parse_ccs(t1), parse_ccs(t2), args.depth, args.jobs)
    else:
        v = fair_eq_semantic(_interfaced(k1, t1, True), _interfaced(k2, t2, True),
                             args.depth, args.jobs)
    if v.equivalent:
        out.write(f"equivalent-at-depth {v.depth} | tests {v.trees_checked}\n")
        return 0
    out.write(f"distinguished | depth {v.depth} | witness {v.witness} | fails on {v.failing_side}\n")
    return 1


def cmd_abstract(args, out) -> int:
    k1, t1, k2, t2 = _pair(args)
    if not k1 == k2 == "ccs":
        raise UsageError("abstract compares two CCS processes")
    report = full_abstraction_report(parse_ccs(t1), parse_ccs(t2), args.depth, args.jobs)
    out.write(report.to_text())
    if args.figure:
        from .figures import plot_report
        plot_report(report, args.figure)
    return 0 if report.agree else 1


def cmd_render(args, out) -> int:
    if args.what == "lts":
        g = _lts(args)
        out.write(to_dot(g, _show_state))
        if args.figure:
            from .figures import plot_lts
            plot_lts(g, args.figure)
        return 0
    c = _read_play(args.input)
    if args.what == "causal":
        g = causal_graph(c.net)
        out.write(causal_dot(g))
        if args.figure:
            from .figures import plot_causal
            plot_causal(g, args.figure)
    else:
        out.write(play_dot(c))
        if args.figure:
            from .figures import plot_play
            plot_play(c, args.figure)
    return 0


def _depth(text: str) -> int:
    try:
        d = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if d < 0:
        raise argparse.ArgumentTypeError("depth must be >= 0")
    return d


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ccspg", description="Plays, strategies and fair testing for finite CCS.")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for test pools")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("parse", help="parse and print canonically")
    s.add_argument("input")
    s.set_defaults(fn=cmd_parse)

    s = sub.add_parser("lts", help="explore a transition system")
    s.add_argument("--side", choices=["ccs", "terms", "strategies"], default="ccs")
    s.add_argument("--depth", type=_depth)
    s.add_argument("input")
    s.set_defaults(fn=cmd_lts)

    s = sub.add_parser("check-play", help="run the correctness criterion")
    s.add_argument("input")
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("decompose", help="split a play into moves")
    s.add_argument("input")
    s.set_defaults(fn=cmd_decompose)

    s = sub.add_parser("translate", help="process to definite strategy")
    s.add_argument("input")
    s.set_defaults(fn=cmd_translate)

    for name, fn, help_ in (("fair", cmd_fair, "fair-testing equivalence"),
                            ("abstract", cmd_abstract, "compare CCS and semantic testing")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--depth", type=_depth)
        s.add_argument("left")
        s.add_argument("right")
        if name == "abstract":
            s.add_argument("--figure", help="write a pass/fail grid image")
        s.set_defaults(fn=fn)

    s = sub.add_parser("render", help="DOT output, optionally an image")
    s.add_argument("--what", choices=["causal", "play", "lts"], default="play")
    s.add_argument("--side", choices=["ccs", "terms", "strategies"], default="ccs")
    s.add_argument("--depth", type=_depth)
    s.add_argument("--figure", help="also write a matplotlib rendering here")
    s.add_argument("input")
    s.set_defaults(fn=cmd_render)
    return p


def run(argv: List[str], out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        return args.fn(args, out)
    except UsageError as e:
        err.write(f"usage error: {e}\n")
        return 2
    except INPUT_ERRORS as e:
        msg = str(e).splitlines()[0] if str(e) else type(e).__name__
        err.write(f"error: {msg}\n")
        return 2


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
