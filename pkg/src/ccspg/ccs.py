"""Finite CCS with de Bruijn channel indices.

A process lives over ``gamma`` channels numbered ``1..gamma``.  Under a
``new.`` binder the fresh channel is ``gamma + 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Tuple, Union

from .lts import ALabel, Graph, ID, TICK, bot_sigma, explore


class CcsError(Exception):
    """Syntax or scoping error; carries line/column when parsing."""


@dataclass(frozen=True)
class Prefix:
    kind: str  # "in", "out" or "tick"
    chan: int = 0

    def label(self) -> ALabel:
        return ALabel(self.kind, self.chan)

    def __str__(self) -> str:
        if self.kind == "tick":
            return "tick"
        return f"{self.chan}{'?' if self.kind == 'in' else '!'}"


@dataclass(frozen=True)
class Sum:
    branches: Tuple[Tuple[Prefix, "Term"], ...] = ()


@dataclass(frozen=True)
class Par:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class New:
    body: "Term"


Term = Union[Sum, Par, New]
NIL = Sum(())


@dataclass(frozen=True)
class Process:
    gamma: int
    body: Term

    def __str__(self) -> str:
        return print_ccs(self)


def term_size(t: Term) -> int:
    """Nil counts 1, each prefix, ``|`` and ``new`` counts 1."""
    if isinstance(t, Sum):
        if not t.branches:
            return 1
        return sum(1 + term_size(b) for _, b in t.branches)
    if isinstance(t, Par):
        return 1 + term_size(t.left) + term_size(t.right)
    return 1 + term_size(t.body)


def check_scope(t: Term, gamma: int) -> None:
    if isinstance(t, Sum):
        for pre, body in t.branches:
            if pre.kind != "tick" and not 1 <= pre.chan <= gamma:
                raise CcsError(f"channel {pre.chan} out of range 1..{gamma}")
            check_scope(body, gamma)
    elif isinstance(t, Par):
        check_scope(t.left, gamma)
        check_scope(t.right, gamma)
    else:
        check_scope(t.body, gamma + 1)


# ---------------------------------------------------------------- printing


def _unit(t: Term) -> str:
    s = term_to_text(t)
    if isinstance(t, Sum) and len(t.branches) > 1:
        return f"({s})"
    return s


def term_to_text(t: Term) -> str:
    if isinstance(t, Sum):
        if not t.branches:
            return "0"
        return " + ".join(f"{p}.{_unit(b)}" for p, b in t.branches)
    if isinstance(t, Par):
        return f"({term_to_text(t.left)} | {term_to_text(t.right)})"
    return f"new.{_unit(t.body)}"


def print_ccs(p: Process) -> str:
    return f"channels {p.gamma}; {term_to_text(p.body)}"


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(\d+)([?!])|(tick|new|channels)\b|(\d+)|([().;|+]))")


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.toks: List[Tuple[str, object, int]] = []
        pos = 0
        while True:
            m = re.compile(r"\s*").match(text, pos)
            pos = m.end()
            if pos >= len(text):
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                self.fail(pos, "unexpected character")
            start = m.start(0) + len(m.group(0)) - len(m.group(0).lstrip())
            if m.group(1):
                kind = "in" if m.group(2) == "?" else "out"
                self.toks.append((kind, int(m.group(1)), start))
            elif m.group(3):
                self.toks.append((m.group(3), None, start))
            elif m.group(4):
                self.toks.append(("num", int(m.group(4)), start))
            else:
                self.toks.append((m.group(5), None, start))
            pos = m.end()
        self.i = 0

    def where(self, pos: int) -> str:
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return f"line {line}, column {col}"

    def fail(self, pos: int, msg: str):
        raise CcsError(f"{self.where(pos)}: {msg}")

    def peek(self) -> str:
        return self.toks[self.i][0] if self.i < len(self.toks) else "eof"

    def pos(self) -> int:
        return self.toks[self.i][2] if self.i < len(self.toks) else len(self.text)

    def take(self, kind: str):
        if self.peek() != kind:
            self.fail(self.pos(), f"expected {kind!r}, found {self.peek()!r}")
        tok = self.toks[self.i]
        self.i += 1
        return tok


def _parse_sum(tk: _Tokens, gamma: int) -> Term:
    first_pos = tk.pos()
    parts = [_parse_unit(tk, gamma)]
    while tk.peek() == "+":
        tk.take("+")
        pos = tk.pos()
        parts.append(_parse_unit(tk, gamma))
        if not isinstance(parts[-1], Sum):
            tk.fail(pos, "summands must be prefixed terms or 0")
    if len(parts) == 1:
        return parts[0]
    if not isinstance(parts[0], Sum):
        tk.fail(first_pos, "summands must be prefixed terms or 0")
    return Sum(tuple(b for p in parts for b in p.branches))


def _parse_unit(tk: _Tokens, gamma: int) -> Term:
    kind = tk.peek()
    pos = tk.pos()
    if kind == "num":
        _, val, _ = tk.take("num")
        if val != 0:
            tk.fail(pos, "only 0 may appear as a bare number")
        return NIL
    if kind in ("in", "out", "tick"):
        _, val, _ = tk.take(kind)
        if kind != "tick" and not 1 <= val <= gamma:
            tk.fail(pos, f"channel {val} out of range 1..{gamma}")
        tk.take(".")
        body = _parse_unit(tk, gamma)
        return Sum(((Prefix(kind, val or 0), body),))
    if kind == "new":
        tk.take("new")
        tk.take(".")
        return New(_parse_unit(tk, gamma + 1))
    if kind == "(":
        tk.take("(")
        parts = [_parse_sum(tk, gamma)]
        while tk.peek() == "|":
            tk.take("|")
            parts.append(_parse_sum(tk, gamma))
        tk.take(")")
        acc = parts[0]
        for p in parts[1:]:
            acc = Par(acc, p)
        return acc
    tk.fail(pos, f"unexpected {kind!r}")
    raise AssertionError


def parse_term(text: str, gamma: int) -> Term:
    tk = _Tokens(text)
    t = _parse_sum(tk, gamma)
    if tk.peek() != "eof":
        tk.fail(tk.pos(), f"trailing input {tk.peek()!r}")
    return t


def parse_ccs(text: str) -> Process:
    tk = _Tokens(text)
    tk.take("channels")
    pos = tk.pos()
    _, gamma, _ = tk.take("num")
    tk.take(";")
    t = _parse_sum(tk, gamma)
    if tk.peek() != "eof":
        tk.fail(tk.pos(), f"trailing input {tk.peek()!r}")
    return Process(gamma, t)


# ---------------------------------------------------------------- semantics


def _steps(t: Term, gamma: int) -> List[Tuple[ALabel, Term]]:
    """Non-reflexive transitions of ``t`` over ``gamma`` channels."""
    if isinstance(t, Sum):
        return [(p.label(), b) for p, b in t.branches]
    if isinstance(t, Par):
        ls = _steps(t.left, gamma)
        rs = _steps(t.right, gamma)
        out = [(a, Par(l2, t.right)) for a, l2 in ls]
        out += [(a, Par(t.left, r2)) for a, r2 in rs]
        for a, l2 in ls:
            if a.kind in ("in", "out"):
                for b, r2 in rs:
                    if b == a.complement():
                        out.append((ID, Par(l2, r2)))
        return out
    bound = gamma + 1
    return [(a, New(b)) for a, b in _steps(t.body, bound)
            if not (a.kind in ("in", "out") and a.chan == bound)]


def ccs_next(p: Process) -> List[Tuple[ALabel, Process]]:
    """All transitions, starting with the identity self-loop."""
    out = [(ID, p)]
    out += [(a, Process(p.gamma, t)) for a, t in _steps(p.body, p.gamma)]
    return out


def ccs_graph(p: Process, cap=None, depth=None) -> Graph:
    return explore(p, ccs_next, cap, depth)


def is_bot_ccs(p: Process, cap=None) -> bool:
    def succ(q: Process):
        return [(a, r) for a, r in ccs_next(q) if a.kind in ("id", "tick")]

    return bot_sigma(explore(p, succ, cap), 0)


def passes_ccs(p: Process, test: Process, cap=None) -> bool:
    if p.gamma != test.gamma:
        raise CcsError(f"channel counts differ: {p.gamma} vs {test.gamma}")
    return is_bot_ccs(Process(p.gamma, Par(p.body, test.body)), cap)
