"""Strategy terms: definite layers ``<b: S, ...>`` and sums ``S (+) S``."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from .diagrams import Embedding, PlayNet, pushout
from .lts import ID, TICK, explore, bot_sigma
from .plays import FL, FR, NU, TK, Basic, MoveDescriptor, basic_classes, classify_move, enumerate_full_moves
from .terms import (ForkPair, GuardedSum, Interfaced, LocalMove, ProcessTerm, TermState, term_next,
                    _Node, step_family)


class StrategyError(Exception):
    pass


class Definite(_Node):
    """Total map from the basic classes of arity ``n`` to sums; empty sums omitted."""

    __slots__ = ("arity", "branches")

    def __init__(self, arity: int, branches: Dict[Basic, "Oplus"] | Sequence = ()):
        items = branches.items() if isinstance(branches, dict) else branches
        kept = tuple(sorted(((b, s) for b, s in items if s.components),
                            key=lambda bs: _order(bs[0])))
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "branches", kept)
        object.__setattr__(self, "_hash", hash(("D", arity, kept)))
        object.__setattr__(self, "_text", None)

    def _fields(self):
        return (self.arity, self.branches)

    def get(self, b: Basic) -> "Oplus":
        for c, s in self.branches:
            if c == b:
                return s
        return EMPTY

    def _render(self) -> str:
        return "<" + ", ".join(f"{b}: {s}" for b, s in self.branches) + ">"


class Oplus(_Node):
    __slots__ = ("components",)

    def __init__(self, components: Sequence[Definite] = ()):
        object.__setattr__(self, "components", tuple(components))
        object.__setattr__(self, "_hash", hash(("O", self.components)))
        object.__setattr__(self, "_text", None)

    def _fields(self):
        return (self.components,)

    def _render(self) -> str:
        if not self.components:
            return "0"
        return " (+) ".join(str(d) for d in self.components)


EMPTY = Oplus(())


def _order(b: Basic) -> tuple:
    return ({"fl": 0, "fr": 1, "tk": 2, "nu": 3, "in": 4, "out": 5}[b.tag], b.a)


def child_arity(n: int, b: Basic) -> int:
    return n + 1 if b.tag == "nu" else n


# ---------------------------------------------------------------- translation


@lru_cache(maxsize=None)
def translate(t: ProcessTerm, n: int) -> Definite:
    """Definite strategy of a process term over arity ``n``."""
    if isinstance(t, ForkPair):
        return Definite(n, {FL: Oplus((translate(t.left, n),)),
                            FR: Oplus((translate(t.right, n),))})
    table: Dict[Basic, List[Definite]] = {}
    for g, body in t.branches:
        b = g.basic
        table.setdefault(b, []).append(translate(body, child_arity(n, b)))
    return Definite(n, {b: Oplus(ds) for b, ds in table.items()})


def residual(s: Oplus, b: Basic) -> Oplus:
    return Oplus(tuple(d for comp in s.components for d in comp.get(b).components))


def unfold(s: Oplus) -> Tuple[int, Dict[Tuple[int, Basic], Oplus]]:
    table = {}
    for i, d in enumerate(s.components):
        for b in basic_classes(d.arity):
            table[(i, b)] = d.get(b)
    return len(s.components), table


def fold(n: int, m: int, table: Dict[Tuple[int, Basic], Oplus]) -> Oplus:
    comps = []
    for i in range(m):
        comps.append(Definite(n, {b: table.get((i, b), EMPTY) for b in basic_classes(n)}))
    return Oplus(comps)


# ---------------------------------------------------------------- text


_STOK = re.compile(r"\s*(\(\+\)|<|>|,|:|0|fl|fr|tk|nu|in\(\d+\)|out\(\d+\))")


def parse_strategy(text: str) -> Tuple[int, Oplus]:
    """``arity N; S`` where S is a sum of definite layers."""
    m = re.match(r"\s*arity\s+(\d+)\s*;", text)
    if not m:
        raise StrategyError("expected 'arity N;' header")
    n = int(m.group(1))
    toks: List[Tuple[str, int]] = []
    pos = m.end()
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        t = _STOK.match(text, pos)
        if not t:
            raise StrategyError(f"column {pos + 1}: unexpected character {text[pos]!r}")
        toks.append((t.group(1), pos))
        pos = t.end()
    toks.append(("eof", len(text)))
    i = 0

    def peek() -> str:
        return toks[i][0]

    def take(want: str = None) -> str:
        nonlocal i
        tok, at = toks[i]
        if want is not None and tok != want:
            raise StrategyError(f"column {at + 1}: expected {want!r}, found {tok!r}")
        i += 1
        return tok

    def p_sum(arity: int) -> Oplus:
        if peek() == "0":
            take()
            return EMPTY
        comps = [p_def(arity)]
        while peek() == "(+)":
            take()
            comps.append(p_def(arity))
        return Oplus(comps)

    def p_def(arity: int) -> Definite:
        take("<")
        table: Dict[Basic, Oplus] = {}
        while peek() != ">":
            if table:
                take(",")
            at = toks[i][1]
            name = take()
            b = _basic_from_name(name, at)
            if b.tag in ("in", "out") and not 1 <= b.a <= arity:
                raise StrategyError(f"column {at + 1}: {name} out of range for arity {arity}")
            if b in table:
                raise StrategyError(f"column {at + 1}: duplicate branch {name}")
            take(":")
            table[b] = p_sum(child_arity(arity, b))
        take(">")
        return Definite(arity, table)

    s = p_sum(n)
    take("eof")
    return n, s


def _basic_from_name(name: str, at: int) -> Basic:
    simple = {"fl": FL, "fr": FR, "tk": TK, "nu": NU}
    if name in simple:
        return simple[name]
    m = re.fullmatch(r"(in|out)\((\d+)\)", name)
    if not m:
        raise StrategyError(f"column {at + 1}: expected a basic class, found {name!r}")
    return Basic(m.group(1), int(m.group(2)))


def strategy_to_text(n: int, s: Oplus) -> str:
    return f"arity {n}; {s}"


# ---------------------------------------------------------------- states


@dataclass(frozen=True)
class StratState:
    position: PlayNet
    strats: Tuple[Definite, ...]

    def dump(self) -> str:
        return "".join(f"{p}@{len(s)}: {d}\n" for p, (s, d) in
                       enumerate(zip(self.position.players, self.strats)))


def translate_state(s: TermState) -> StratState:
    return StratState(s.position, tuple(translate(t, len(slots))
                                        for slots, t in zip(s.position.players, s.terms)))


def strat_next(s: StratState) -> List[Tuple[MoveDescriptor, StratState]]:
    def options(p: int, m: LocalMove):
        d = s.strats[p]
        if m == "fork":
            return [{FL: a, FR: b} for a in d.get(FL).components for b in d.get(FR).components]
        return [{m: a} for a in d.get(m).components]

    out = []
    for desc in enumerate_full_moves(s.position):
        for strats in step_family(desc, s.strats, options):
            out.append((desc, StratState(desc.final_position, strats)))
    return out


def amalgamate(a: Interfaced, b: Interfaced) -> StratState:
    """Glue two states along their common interface."""
    if len(a.h) != len(b.h):
        raise StrategyError("interface mismatch")
    iface = PlayNet(len(a.h))
    sa, sb = a.state, b.state
    ea = Embedding(iface, sa.position, tuple(a.h), (), ())
    eb = Embedding(iface, sb.position, tuple(b.h), (), ())
    d, ja, jb = pushout(ea, eb)
    labels: List = [None] * len(d.players)
    for i, p in enumerate(ja.players):
        labels[p] = sa.strats[i]
    for i, p in enumerate(jb.players):
        labels[p] = sb.strats[i]
    return StratState(d, tuple(labels))


def closed_world_succ(next_fn):
    """Successor function over canonical states, tick/silent labels only."""
    from .canon import canonical_state

    def succ(s):
        out = []
        for desc, t in next_fn(s):
            cls = classify_move(desc)
            if cls.closed_world:
                out.append((TICK if cls.sigma_label == "tick" else ID, canonical_state(t)))
        return out

    return succ


def is_bot_strat(s: StratState, cap=None) -> bool:
    from .canon import canonical_state

    g = explore(canonical_state(s), closed_world_succ(strat_next), cap)
    return bot_sigma(g, 0)


def semantic_passes(s: Interfaced, t: Interfaced, cap=None) -> bool:
    return is_bot_strat(amalgamate(s, t), cap)


def translation_mismatches(root: TermState, cap=None) -> List[Tuple[TermState, MoveDescriptor]]:
    """States and move labels where translating a term step differs from the strategy step.

    Translation is functional, so it is a strong bisimulation exactly when,
    for every reachable state and label, the translated term successors
    coincide with the strategy successors of the translated state.
    """
    from .canon import canonical_state

    bad = []

    def succ(s: TermState):
        by_label: Dict[str, set] = {}
        for desc, t in term_next(s):
            by_label.setdefault(str(desc), set()).add(translate_state(t))
        got: Dict[str, set] = {}
        descs = {}
        for desc, t in strat_next(translate_state(s)):
            got.setdefault(str(desc), set()).add(t)
            descs[str(desc)] = desc
        for lab in set(by_label) | set(got):
            if by_label.get(lab, set()) != got.get(lab, set()):
                bad.append((s, descs.get(lab, lab)))
        return [(ID, canonical_state(t)) for _, t in term_next(s)]

    explore(canonical_state(root), succ, cap)
    return bad
