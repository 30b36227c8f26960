"""Process terms over individuals and their transition system on positions."""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import ccs
from .ccs import CcsError, New, Par, Process, Sum
from .diagrams import PlayNet, position
from .plays import FL, FR, NU, TK, Basic, MoveDescriptor, enumerate_full_moves


class TermError(Exception):
    pass


class _Node:
    """Immutable node with a cached hash and cached canonical text."""

    __slots__ = ("_hash", "_text")

    def _fields(self) -> tuple:
        raise NotImplementedError

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return self is other or (type(other) is type(self) and self._hash == other._hash
                                 and self._fields() == other._fields())

    def __setattr__(self, name, value):
        raise AttributeError("immutable")

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self})"

    def __str__(self) -> str:
        if self._text is None:
            object.__setattr__(self, "_text", self._render())
        return self._text

    def _render(self) -> str:
        raise NotImplementedError

    def __reduce__(self):
        return (type(self), self._fields())


@dataclass(frozen=True, order=True)
class Guard:
    kind: str  # "in", "out", "tick", "nu"
    chan: int = 0

    @property
    def basic(self) -> Basic:
        return {"tick": TK, "nu": NU}.get(self.kind) or Basic(self.kind, self.chan)

    def __str__(self) -> str:
        if self.kind == "tick":
            return "tick"
        if self.kind == "nu":
            return "new"
        return f"{self.chan}{'?' if self.kind == 'in' else '!'}"


class GuardedSum(_Node):
    __slots__ = ("branches",)

    def __init__(self, branches: Sequence[Tuple[Guard, "ProcessTerm"]] = ()):
        object.__setattr__(self, "branches", tuple(branches))
        object.__setattr__(self, "_hash", hash(("S", self.branches)))
        object.__setattr__(self, "_text", None)

    def _fields(self):
        return (self.branches,)

    def _render(self) -> str:
        if not self.branches:
            return "0"
        return " + ".join(f"{g}.{_unit(b)}" for g, b in self.branches)


class ForkPair(_Node):
    __slots__ = ("left", "right")

    def __init__(self, left: "ProcessTerm", right: "ProcessTerm"):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "_hash", hash(("F", left, right)))
        object.__setattr__(self, "_text", None)

    def _fields(self):
        return (self.left, self.right)

    def _render(self) -> str:
        return f"({self.left} | {self.right})"


ProcessTerm = Union[GuardedSum, ForkPair]
ZERO = GuardedSum(())


def _unit(t: ProcessTerm) -> str:
    if isinstance(t, GuardedSum) and len(t.branches) > 1:
        return f"({t})"
    return str(t)


def size(t: ProcessTerm) -> int:
    if isinstance(t, ForkPair):
        return 1 + size(t.left) + size(t.right)
    if not t.branches:
        return 1
    return sum(1 + size(b) for _, b in t.branches)


def check_term(t: ProcessTerm, n: int) -> None:
    if isinstance(t, ForkPair):
        check_term(t.left, n)
        check_term(t.right, n)
        return
    for g, b in t.branches:
        if g.kind in ("in", "out") and not 1 <= g.chan <= n:
            raise TermError(f"guard {g} out of range for arity {n}")
        check_term(b, n + 1 if g.kind == "nu" else n)


# ---------------------------------------------------------------- theta


def theta_term(t: ccs.Term) -> ProcessTerm:
    if isinstance(t, Sum):
        return GuardedSum(tuple((Guard(p.kind, p.chan), theta_term(b)) for p, b in t.branches))
    if isinstance(t, Par):
        return ForkPair(theta_term(t.left), theta_term(t.right))
    return GuardedSum(((Guard("nu"), theta_term(t.body)),))


def theta(p: Process) -> ProcessTerm:
    return theta_term(p.body)


def theta_inverse(t: ProcessTerm) -> ccs.Term:
    """Back to CCS; fails on sums mixing a ``new`` guard with anything else."""
    if isinstance(t, ForkPair):
        return Par(theta_inverse(t.left), theta_inverse(t.right))
    kinds = [g.kind for g, _ in t.branches]
    if "nu" in kinds:
        if len(kinds) != 1:
            raise TermError(f"term outside the image of the CCS injection: {t}")
        return New(theta_inverse(t.branches[0][1]))
    return Sum(tuple((ccs.Prefix(g.kind, g.chan), theta_inverse(b)) for g, b in t.branches))


# ---------------------------------------------------------------- text


def parse_term_text(text: str) -> Tuple[int, ProcessTerm]:
    """``arity N; term`` with the CCS grammar plus a ``new`` guard in sums."""
    m = re.match(r"\s*arity\s+(\d+)\s*;", text)
    if not m:
        raise CcsError("line 1, column 1: expected 'arity N;' header")
    n = int(m.group(1))
    tk = ccs._Tokens(" " * m.end() + text[m.end():])
    t = _p_sum(tk, n)
    if tk.peek() != "eof":
        tk.fail(tk.pos(), f"trailing input {tk.peek()!r}")
    return n, t


def _p_sum(tk, n: int) -> ProcessTerm:
    parts = [(tk.pos(), _p_unit(tk, n))]
    while tk.peek() == "+":
        tk.take("+")
        parts.append((tk.pos(), _p_unit(tk, n)))
    if len(parts) == 1:
        return parts[0][1]
    for pos, p in parts:
        if not isinstance(p, GuardedSum):
            tk.fail(pos, "summands must be guarded terms or 0")
    return GuardedSum(tuple(b for _, p in parts for b in p.branches))


def _p_unit(tk, n: int) -> ProcessTerm:
    kind, pos = tk.peek(), tk.pos()
    if kind == "num":
        if tk.take("num")[1] != 0:
            tk.fail(pos, "only 0 may appear as a bare number")
        return ZERO
    if kind in ("in", "out", "tick", "new"):
        val = tk.take(kind)[1]
        if kind in ("in", "out") and not 1 <= val <= n:
            tk.fail(pos, f"channel {val} out of range 1..{n}")
        tk.take(".")
        g = Guard("nu") if kind == "new" else Guard(kind, val or 0)
        return GuardedSum(((g, _p_unit(tk, n + 1 if kind == "new" else n)),))
    if kind == "(":
        tk.take("(")
        first = _p_sum(tk, n)
        if tk.peek() == "|":
            tk.take("|")
            second = _p_sum(tk, n)
            tk.take(")")
            return ForkPair(first, second)
        tk.take(")")
        return first
    tk.fail(pos, f"unexpected {kind!r}")
    raise AssertionError


def term_to_text(n: int, t: ProcessTerm) -> str:
    return f"arity {n}; {t}"


# ---------------------------------------------------------------- states


@dataclass(frozen=True)
class TermState:
    position: PlayNet
    terms: Tuple[ProcessTerm, ...]

    def dump(self) -> str:
        return "".join(f"{p}@{len(s)}: {t}\n" for p, (s, t) in
                       enumerate(zip(self.position.players, self.terms)))


def initial_state(p: Process) -> TermState:
    """Single player knowing every free channel, playing the image of ``p``."""
    return TermState(position(p.gamma, [tuple(range(p.gamma))]), (theta(p),))


LocalMove = Union[str, Basic]  # "fork", "id" or a basic class


def term_local_step(t: ProcessTerm, n: int, m: LocalMove) -> List[Tuple[ProcessTerm, ...]]:
    """Successor families for one player; fork families have two entries."""
    if m == "id":
        return [(t,)]
    if m == "fork":
        return [(t.left, t.right)] if isinstance(t, ForkPair) else []
    if not isinstance(m, Basic) or m.tag in ("fl", "fr"):
        raise TermError(f"not a local full move: {m}")
    if m.tag in ("in", "out") and not 1 <= m.a <= n:
        raise TermError(f"{m} does not fit arity {n}")
    if isinstance(t, ForkPair):
        return []
    return [(b,) for g, b in t.branches if g.basic == m]


def _local_moves(desc: MoveDescriptor) -> Dict[int, LocalMove]:
    if desc.kind == "fork":
        return {desc.players[0]: "fork"}
    if desc.kind == "tau":
        (s, r), (c, a) = desc.players, desc.slots
        return {s: Basic("out", c), r: Basic("in", a)}
    tag = {"tick": TK, "nu": NU}.get(desc.kind)
    return {desc.players[0]: tag or Basic(desc.kind, desc.slots[0])}


def step_family(desc: MoveDescriptor, labels: Sequence, options) -> List[tuple]:
    """Shared successor builder for term and strategy states.

    ``options(p, local_move)`` lists per-player choices, each a dict from
    basic class (FL/FR for forks) to the avatar's new label.
    """
    if desc.kind == "id":
        return [tuple(labels)]
    local = _local_moves(desc)
    if not local:
        # every full move has a non-empty set of basic sub-moves; report if not
        raise TermError(f"move {desc} has no basic sub-moves")
    acting = sorted(local)
    choices = [options(p, local[p]) for p in acting]
    out = []
    for combo in product(*choices):
        pick = dict(zip(acting, combo))
        new = []
        for origin, b in desc.avatars:
            new.append(labels[origin] if b is None else pick[origin][b])
        out.append(tuple(new))
    return out


def term_next(s: TermState) -> List[Tuple[MoveDescriptor, TermState]]:
    x = s.position

    def options(p: int, m: LocalMove):
        fams = term_local_step(s.terms[p], x.arity(p), m)
        if m == "fork":
            return [{FL: a, FR: b} for a, b in fams]
        return [{m: a} for (a,) in fams]

    out = []
    for desc in enumerate_full_moves(x):
        for terms in step_family(desc, s.terms, options):
            out.append((desc, TermState(desc.final_position, terms)))
    return out


# ---------------------------------------------------------------- interfaced


@dataclass(frozen=True)
class Interfaced:
    """A state seen through an interface: ``h[i]`` is the channel of slot i+1."""

    h: Tuple[int, ...]
    state: object


def flatten_state(s: Interfaced) -> Process:
    """The CCS process of an interfaced term state.

    Private channels become leading ``new.`` binders in ascending id order;
    players are composed in id order, nested to the right.
    """
    st: TermState = s.state
    pos = st.position
    k = len(s.h)
    private = [c for c in range(pos.channels) if c not in s.h]
    index = {c: i + 1 for i, c in enumerate(s.h)}
    for j, c in enumerate(private):
        index[c] = k + j + 1
    gamma = k + len(private)
    parts = []
    for slots, t in zip(pos.players, st.terms):
        parts.append(_rename(theta_inverse(t), [index[c] for c in slots], gamma))
    body: ccs.Term = ccs.NIL
    if parts:
        body = parts[-1]
        for p in reversed(parts[:-1]):
            body = Par(p, body)
    for _ in private:
        body = New(body)
    return Process(k, body)


def _rename(t: ccs.Term, sigma: List[int], gamma: int) -> ccs.Term:
    """Rename free channel i to sigma[i-1] inside a context of ``gamma`` channels."""
    if isinstance(t, Sum):
        return Sum(tuple((p if p.kind == "tick" else ccs.Prefix(p.kind, sigma[p.chan - 1]),
                          _rename(b, sigma, gamma)) for p, b in t.branches))
    if isinstance(t, Par):
        return Par(_rename(t.left, sigma, gamma), _rename(t.right, sigma, gamma))
    return New(_rename(t.body, sigma + [gamma + 1], gamma + 1))
