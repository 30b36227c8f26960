"""Failures, test trees and fair-testing equivalence on both sides.

Test pools are built from the failures of the two compared systems.  Each
failure ``(rho, L)`` yields the tree ``fl(co-rho, co-L)``; in addition, for
every state reached by ``rho`` the words it cannot perform (among those
performed by some other state reached by ``rho``) are offered, each followed
by a tick.  The second family makes the pool decide fair testing for the
acyclic systems in scope; the first keeps the plain construction available.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from . import ccs
from .ccs import CcsError, Process
from .lts import (ALabel, Graph, TICK, bot_sigma, longest_loud_path, saturate,
                  strong_bisim_check, weak_bisim_check, _silent_closure)
from .terms import Interfaced, initial_state, term_next, theta
from .strategies import StratState, semantic_passes, strat_next, translate, translate_state
from .canon import interfaced_graph
from .diagrams import position

__all__ = [
    "bot_sigma", "strong_bisim_check", "weak_bisim_check", "Failure", "ATree", "failures_of",
    "fl", "atree_as_process", "Verdict", "fair_eq_ccs", "fair_eq_semantic",
    "full_abstraction_report", "default_depth", "test_pool",
]

Word = Tuple[ALabel, ...]


@dataclass(frozen=True)
class Failure:
    rho: Word
    L: FrozenSet[Word]


def _word(w: Word) -> str:
    return "(" + ",".join(str(a) for a in w) + ")"


@dataclass(frozen=True)
class ATree:
    children: Tuple[Tuple[ALabel, "ATree"], ...] = ()

    def __str__(self) -> str:
        if not self.children:
            return "0"
        parts = []
        for a, t in self.children:
            sub = str(t)
            if len(t.children) > 1:
                sub = f"({sub})"
            parts.append(f"{a}.{sub}")
        return " + ".join(parts)

    def size(self) -> int:
        return 1 + sum(t.size() for _, t in self.children)

    def labels(self) -> Set[ALabel]:
        out = set()
        for a, t in self.children:
            out.add(a)
            out |= t.labels()
        return out


ZERO_TREE = ATree(())


# ---------------------------------------------------------------- failures


class _Words:
    """Weak loud-word structure of a graph."""

    def __init__(self, g: Graph):
        self.g = g
        self.clo = _silent_closure(g)
        self.memo: Dict[Tuple[FrozenSet[int], int], FrozenSet[Word]] = {}

    def close(self, states: Iterable[int]) -> FrozenSet[int]:
        out: Set[int] = set()
        for s in states:
            out |= self.clo[s]
        return frozenset(out)

    def post(self, states: FrozenSet[int]) -> Dict[ALabel, FrozenSet[int]]:
        nxt: Dict[ALabel, Set[int]] = {}
        for s in states:
            for lab, t in self.g.edges[s]:
                if not lab.silent:
                    nxt.setdefault(lab, set()).update(self.clo[t])
        return {lab: frozenset(v) for lab, v in nxt.items()}

    def maximal(self, states: FrozenSet[int], depth: int) -> FrozenSet[Word]:
        """Maximal loud words (cut after a tick or at ``depth``)."""
        key = (states, depth)
        if key not in self.memo:
            nxt = self.post(states) if depth > 0 else {}
            if not nxt:
                res = frozenset({()})
            else:
                acc = set()
                for lab in sorted(nxt):
                    if lab == TICK:
                        acc.add((lab,))
                    else:
                        acc |= {(lab,) + w for w in self.maximal(nxt[lab], depth - 1)}
                res = frozenset(acc)
            self.memo[key] = res
        return self.memo[key]


def failures_of(g: Graph, v: int = 0, depth: int = 4) -> Set[Failure]:
    """Pairs (loud tick-free path, maximal loud continuations of one reached state)."""
    w = _Words(g)
    out: Set[Failure] = set()
    frontier = [((), w.close([v]))]
    while frontier:
        rho, states = frontier.pop()
        for s in sorted(states):
            out.add(Failure(rho, w.maximal(frozenset(w.clo[s]), depth)))
        if len(rho) < depth:
            for lab, nxt in sorted(w.post(states).items()):
                if lab != TICK:
                    frontier.append((rho + (lab,), nxt))
    return out


def fl(f: Failure) -> ATree:
    """Test tree of a failure: follow rho with a tick escape at each step, then L."""
    return _fl_path(f.rho, frozenset(f.L))


def _fl_path(rho: Word, L: FrozenSet[Word]) -> ATree:
    if not rho:
        return _fl_set(L)
    return ATree(((rho[0], _fl_path(rho[1:], L)), (TICK, ZERO_TREE)))


def _fl_set(L: FrozenSet[Word]) -> ATree:
    heads = sorted({w[0] for w in L if w})
    return ATree(tuple((e, _fl_set(frozenset(w[1:] for w in L if w and w[0] == e)))
                       for e in heads))


def complement_word(w: Word) -> Word:
    return tuple(a.complement() for a in w)


def atree_as_process(t: ATree, gamma: int) -> Process:
    return Process(gamma, _tree_term(t, gamma))


def _tree_term(t: ATree, gamma: int) -> ccs.Term:
    branches = []
    for a, sub in t.children:
        if a.kind == "id":
            raise CcsError("test trees have no silent edges")
        if a.kind != "tick" and not 1 <= a.chan <= gamma:
            raise CcsError(f"label {a} out of range 1..{gamma}")
        branches.append((ccs.Prefix(a.kind, a.chan), _tree_term(sub, gamma)))
    return ccs.Sum(tuple(branches))


def tree_graph(t: ATree) -> Graph:
    """Graph of a tree (vertex 0 is the root)."""
    states: List[ATree] = []
    edges: List[List[Tuple[ALabel, int]]] = []

    def add(node: ATree) -> int:
        i = len(states)
        states.append(node)
        edges.append([])
        for a, sub in node.children:
            edges[i].append((a, add(sub)))
        return i

    add(t)
    return Graph(states, edges)


# ---------------------------------------------------------------- pools


def _prefixes(words: Iterable[Word]) -> Set[Word]:
    out = set()
    for w in words:
        for i in range(1, len(w) + 1):
            out.add(w[:i])
    return out


def test_pool(failures: Iterable[Failure]) -> List[ATree]:
    """Complemented test trees from failures, in canonical order."""
    fails = sorted(set(failures), key=lambda f: (len(f.rho), f.rho, sorted(f.L)))
    trees: Set[ATree] = set()
    by_rho: Dict[Word, List[Failure]] = {}
    for f in fails:
        trees.add(fl(Failure(complement_word(f.rho),
                             frozenset(complement_word(w) for w in f.L))))
        by_rho.setdefault(f.rho, []).append(f)
    for rho, group in by_rho.items():
        universe = _prefixes(w for f in group for w in f.L)
        for f in group:
            done = _prefixes(f.L)
            refused = set()
            for w in universe:
                if w in done:
                    continue
                if any(w[:i] + (TICK,) in done for i in range(len(w))):
                    continue
                refused.add(w)
            words = set()
            for w in refused:
                if w[-1] == TICK:
                    words.add(complement_word(w[:-1]))
                else:
                    words.add(complement_word(w) + (TICK,))
            trees.add(_fl_path(complement_word(rho), frozenset(words)))
    return sorted(trees, key=lambda t: (t.size(), str(t)))


def default_depth(*graphs: Graph) -> int:
    return max(longest_loud_path(g) for g in graphs) + 1


# ---------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class Verdict:
    equivalent: bool
    depth: int
    witness: Optional[ATree] = None
    failing_side: Optional[str] = None  # "left" or "right"
    trees_checked: int = 0

    def __str__(self) -> str:
        if self.equivalent:
            return f"equivalent-at-depth {self.depth} ({self.trees_checked} tests)"
        return f"distinguished by {self.witness} (fails on the {self.failing_side})"


def _run_pool(pool: Sequence[ATree], check: Callable[[ATree], Tuple[bool, bool]],
              depth: int, jobs: int = 1, stop: bool = True):
    rows = []
    verdict = None
    results = _map(check, pool, jobs) if (jobs > 1 and not stop) else None
    for i, t in enumerate(pool):
        a, b = results[i] if results is not None else check(t)
        rows.append((t, a, b))
        if a != b and verdict is None:
            verdict = Verdict(False, depth, t, "left" if not a else "right", i + 1)
            if stop:
                break
    if verdict is None:
        verdict = Verdict(True, depth, trees_checked=len(pool))
    return verdict, rows


def _map(fn, items, jobs):
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


class _CcsCheck:
    def __init__(self, p: Process, q: Process):
        self.p, self.q = p, q

    def __call__(self, t: ATree) -> Tuple[bool, bool]:
        test = atree_as_process(t, self.p.gamma)
        return ccs.passes_ccs(self.p, test), ccs.passes_ccs(self.q, test)


def test_state(t: ATree, gamma: int) -> Interfaced:
    """Strategy state of a test tree on a fresh player sharing the interface."""
    proc = atree_as_process(t, gamma)
    return Interfaced(tuple(range(gamma)), translate_state(initial_state(proc)))


def process_state(p: Process) -> Interfaced:
    return Interfaced(tuple(range(p.gamma)), translate_state(initial_state(p)))


class _SemCheck:
    def __init__(self, s1: Interfaced, s2: Interfaced):
        self.s1, self.s2 = s1, s2

    def __call__(self, t: ATree) -> Tuple[bool, bool]:
        test = test_state(t, len(self.s1.h))
        return semantic_passes(self.s1, test), semantic_passes(self.s2, test)


def ccs_pool(p: Process, q: Process, depth: Optional[int] = None) -> Tuple[List[ATree], int]:
    if p.gamma != q.gamma:
        raise CcsError(f"channel counts differ: {p.gamma} vs {q.gamma}")
    gp, gq = ccs.ccs_graph(p), ccs.ccs_graph(q)
    if depth is None:
        depth = default_depth(gp, gq)
    return test_pool(failures_of(gp, 0, depth) | failures_of(gq, 0, depth)), depth


def fair_eq_ccs(p: Process, q: Process, depth: Optional[int] = None, jobs: int = 1) -> Verdict:
    pool, depth = ccs_pool(p, q, depth)
    return _run_pool(pool, _CcsCheck(p, q), depth, jobs)[0]


def fair_eq_semantic(s1: Interfaced, s2: Interfaced, depth: Optional[int] = None,
                     jobs: int = 1) -> Verdict:
    if len(s1.h) != len(s2.h):
        raise ValueError("interface mismatch")
    g1 = interfaced_graph(s1, strat_next)
    g2 = interfaced_graph(s2, strat_next)
    if depth is None:
        depth = default_depth(g1, g2)
    pool = test_pool(failures_of(g1, 0, depth) | failures_of(g2, 0, depth))
    return _run_pool(pool, _SemCheck(s1, s2), depth, jobs)[0]


@dataclass
class Report:
    ccs: Verdict
    semantic: Verdict
    rows: List[Tuple[ATree, Tuple[bool, bool], Tuple[bool, bool]]] = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return self.ccs.equivalent == self.semantic.equivalent and all(
            c == s for _, c, s in self.rows)

    def to_text(self) -> str:
        def yn(b: bool) -> str:
            return "pass" if b else "fail"

        lines = [f"depth {self.ccs.depth}; {len(self.rows)} candidate tests"]
        for i, (t, c, s) in enumerate(self.rows):
            lines.append(f"test {i}: {t} | ccs {yn(c[0])}/{yn(c[1])} | "
                         f"semantic {yn(s[0])}/{yn(s[1])}")
        lines.append(f"ccs: {self.ccs}")
        lines.append(f"semantic: {self.semantic}")
        lines.append("AGREE" if self.agree else "DISAGREE")
        return "\n".join(lines) + "\n"


def full_abstraction_report(p: Process, q: Process, depth: Optional[int] = None,
                            jobs: int = 1) -> Report:
    """Run the same pool through CCS testing and strategy testing."""
    pool, depth = ccs_pool(p, q, depth)
    cv, crow = _run_pool(pool, _CcsCheck(p, q), depth, jobs, stop=False)
    sv, srow = _run_pool(pool, _SemCheck(process_state(p), process_state(q)), depth, jobs,
                         stop=False)
    rows = [(t, (a, b), (c, d)) for (t, a, b), (_, c, d) in zip(crow, srow)]
    return Report(cv, sv, rows)
