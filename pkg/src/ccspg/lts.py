"""Finite labelled transition graphs: exploration, the tick pole, bisimulation."""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

DEFAULT_MAX_STATES = 10 ** 6


class StateCapExceeded(RuntimeError):
    """Raised when an exploration would exceed the configured state cap."""


def max_states() -> int:
    raw = os.environ.get("CCSPG_MAX_STATES")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return DEFAULT_MAX_STATES


@dataclass(frozen=True, order=True)
class ALabel:
    """Edge of the CCS alphabet over a fixed channel count.

    ``kind`` is ``id``, ``tick``, ``in`` or ``out``; ``chan`` is 1-based.
    """

    kind: str
    chan: int = 0

    @property
    def silent(self) -> bool:
        return self.kind == "id"

    def complement(self) -> "ALabel":
        flip = {"in": "out", "out": "in"}
        return ALabel(flip.get(self.kind, self.kind), self.chan)

    def __str__(self) -> str:
        if self.kind == "in":
            return f"{self.chan}?"
        if self.kind == "out":
            return f"{self.chan}!"
        return self.kind


ID = ALabel("id")
TICK = ALabel("tick")


def complementary(a: ALabel, b: ALabel) -> Optional[ALabel]:
    """Label of the joint step when ``a`` and ``b`` meet, or None."""
    if a.kind in ("id", "tick") and b.kind == "id":
        return a
    if a.kind == "id" and b.kind == "tick":
        return b
    if a.kind in ("in", "out") and b == a.complement():
        return ID
    return None


@dataclass
class Graph:
    """Explored finite graph; vertex 0 is the root.  Self-loops are implicit."""

    states: List[Hashable]
    edges: List[List[Tuple[ALabel, int]]]

    def __len__(self) -> int:
        return len(self.states)

    def index(self) -> Dict[Hashable, int]:
        return {s: i for i, s in enumerate(self.states)}


def explore(root: Hashable, succ: Callable[[Hashable], Iterable[Tuple[ALabel, Hashable]]],
            cap: Optional[int] = None, depth: Optional[int] = None) -> Graph:
    """Breadth-first reachable graph.  Identity self-loops are dropped.

    With ``depth``, states further than ``depth`` steps from the root are
    kept as leaves and not expanded.
    """
    cap = max_states() if cap is None else cap
    index: Dict[Hashable, int] = {root: 0}
    states = [root]
    level = [0]
    edges: List[List[Tuple[ALabel, int]]] = []
    queue = deque([0])
    while queue:
        i = queue.popleft()
        if depth is not None and level[i] >= depth:
            continue
        out: List[Tuple[ALabel, int]] = []
        seen: Set[Tuple[ALabel, int]] = set()
        for lab, t in succ(states[i]):
            j = index.get(t)
            if j is None:
                if len(states) >= cap:
                    raise StateCapExceeded(f"more than {cap} states")
                j = index[t] = len(states)
                states.append(t)
                level.append(level[i] + 1)
                queue.append(j)
            if lab.silent and j == i:
                continue
            if (lab, j) not in seen:
                seen.add((lab, j))
                out.append((lab, j))
        while len(edges) <= i:
            edges.append([])
        edges[i] = out
    while len(edges) < len(states):
        edges.append([])
    return Graph(states, edges)


def graph_from_edges(n: int, edges: Iterable[Tuple[int, ALabel, int]]) -> Graph:
    adj: List[List[Tuple[ALabel, int]]] = [[] for _ in range(n)]
    for a, lab, b in edges:
        if not (lab.silent and a == b) and (lab, b) not in adj[a]:
            adj[a].append((lab, b))
    return Graph(list(range(n)), adj)


def _silent_closure(g: Graph) -> List[Set[int]]:
    clo: List[Optional[Set[int]]] = [None] * len(g)
    for s in range(len(g)):
        seen = {s}
        stack = [s]
        while stack:
            v = stack.pop()
            for lab, w in g.edges[v]:
                if lab.silent and w not in seen:
                    seen.add(w)
                    stack.append(w)
        clo[s] = seen
    return clo  # type: ignore[return-value]


def bot_sigma(g: Graph, v: int = 0) -> bool:
    """Every silently reachable vertex can still reach a tick silently.

    Edges that are neither silent nor ticks are ignored (projection onto the
    tick/silent alphabet).
    """
    can = [False] * len(g)
    rev: List[List[int]] = [[] for _ in range(len(g))]
    stack = []
    for a in range(len(g)):
        for lab, b in g.edges[a]:
            if lab.kind == "tick" and not can[a]:
                can[a] = True
                stack.append(a)
            elif lab.silent:
                rev[b].append(a)
    while stack:
        b = stack.pop()
        for a in rev[b]:
            if not can[a]:
                can[a] = True
                stack.append(a)
    seen = {v}
    stack = [v]
    while stack:
        a = stack.pop()
        if not can[a]:
            return False
        for lab, b in g.edges[a]:
            if lab.silent and b not in seen:
                seen.add(b)
                stack.append(b)
    return True


def _refine(adj: List[List[Tuple[ALabel, int]]]) -> List[int]:
    n = len(adj)
    block = [0] * n
    count = 1
    while True:
        sigs: Dict[tuple, int] = {}
        new = []
        for s in range(n):
            sig = (block[s], frozenset((lab, block[t]) for lab, t in adj[s]))
            new.append(sigs.setdefault(sig, len(sigs)))
        if len(sigs) == count:
            return new
        block, count = new, len(sigs)


def strong_bisim_check(g1: Graph, g2: Graph, v1: int = 0, v2: int = 0
                       ) -> Optional[Set[Tuple[int, int]]]:
    """Greatest strong bisimulation between the graphs, if it relates the roots."""
    n1 = len(g1)
    adj = [list(e) for e in g1.edges] + [[(lab, t + n1) for lab, t in e] for e in g2.edges]
    block = _refine(adj)
    if block[v1] != block[v2 + n1]:
        return None
    by_block: Dict[int, List[int]] = {}
    for s in range(len(g2)):
        by_block.setdefault(block[s + n1], []).append(s)
    return {(a, b) for a in range(n1) for b in by_block.get(block[a], ())}


def saturate(g: Graph) -> Graph:
    """Weak transitions as strong ones: silent* and silent* a silent*."""
    clo = _silent_closure(g)
    adj: List[List[Tuple[ALabel, int]]] = []
    for s in range(len(g)):
        out = set()
        for t in clo[s]:
            out.add((ALabel("id"), t))
            for lab, u in g.edges[t]:
                if not lab.silent:
                    for w in clo[u]:
                        out.add((lab, w))
        adj.append(sorted(out))
    return Graph(g.states, adj)


def weak_bisim_check(g1: Graph, g2: Graph, v1: int = 0, v2: int = 0
                     ) -> Optional[Set[Tuple[int, int]]]:
    return strong_bisim_check(saturate(g1), saturate(g2), v1, v2)


def longest_loud_path(g: Graph, v: int = 0) -> int:
    """Longest number of non-silent edges on a path (graph must be acyclic
    apart from silent cycles, which are collapsed)."""
    memo: Dict[int, int] = {}
    on_stack: Set[int] = set()

    def go(s: int) -> int:
        if s in memo:
            return memo[s]
        on_stack.add(s)
        best = 0
        for lab, t in g.edges[s]:
            if t in on_stack:
                if not lab.silent:
                    raise ValueError("loud cycle: longest path is unbounded")
                continue
            best = max(best, go(t) + (0 if lab.silent else 1))
        on_stack.discard(s)
        memo[s] = best
        return best

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10 * len(g) + 1000))
    try:
        return go(v)
    finally:
        sys.setrecursionlimit(old)


def to_text(g: Graph, show: Callable[[Hashable], str] = str) -> str:
    lines = [f"states {len(g)}"]
    for i, s in enumerate(g.states):
        lines.append(f"state {i}: {show(s)}")
    for i, out in enumerate(g.edges):
        for lab, j in out:
            lines.append(f"edge {i} {lab} {j}")
    return "\n".join(lines) + "\n"


def to_dot(g: Graph, show: Callable[[Hashable], str] = str) -> str:
    out = ["digraph lts {"]
    for i, s in enumerate(g.states):
        label = show(s).replace("\\", "\\\\").replace('"', '\\"')
        shape = "doublecircle" if i == 0 else "ellipse"
        out.append(f'  s{i} [shape={shape}, label="{label}"];')
    for i, edges in enumerate(g.edges):
        for lab, j in edges:
            out.append(f'  s{i} -> s{j} [label="{lab}"];')
    out.append("}")
    return "\n".join(out) + "\n"
