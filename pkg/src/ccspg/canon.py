"""Canonical forms of positioned states, so that exploration merges isomorphic ones.

Players are ordered to give the lexicographically least encoding
``(label text, renumbered slots)``; interface channels keep their interface
index and private channels are numbered by first appearance.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from .diagrams import PlayNet
from .lts import ALabel, explore
from .plays import classify_move
from .terms import Interfaced, TermState


def _labels(s) -> tuple:
    return s.terms if isinstance(s, TermState) else s.strats


def canonical_order(pos: PlayNet, keys: Sequence[str], iface: Sequence[int]) -> Tuple[List[int], Dict[int, int]]:
    """Best player order and channel renumbering (interface first)."""
    k = len(iface)
    fixed = {c: i for i, c in enumerate(iface)}
    players = pos.players
    n = len(players)
    users: Dict[int, List[int]] = {}
    for p, slots in enumerate(players):
        for c in slots:
            users.setdefault(c, []).append(p)
    best: List[Optional[tuple]] = [None, None, None]  # encoding, order, chmap

    def elem(p: int, chmap: Dict[int, int]) -> tuple:
        nxt = k + len(chmap)
        fresh: Dict[int, int] = {}
        out = []
        for c in players[p]:
            if c in fixed:
                out.append(fixed[c])
            elif c in chmap:
                out.append(chmap[c])
            else:
                if c not in fresh:
                    fresh[c] = nxt
                    nxt += 1
                out.append(fresh[c])
        return (keys[p], tuple(out)), fresh

    def rec(remaining: List[int], order: List[int], chmap: Dict[int, int], enc: List[tuple]) -> None:
        if not remaining:
            if best[0] is None or enc < best[0]:
                best[0], best[1], best[2] = list(enc), list(order), dict(chmap)
            return
        scored = [(elem(p, chmap), p) for p in remaining]
        low = min(e for (e, _), _ in scored)
        if best[0] is not None:
            depth = len(enc)
            if (enc + [low]) > best[0][:depth + 1]:
                return
        cands = [(fresh, p) for (e, fresh), p in scored if e == low]
        tried = set()
        for fresh, p in cands:
            # players whose new channels are theirs alone are interchangeable
            alone = all(users[c] == [p] or set(users[c]) <= {p} for c in fresh)
            sig = (players[p], keys[p]) if not alone else ("alone", low)
            if sig in tried:
                continue
            tried.add(sig)
            chmap2 = dict(chmap)
            chmap2.update(fresh)
            rest = [q for q in remaining if q != p]
            rec(rest, order + [p], chmap2, enc + [low])

    rec(list(range(n)), [], {}, [])
    order, chmap = best[1] or [], best[2] or {}
    full = dict(fixed)
    full.update(chmap)
    nxt = k + len(chmap)
    for c in range(pos.channels):
        if c not in full:
            full[c] = nxt
            nxt += 1
    return order, full


def _rebuild(pos: PlayNet, order: List[int], chmap: Dict[int, int]) -> PlayNet:
    return PlayNet(pos.channels, tuple(tuple(chmap[c] for c in pos.players[p]) for p in order), ())


def canonical_state(s, iface: Sequence[int] = ()):
    labels = _labels(s)
    order, chmap = canonical_order(s.position, [str(t) for t in labels], iface)
    return type(s)(_rebuild(s.position, order, chmap), tuple(labels[p] for p in order))


def canonical_interfaced(s: Interfaced) -> Interfaced:
    st = canonical_state(s.state, s.h)
    return Interfaced(tuple(range(len(s.h))), st)


def interfaced_succ(next_fn):
    """Edges over the CCS alphabet: in/out only on interface channels."""

    def succ(s: Interfaced):
        out = []
        for desc, t in next_fn(s.state):
            lab = classify_move(desc, s.h).a_label
            if lab is None:
                continue
            out.append((ALabel(*lab), canonical_interfaced(Interfaced(s.h, t))))
        return out

    return succ


def interfaced_graph(s: Interfaced, next_fn, cap=None, depth=None):
    return explore(canonical_interfaced(s), interfaced_succ(next_fn), cap, depth)
