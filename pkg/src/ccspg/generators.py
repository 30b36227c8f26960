"""Random and exhaustive generators for plays and CCS terms."""

from __future__ import annotations

import random
from functools import lru_cache
from typing import Iterator, List, Optional, Tuple

from .ccs import NIL, New, Par, Prefix, Process, Sum, Term
from .diagrams import Cell, Embedding, PlayNet, subnet
from .plays import PlayCospan, SeedClass, apply_seed, compose_plays, identity_play, tau_class


def random_position(rng: random.Random, max_players: int = 6, max_channels: int = 4) -> PlayNet:
    nch = rng.randint(1, max_channels)
    players = []
    for _ in range(rng.randint(1, max_players)):
        n = rng.randint(0, nch)
        players.append(tuple(rng.sample(range(nch), n)))
    return PlayNet(nch, tuple(players), ())


def move_choices(x: PlayNet) -> List[Tuple[SeedClass, Tuple[int, ...]]]:
    """Every seed class and actor tuple fitting ``x`` (basic or full)."""
    options: List[Tuple[SeedClass, Tuple[int, ...]]] = []
    for p, slots in enumerate(x.players):
        n = len(slots)
        for tag in ("fork", "fl", "fr", "tk", "nu"):
            options.append((SeedClass(tag, n), (p,)))
        for a in range(1, n + 1):
            options.append((SeedClass("in", n, a), (p,)))
            options.append((SeedClass("out", n, a), (p,)))
    for s, ss in enumerate(x.players):
        for c, ch in enumerate(ss, 1):
            for r, rs in enumerate(x.players):
                if r != s and ch in rs:
                    a = rs.index(ch) + 1
                    options.append((tau_class(len(rs), a, len(ss), c), (s, r)))
    return options


def random_move_choice(rng: random.Random, x: PlayNet) -> Optional[Tuple[SeedClass, Tuple[int, ...]]]:
    """A random seed class and actors fitting ``x``."""
    options = move_choices(x)
    return rng.choice(options) if options else None


def random_play(rng: random.Random, max_moves: int = 5, max_players: int = 6,
                max_channels: int = 4) -> PlayCospan:
    x = random_position(rng, max_players, max_channels)
    play = identity_play(x)
    for _ in range(rng.randint(1, max_moves)):
        choice = random_move_choice(rng, play.final_pos)
        if choice is None:
            break
        m = apply_seed(play.final_pos, *choice)
        play = compose_plays(m.play, play)
    return play


# ---------------------------------------------------------------- mutations


def _drop_cell(net: PlayNet, k: int) -> PlayNet:
    shift = lambda r: r - 1 if r > k else r
    cells = []
    for j, c in enumerate(net.cells):
        if j == k:
            continue
        if c.kind.unary:
            cells.append(c)
        else:
            cells.append(Cell(c.kind, refs=tuple(-1 if r == k else shift(r) for r in c.refs)))
    return PlayNet(net.channels, net.players, tuple(cells))


def _retarget(leg: Embedding, net: PlayNet) -> Embedding:
    return Embedding(leg.dom, net, leg.channels, leg.players, leg.cells)


def mutations(c: PlayCospan, split_taus: bool = False) -> Iterator[Tuple[str, PlayCospan]]:
    """Every single-element mutation: drop a final player, drop a cell, redirect a target.

    Dropping a synchronisation cell leaves its Out and In halves as two
    independent basic moves, which is a genuine play, so it is only
    produced when ``split_taus`` is set.
    """
    y = c.final_pos
    for i in range(len(y.players)):
        keep = [j for j in range(len(y.players)) if j != i]
        sub, into = subnet(y, range(y.channels), keep)
        yield f"drop final player {i}", PlayCospan(c.net, into.then(c.final), c.initial)
    for k in range(len(c.net.cells)):
        if c.net.cells[k].kind.tag == "tau" and not split_taus:
            continue
        net = _drop_cell(c.net, k)
        yield f"drop cell {k}", PlayCospan(net, _retarget(c.final, net), _retarget(c.initial, net))
    for k, cell in enumerate(c.net.cells):
        if not cell.kind.unary:
            continue
        for q in range(len(c.net.players)):
            if q == cell.tgt:
                continue
            cells = list(c.net.cells)
            cells[k] = Cell(cell.kind, cell.src, q)
            net = PlayNet(c.net.channels, c.net.players, tuple(cells))
            yield f"redirect cell {k} to player {q}", PlayCospan(
                net, _retarget(c.final, net), _retarget(c.initial, net))


# ---------------------------------------------------------------- CCS terms


def _prefixes(gamma: int) -> List[Prefix]:
    return [Prefix("tick")] + [Prefix(k, a) for a in range(1, gamma + 1) for k in ("in", "out")]


@lru_cache(maxsize=None)
def terms_of_size(size: int, gamma: int) -> Tuple[Term, ...]:
    """All terms of exactly ``size`` (see ``ccs.term_size``) over ``gamma`` channels."""
    out: List[Term] = []
    if size == 1:
        out.append(NIL)
    if size >= 2:
        out.extend(New(b) for b in terms_of_size(size - 1, gamma + 1))
    if size >= 3:
        for ls in range(1, size - 1):
            for l in terms_of_size(ls, gamma):
                for r in terms_of_size(size - 1 - ls, gamma):
                    out.append(Par(l, r))
    out.extend(Sum(bs) for bs in _sums(size, gamma))
    return tuple(out)


@lru_cache(maxsize=None)
def _sums(size: int, gamma: int) -> Tuple[Tuple[Tuple[Prefix, Term], ...], ...]:
    """Non-empty branch lists of total size ``size``."""
    out = []
    for first in range(2, size + 1):
        heads = [(p, b) for p in _prefixes(gamma) for b in terms_of_size(first - 1, gamma)]
        rests = [()] if first == size else list(_sums(size - first, gamma))
        for h in heads:
            for r in rests:
                out.append((h,) + r)
    return tuple(out)


def all_processes(max_size: int, max_gamma: int) -> Iterator[Process]:
    for gamma in range(max_gamma + 1):
        for s in range(1, max_size + 1):
            for t in terms_of_size(s, gamma):
                yield Process(gamma, t)


def random_term(rng: random.Random, size: int, gamma: int) -> Term:
    """A random term of size at most ``size``."""
    if size <= 1:
        return NIL
    r = rng.random()
    if r < 0.12:
        return New(random_term(rng, size - 1, gamma + 1))
    if r < 0.32 and size >= 3:
        ls = rng.randint(1, size - 2)
        return Par(random_term(rng, ls, gamma), random_term(rng, size - 1 - ls, gamma))
    if r < 0.45:
        return NIL
    branches = []
    budget = size
    while budget >= 2:
        take = rng.randint(2, budget)
        branches.append((rng.choice(_prefixes(gamma)), random_term(rng, take - 1, gamma)))
        budget -= take
        if rng.random() < 0.55:
            break
    return Sum(tuple(branches))


def random_process(rng: random.Random, max_size: int, max_gamma: int) -> Process:
    gamma = rng.randint(0, max_gamma)
    return Process(gamma, random_term(rng, rng.randint(1, max_size), gamma))
