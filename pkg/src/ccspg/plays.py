"""Seeds, moves, plays and the correctness criterion for play nets."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from .diagrams import (
    Cell, DiagramError, Embedding, Kind, PlayNet, check_embedding, embedding_errors,
    find_iso, identity, net_from_text, net_to_text, pushout, subnet, validate_net,
)


class PlayError(Exception):
    """Raised when a play operation gets an unsuitable argument."""


# ---------------------------------------------------------------- move classes


@dataclass(frozen=True, order=True)
class Basic:
    """Basic move class seen from a single player: fl, fr, tk, nu, in(a), out(a)."""

    tag: str
    a: int = 0

    def __str__(self) -> str:
        return f"{self.tag}({self.a})" if self.tag in ("in", "out") else self.tag


FL, FR, TK, NU = Basic("fl"), Basic("fr"), Basic("tk"), Basic("nu")


def basic_classes(n: int) -> List[Basic]:
    """All basic classes from a player of arity ``n``, in canonical order."""
    return [FL, FR, TK, NU] + [Basic("in", a) for a in range(1, n + 1)] \
        + [Basic("out", a) for a in range(1, n + 1)]


@dataclass(frozen=True)
class SeedClass:
    """A seed shape.  ``tag`` is a basic tag, ``fork`` or ``tau``.

    For ``tau`` the receiver is ``(n, a)`` and the sender ``(m, c)``.
    """

    tag: str
    n: int
    a: int = 0
    m: int = 0
    c: int = 0

    def __str__(self) -> str:
        if self.tag == "tau":
            return f"tau({self.n},{self.a},{self.m},{self.c})"
        if self.tag in ("in", "out"):
            return f"{self.tag}({self.n},{self.a})"
        return f"{self.tag}({self.n})"

    @property
    def full(self) -> bool:
        return self.tag not in ("fl", "fr")


def fullfork(n: int) -> SeedClass:
    return SeedClass("fork", n)


def tau_class(n: int, a: int, m: int, c: int) -> SeedClass:
    return SeedClass("tau", n, a, m, c)


def basic_seed_class(b: Basic, n: int) -> SeedClass:
    return SeedClass(b.tag, n, b.a)


def _check_class(cls: SeedClass) -> None:
    if cls.n < 0 or cls.tag not in ("fl", "fr", "tk", "nu", "in", "out", "fork", "tau"):
        raise PlayError(f"bad seed class {cls}")
    if cls.tag in ("in", "out") and not 1 <= cls.a <= cls.n:
        raise PlayError(f"slot {cls.a} out of range in {cls}")
    if cls.tag == "tau" and not (1 <= cls.a <= cls.n and 1 <= cls.c <= cls.m):
        raise PlayError(f"slot out of range in {cls}")


# ---------------------------------------------------------------- cospans


@dataclass(frozen=True)
class PlayCospan:
    net: PlayNet
    final: Embedding
    initial: Embedding

    @property
    def final_pos(self) -> PlayNet:
        return self.final.dom

    @property
    def initial_pos(self) -> PlayNet:
        return self.initial.dom


def identity_play(x: PlayNet) -> PlayCospan:
    i = identity(x)
    return PlayCospan(x, i, i)


@dataclass(frozen=True)
class Move:
    """A one-core play together with how it was generated."""

    play: PlayCospan
    core: int
    cls: SeedClass
    spectators: Tuple[int, ...] = ()


# Avatar record for the final position of a move: origin player in the
# initial position and the basic class it played (None for spectators).
Avatar = Tuple[int, Optional[Basic]]


def _build(x: PlayNet, cls: SeedClass, actors: Sequence[int]):
    """Move on ``x`` whose initial border is ``x`` itself, ids untouched."""
    _check_class(cls)
    players = list(x.players)
    nch = x.channels
    cells: List[Cell] = []
    repl: Dict[int, List[Tuple[int, Basic]]] = {}

    def new_player(slots) -> int:
        players.append(tuple(slots))
        return len(players) - 1

    def unary(tag: str, p: int, n: int, a: int = 0, extra=()) -> int:
        q = new_player(x.players[p] + tuple(extra))
        cells.append(Cell(Kind(tag, n, a), q, p))
        return len(cells) - 1

    if cls.tag == "tau":
        sx, ry = actors
        if sx == ry:
            raise PlayError("a player cannot synchronise with itself")
        if len(x.players[sx]) != cls.m or len(x.players[ry]) != cls.n:
            raise PlayError(f"{cls} does not fit the arities of players {sx}, {ry}")
        if x.players[sx][cls.c - 1] != x.players[ry][cls.a - 1]:
            raise PlayError(f"players {sx} and {ry} do not share the named channel")
        o = unary("out", sx, cls.m, cls.c)
        i = unary("in", ry, cls.n, cls.a)
        repl[sx] = [(cells[o].src, Basic("out", cls.c))]
        repl[ry] = [(cells[i].src, Basic("in", cls.a))]
        cells.append(Cell(Kind("tau", cls.n, cls.a, cls.m, cls.c), refs=(o, i)))
    else:
        (p,) = actors
        if len(x.players[p]) != cls.n:
            raise PlayError(f"{cls} does not fit player {p} of arity {len(x.players[p])}")
        n = cls.n
        if cls.tag in ("fork", "fl", "fr"):
            got = []
            if cls.tag != "fr":
                got.append((unary("forkl", p, n), FL))
            if cls.tag != "fl":
                got.append((unary("forkr", p, n), FR))
            repl[p] = [(cells[k].src, b) for k, b in got]
            if cls.tag == "fork":
                cells.append(Cell(Kind("fork", n), refs=(got[0][0], got[1][0])))
        elif cls.tag == "nu":
            k = unary("nu", p, n, extra=(nch,))
            nch += 1
            repl[p] = [(cells[k].src, NU)]
        else:
            tag = {"tk": "tick"}.get(cls.tag, cls.tag)
            k = unary(tag, p, n, cls.a)
            repl[p] = [(cells[k].src, Basic(cls.tag, cls.a))]
    net = PlayNet(nch, tuple(players), tuple(cells))
    ys: List[int] = []
    avatars: List[Avatar] = []
    for p in range(len(x.players)):
        if p in repl:
            for q, b in repl[p]:
                ys.append(q)
                avatars.append((p, b))
        else:
            ys.append(p)
            avatars.append((p, None))
    y = PlayNet(nch, tuple(players[q] for q in ys), ())
    final = Embedding(y, net, tuple(range(nch)), tuple(ys), ())
    init = Embedding(x, net, tuple(range(x.channels)), tuple(range(len(x.players))), ())
    spect = tuple(p for p in range(len(x.players)) if p not in repl)
    return Move(PlayCospan(net, final, init), len(cells) - 1, cls, spect), tuple(avatars)


def apply_seed(x: PlayNet, cls: SeedClass, actors: Sequence[int]) -> Move:
    """The move of class ``cls`` played by ``actors`` from position ``x``.

    The initial border is ``x`` with its own ids; new players, the created
    channel and the cells are appended.  In the final border each acting
    player is replaced in place by its avatar(s).
    """
    return _build(x, cls, tuple(actors))[0]


def seed_initial(cls: SeedClass) -> PlayNet:
    _check_class(cls)
    if cls.tag == "tau":
        xs = tuple(range(cls.m))
        fresh = iter(range(cls.m, cls.m + cls.n - 1))
        ys = tuple(xs[cls.c - 1] if i == cls.a - 1 else next(fresh) for i in range(cls.n))
        return PlayNet(cls.m + cls.n - 1, (xs, ys))
    return PlayNet(cls.n, (tuple(range(cls.n)),))


def make_seed(cls: SeedClass) -> Move:
    """Canonical seed of the given shape."""
    x = seed_initial(cls)
    return apply_seed(x, cls, (0, 1) if cls.tag == "tau" else (0,))


def embed_seed(seed: Move, host: PlayNet, assign: Sequence[int],
               allow_identification: bool = False) -> Move:
    """Glue ``host`` to ``seed`` along the seed's channel interface.

    ``assign[i]`` is the host channel for the seed's initial channel ``i``.
    Host elements keep their ids and come first in every border.
    """
    if not host.is_position:
        raise PlayError("host must be a position")
    sx = seed.play.initial_pos
    k = sx.channels
    if len(assign) != k or not all(0 <= a < host.channels for a in assign):
        raise PlayError("assignment must send every interface channel to a host channel")
    if not allow_identification and len(set(assign)) != k:
        raise PlayError("non-monic assignment")
    iface = PlayNet(k)
    to_host = Embedding(iface, host, tuple(assign), (), ())
    monic = len(set(assign)) == k

    def glue(leg: Embedding):
        # the seed's initial channels are exactly its interface, in order
        to_seed = Embedding(iface, leg.dom, tuple(range(k)), (), ())
        return pushout(to_host, to_seed, monic=monic)

    mnet, mh, ms = pushout(to_host, Embedding(iface, seed.play.net,
                                               seed.play.initial.channels, (), ()),
                           monic=monic)

    def leg_into(pos_leg: Embedding) -> Tuple[PlayNet, Embedding]:
        side = pos_leg.dom
        d, jh, js = glue(pos_leg)
        chans = [None] * d.channels
        pls = [None] * len(d.players)
        for i, j in enumerate(jh.channels):
            chans[j] = mh.channels[i]
        for i, j in enumerate(jh.players):
            pls[j] = mh.players[i]
        for i, j in enumerate(js.channels):
            if chans[j] is None:
                chans[j] = ms.channels[pos_leg.channels[i]]
        for i, j in enumerate(js.players):
            if pls[j] is None:
                pls[j] = ms.players[pos_leg.players[i]]
        return d, Embedding(d, mnet, tuple(chans), tuple(pls), ())

    xd, xe = leg_into(seed.play.initial)
    yd, ye = leg_into(seed.play.final)
    spect = tuple(mh.players)
    return Move(PlayCospan(mnet, ye, xe), ms.cells[seed.core], seed.cls, spect)


# ---------------------------------------------------------------- descriptors


@dataclass(frozen=True)
class MoveDescriptor:
    """A full move (or the identity) available from ``position``.

    ``players`` are the acting players (sender first for ``tau``); ``slots``
    holds the 1-based slot for ``in``/``out`` and ``(c, a)`` for ``tau``.
    """

    kind: str
    players: Tuple[int, ...]
    slots: Tuple[int, ...]
    position: PlayNet = field(compare=False, repr=False)

    @property
    def seed_class(self) -> Optional[SeedClass]:
        x = self.position
        if self.kind == "id":
            return None
        if self.kind == "tau":
            s, r = self.players
            c, a = self.slots
            return tau_class(x.arity(r), a, x.arity(s), c)
        n = x.arity(self.players[0])
        tag = {"fork": "fork", "tick": "tk"}.get(self.kind, self.kind)
        return SeedClass(tag, n, self.slots[0] if self.slots else 0)

    @cached_property
    def _built(self):
        if self.kind == "id":
            return None
        return _build(self.position, self.seed_class, self.players)

    @property
    def move(self) -> Optional[Move]:
        return None if self._built is None else self._built[0]

    @property
    def final_position(self) -> PlayNet:
        return self.position if self._built is None else self._built[0].play.final_pos

    @property
    def avatars(self) -> Tuple[Avatar, ...]:
        """For each final player: (origin player, basic class or None)."""
        if self._built is None:
            return tuple((p, None) for p in range(len(self.position.players)))
        return self._built[1]

    def channel(self) -> Optional[int]:
        """Channel acted on, for in/out/tau."""
        if self.kind in ("in", "out"):
            return self.position.players[self.players[0]][self.slots[0] - 1]
        if self.kind == "tau":
            return self.position.players[self.players[0]][self.slots[0] - 1]
        return None

    def __str__(self) -> str:
        if self.kind == "id":
            return "id"
        if self.kind == "tau":
            (s, r), (c, a) = self.players, self.slots
            return f"tau(p{s}.{c}->p{r}.{a})"
        p = self.players[0]
        if self.kind in ("in", "out"):
            return f"{self.kind}(p{p}.{self.slots[0]})"
        return f"{self.kind}(p{p})"


def enumerate_full_moves(x: PlayNet) -> List[MoveDescriptor]:
    """Every full move from ``x`` plus the identity, in a fixed order."""
    out: List[MoveDescriptor] = []
    for p, slots in enumerate(x.players):
        n = len(slots)
        out.append(MoveDescriptor("fork", (p,), (), x))
        out.append(MoveDescriptor("tick", (p,), (), x))
        out.append(MoveDescriptor("nu", (p,), (), x))
        out.extend(MoveDescriptor("in", (p,), (a,), x) for a in range(1, n + 1))
        out.extend(MoveDescriptor("out", (p,), (a,), x) for a in range(1, n + 1))
    for s, ss in enumerate(x.players):
        for c, ch in enumerate(ss, 1):
            for r, rs in enumerate(x.players):
                if r == s:
                    continue
                for a, ch2 in enumerate(rs, 1):
                    if ch == ch2:
                        out.append(MoveDescriptor("tau", (s, r), (c, a), x))
    out.append(MoveDescriptor("id", (), (), x))
    return out


@dataclass(frozen=True)
class Classification:
    full: bool
    closed_world: bool
    sigma_label: str
    a_label: Optional[Tuple[str, int]]


def classify_move(m: MoveDescriptor, interface: Optional[Sequence[int]] = None) -> Classification:
    """Classify a descriptor.  ``interface[i]`` is the channel of interface slot i+1.

    ``a_label`` is ``("id", 0)``, ``("tick", 0)``, ``("in", i)`` or
    ``("out", i)``; None when no interface is given or the channel is private.
    """
    closed = m.kind in ("fork", "nu", "tick", "tau", "id")
    sigma = "tick" if m.kind == "tick" else "silent"
    label = None
    if interface is not None:
        if m.kind == "tick":
            label = ("tick", 0)
        elif closed:
            label = ("id", 0)
        else:
            ch = m.channel()
            if ch in interface:
                label = (m.kind, list(interface).index(ch) + 1)
    return Classification(True, closed, sigma, label)


# ---------------------------------------------------------------- composition


def compose_plays(u: PlayCospan, v: PlayCospan) -> PlayCospan:
    """``u`` after ``v``: glue ``u``'s initial border onto ``v``'s final one."""
    if u.initial_pos != v.final_pos:
        raise PlayError("border mismatch: initial border of the later play differs "
                        "from the final border of the earlier one")
    d, jv, ju = pushout(v.final, u.initial)
    return PlayCospan(d, u.final.then(ju), v.initial.then(jv))


def compose_all(plays: Sequence[PlayCospan]) -> PlayCospan:
    """Compose a chronological list (earliest first)."""
    if not plays:
        raise PlayError("nothing to compose")
    acc = plays[0]
    for p in plays[1:]:
        acc = compose_plays(p, acc)
    return acc


def regluing(u: PlayCospan, v: PlayCospan) -> PlayCospan:
    """Compose after renaming ``u``'s initial border to match ``v``'s final one."""
    iso = find_iso(u.initial_pos, v.final_pos)
    if iso is None:
        raise PlayError("borders are not isomorphic")
    # rebuild u.initial so that its domain is v.final_pos
    inv_c = {j: i for i, j in enumerate(iso.channels)}
    inv_p = {j: i for i, j in enumerate(iso.players)}
    init = Embedding(v.final_pos, u.net,
                     tuple(u.initial.channels[inv_c[j]] for j in range(v.final_pos.channels)),
                     tuple(u.initial.players[inv_p[j]] for j in range(len(v.final_pos.players))),
                     ())
    return compose_plays(PlayCospan(u.net, u.final, init), v)


def cospan_iso(c1: PlayCospan, c2: PlayCospan) -> Optional[Embedding]:
    """Net isomorphism commuting with both borders.

    When the borders are equal positions the iso must fix them element-wise;
    otherwise it only has to preserve border membership.
    """
    if c1.final_pos == c2.final_pos and c1.initial_pos == c2.initial_pos:
        fixed: Dict[tuple, tuple] = {}
        for leg1, leg2 in ((c1.final, c2.final), (c1.initial, c2.initial)):
            for (_, a), (_, b) in zip(leg1.elements(), leg2.elements()):
                if fixed.get(a, b) != b:
                    return None
                fixed[a] = b
        return find_iso(c1.net, c2.net, fixed=fixed)

    def colours(c):
        f, i = c.final.image(), c.initial.image()
        return {e: (e in f, e in i) for e in f | i}

    return find_iso(c1.net, c2.net, colors1=colours(c1), colors2=colours(c2))


# ---------------------------------------------------------------- causal graph


@dataclass(frozen=True)
class CausalGraph:
    """Vertices ``("c", i)``, ``("p", i)``, ``("m", k)`` labelled 0, 1, inf."""

    vertices: Tuple[tuple, ...]
    edges: frozenset

    def label(self, v: tuple) -> str:
        return {"c": "0", "p": "1", "m": "inf"}[v[0]]

    def successors(self, v: tuple) -> List[tuple]:
        return sorted(b for a, b in self.edges if a == v)


def causal_graph(net: PlayNet) -> CausalGraph:
    errs = validate_net(net)
    if errs:
        raise DiagramError("invalid net: " + "; ".join(errs))
    cores = net.cores()
    verts = [("c", c) for c in range(net.channels)]
    verts += [("p", p) for p in range(len(net.players))]
    verts += [("m", k) for k in cores]
    edges = set()
    for p, slots in enumerate(net.players):
        for ch in slots:
            edges.add((("p", p), ("c", ch)))
    for k in cores:
        for s in net.sources(k):
            edges.add((("p", s), ("m", k)))
        for t in net.targets(k):
            edges.add((("m", k), ("p", t)))
        ch = net.created_channel(k)
        if ch is not None:
            edges.add((("c", ch), ("m", k)))
    return CausalGraph(tuple(verts), frozenset(edges))


def _find_cycle(graph: CausalGraph) -> Optional[List[tuple]]:
    adj: Dict[tuple, List[tuple]] = {v: [] for v in graph.vertices}
    for a, b in sorted(graph.edges):
        adj[a].append(b)
    state: Dict[tuple, int] = {}
    for root in graph.vertices:
        if root in state:
            continue
        stack = [(root, iter(adj[root]))]
        path = [root]
        state[root] = 1
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[v] = 2
                stack.pop()
                path.pop()
            elif state.get(nxt) == 1:
                return path[path.index(nxt):] + [nxt]
            elif nxt not in state:
                state[nxt] = 1
                stack.append((nxt, iter(adj[nxt])))
                path.append(nxt)
    return None


@dataclass(frozen=True)
class Verdict:
    ok: bool
    condition: Optional[str] = None
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "accept"
        return f"reject({self.condition}): {self.witness}"


def _locally_injective(net: PlayNet, k: int) -> Optional[str]:
    cell = net.cells[k]
    if cell.kind.unary:
        if cell.src == cell.tgt:
            return f"cell {k} has player {cell.src} on both sides"
        ch = net.created_channel(k)
        if ch is not None and ch in net.players[cell.tgt]:
            return f"cell {k} creates channel {ch} that its player already knows"
        return None
    l, r = (net.cells[i] for i in cell.refs)
    if cell.refs[0] == cell.refs[1]:
        return f"cell {k} refers twice to cell {cell.refs[0]}"
    ps = [l.src, r.src, l.tgt] if cell.kind.tag == "fork" else [l.src, l.tgt, r.src, r.tgt]
    if len(set(ps)) != len(ps):
        return f"cell {k} identifies players {ps}"
    return None


def check_play(c: PlayCospan) -> Verdict:
    """Decide whether a cospan is a play (all four conditions)."""
    net = c.net
    errs = validate_net(net)
    if errs:
        raise DiagramError("invalid net: " + "; ".join(errs))
    for name, leg in (("final", c.final), ("initial", c.initial)):
        if leg.cod != net:
            return Verdict(False, "border", f"{name} border does not map into the net")
        if not leg.dom.is_position:
            return Verdict(False, "border", f"{name} border is not a position")
        e = embedding_errors(leg)
        if e:
            return Verdict(False, "border", f"{name} border: {e[0]}")
    cores = net.cores()
    for k in cores:
        why = _locally_injective(net, k)
        if why:
            return Verdict(False, "i", why)
    sources = {cell.src for cell in net.cells if cell.kind.unary}
    targets = {cell.tgt for cell in net.cells if cell.kind.unary}
    created = {net.created_channel(k) for k in range(len(net.cells))} - {None}
    init_pl = set(c.initial.players)
    want = {p for p in range(len(net.players)) if p not in sources}
    if init_pl != want:
        bad = sorted(init_pl ^ want)[0]
        return Verdict(False, "ii", ("p", bad))
    want_ch = {x for x in range(net.channels) if x not in created}
    if set(c.initial.channels) != want_ch:
        bad = sorted(set(c.initial.channels) ^ want_ch)[0]
        return Verdict(False, "ii", ("c", bad))
    fin_pl = set(c.final.players)
    want = {p for p in range(len(net.players)) if p not in targets}
    if fin_pl != want:
        bad = sorted(fin_pl ^ want)[0]
        return Verdict(False, "iii", ("p", bad))
    if set(c.final.channels) != set(range(net.channels)):
        bad = sorted(set(range(net.channels)) - set(c.final.channels))[0]
        return Verdict(False, "iii", ("c", bad))
    seen_s: Dict[int, int] = {}
    seen_t: Dict[int, int] = {}
    for k in cores:
        for s in net.sources(k):
            if s in seen_s and seen_s[s] != k:
                return Verdict(False, "iv", (("p", s), ("m", seen_s[s]), ("m", k)))
            seen_s[s] = k
        for t in net.targets(k):
            if t in seen_t and seen_t[t] != k:
                return Verdict(False, "iv", (("m", seen_t[t]), ("m", k), ("p", t)))
            seen_t[t] = k
    cyc = _find_cycle(causal_graph(net))
    if cyc:
        return Verdict(False, "iv", tuple(cyc))
    return Verdict(True)


# ---------------------------------------------------------------- decomposition


def _core_cells(net: PlayNet, k: int) -> List[int]:
    return [k, *net.cells[k].refs]


def _seed_class_of(net: PlayNet, k: int) -> SeedClass:
    kd = net.cells[k].kind
    if kd.tag == "tau":
        return tau_class(kd.n, kd.a, kd.m, kd.c)
    tag = {"forkl": "fl", "forkr": "fr", "tick": "tk"}.get(kd.tag, kd.tag)
    return SeedClass(tag, kd.n, kd.a)


def _restricted_leg(leg: Embedding, new_cod: PlayNet, into: Embedding) -> Embedding:
    """Re-target ``leg`` (into ``into.cod``) at the subnet ``into.dom``."""
    cm = {j: i for i, j in enumerate(into.channels)}
    pm = {j: i for i, j in enumerate(into.players)}
    km = {j: i for i, j in enumerate(into.cells)}
    return Embedding(leg.dom, new_cod, tuple(cm[x] for x in leg.channels),
                     tuple(pm[x] for x in leg.players), tuple(km[x] for x in leg.cells))


def decompose_play(c: PlayCospan) -> List[Move]:
    """Split a play into moves, earliest first."""
    v = check_play(c)
    if not v:
        raise PlayError(f"not a play: {v}")
    moves: List[Move] = []
    while True:
        net = c.net
        cores = net.cores()
        if not cores:
            return moves
        init_pl = set(c.initial.players)
        k = next(k for k in cores if all(t in init_pl for t in net.targets(k)))
        cells = _core_cells(net, k)
        tg, sr = set(net.targets(k)), set(net.sources(k))
        created = net.created_channel(k)
        x_ch = set(c.initial.channels)
        x_pl = set(c.initial.players)
        mid_ch = x_ch | ({created} if created is not None else set())
        mid_pl = (x_pl - tg) | sr
        mnet, m_in = subnet(net, mid_ch, x_pl | sr, cells)
        mid, mid_in = subnet(net, mid_ch, mid_pl)
        # the last move carries the play's own final border, permutation included
        last = c.final if len(cores) == 1 else mid_in
        move = PlayCospan(mnet, _restricted_leg(last, mnet, m_in),
                          _restricted_leg(c.initial, mnet, m_in))
        core = m_in.cells.index(k)
        spect = tuple(m_in.players.index(p) for p in sorted(x_pl - tg))
        moves.append(Move(move, core, _seed_class_of(net, k), spect))
        rest_cells = [j for j in range(len(net.cells)) if j not in cells]
        rest, r_in = subnet(net, range(net.channels),
                            [p for p in range(len(net.players)) if p not in tg], rest_cells)
        c = PlayCospan(rest, _restricted_leg(c.final, rest, r_in),
                       _restricted_leg(mid_in, rest, r_in))


def recompose(moves: Sequence[Move], start: Optional[PlayNet] = None) -> PlayCospan:
    if not moves:
        if start is None:
            raise PlayError("empty decomposition needs a start position")
        return identity_play(start)
    return compose_all([m.play for m in moves])


# ---------------------------------------------------------------- views, history


def _maker(net: PlayNet) -> Dict[int, int]:
    """Player id -> unary cell that produced it."""
    return {cell.src: k for k, cell in enumerate(net.cells) if cell.kind.unary}


def view_of(c: PlayCospan, y: int) -> Tuple[PlayCospan, int]:
    """The view of final player ``y``: its chain of basic moves back to the start.

    Returns the view as a play and the id of its initial player in the
    initial border.
    """
    if not 0 <= y < len(c.final.players):
        raise PlayError(f"{y} is not a final player")
    net = c.net
    made = _maker(net)
    p = c.final.players[y]
    chain_pl = [p]
    chain_ce = []
    while p in made:
        k = made[p]
        chain_ce.append(k)
        p = net.cells[k].tgt
        chain_pl.append(p)
    chans = set()
    for q in chain_pl:
        chans |= set(net.players[q])
    vnet, into = subnet(net, chans, chain_pl, chain_ce)
    top, bot = into.players.index(chain_pl[0]), into.players.index(chain_pl[-1])

    def individual(q: int) -> Embedding:
        slots = vnet.players[q]
        chs = sorted(set(slots))
        pos = PlayNet(len(chs), (tuple(chs.index(s) for s in slots),))
        return Embedding(pos, vnet, tuple(chs), (q,), ())

    view = PlayCospan(vnet, individual(top), individual(bot))
    return view, c.initial.players.index(p)


def history_map(c: PlayCospan) -> Dict[tuple, tuple]:
    """Send each element (tau cells excluded) to its ancestor in the initial border."""
    v = check_play(c)
    if not v:
        raise PlayError(f"not a play: {v}")
    net = c.net
    init_c = {x: i for i, x in enumerate(c.initial.channels)}
    init_p = {x: i for i, x in enumerate(c.initial.players)}
    made = _maker(net)
    parent = {}
    for k, cell in enumerate(net.cells):
        for r in cell.refs:
            if cell.kind.tag == "fork":
                parent[r] = k
    creator = {net.created_channel(k): k for k in range(len(net.cells))
               if net.created_channel(k) is not None}

    def step(e: tuple) -> tuple:
        t, i = e
        if t == "c":
            return e if i in init_c else ("m", creator[i])
        if t == "p":
            if i in init_p:
                return e
            k = made[i]
            return ("m", parent.get(k, k))
        cell = net.cells[i]
        if cell.kind.unary:
            return ("p", cell.tgt)
        return ("p", net.cells[cell.refs[0]].tgt)

    out: Dict[tuple, tuple] = {}
    elems = [("c", i) for i in range(net.channels)] + [("p", i) for i in range(len(net.players))]
    elems += [("m", k) for k, cell in enumerate(net.cells) if cell.kind.tag != "tau"]
    for e in elems:
        cur = e
        while True:
            nxt = step(cur)
            if nxt == cur:
                break
            cur = nxt
        out[e] = ("c", init_c[cur[1]]) if cur[0] == "c" else ("p", init_p[cur[1]])
    return out


def individual_at(x: PlayNet, p: int) -> Embedding:
    """The individual of player ``p``: one player and its distinct channels."""
    chs = sorted(set(x.players[p]))
    pos = PlayNet(len(chs), (tuple(chs.index(s) for s in x.players[p]),))
    return Embedding(pos, x, tuple(chs), (p,), ())


def restrict_play(c: PlayCospan, l: Embedding) -> Tuple[PlayCospan, Embedding]:
    """Cartesian restriction of ``c`` along ``l`` into its initial border."""
    if l.cod != c.initial_pos:
        raise PlayError("restriction map must land in the initial border")
    if embedding_errors(l):
        raise PlayError("non-monic or invalid restriction map")
    hist = history_map(c)
    keep = set(l.image())
    net = c.net
    sel = {e for e, h in hist.items() if h in keep}
    taus = [k for k, cell in enumerate(net.cells)
            if cell.kind.tag == "tau" and all(("m", r) in sel for r in cell.refs)]
    sub, into = subnet(net, [i for t, i in sel if t == "c"], [i for t, i in sel if t == "p"],
                       [i for t, i in sel if t == "m"] + taus)
    init = _restricted_leg(l.then(c.initial), sub, into)
    chosen = {("c", x) for x in into.channels} | {("p", x) for x in into.players}
    y = c.final_pos
    ych = [i for i, x in enumerate(c.final.channels) if ("c", x) in chosen]
    ypl = [i for i, x in enumerate(c.final.players) if ("p", x) in chosen]
    ysub, yin = subnet(y, ych, ypl)
    final = _restricted_leg(yin.then(c.final), sub, into)
    return PlayCospan(sub, final, init), into


# ---------------------------------------------------------------- text / DOT


def play_to_text(c: PlayCospan) -> str:
    def line(name: str, leg: Embedding) -> str:
        pl = ",".join(map(str, leg.players))
        ch = ",".join(map(str, leg.channels))
        return f"{name} players={pl} channels={ch}\n"

    return line("final", c.final) + line("initial", c.initial) + net_to_text(c.net)


def _border(net: PlayNet, players: List[int], channels: List[int]) -> Embedding:
    cm = {x: i for i, x in enumerate(channels)}
    try:
        pos = PlayNet(len(channels), tuple(tuple(cm[s] for s in net.players[p]) for p in players))
    except (KeyError, IndexError):
        raise DiagramError("border lists a player whose channels are not in the border") from None
    return check_embedding(Embedding(pos, net, tuple(channels), tuple(players), ()))


def play_from_text(text: str) -> PlayCospan:
    lines = text.splitlines(keepends=True)
    heads = {}
    for want, raw in zip(("final", "initial"), lines[:2]):
        tok = raw.split()
        if not tok or tok[0] != want:
            raise DiagramError(f"expected a '{want}' header line")
        f = dict(t.partition("=")[::2] for t in tok[1:])
        if set(f) != {"players", "channels"}:
            raise DiagramError(f"bad '{want}' header")
        try:
            heads[want] = tuple([int(x) for x in f[k].split(",")] if f[k] else []
                                for k in ("players", "channels"))
        except ValueError:
            raise DiagramError(f"bad ids in '{want}' header") from None
    if len(heads) != 2:
        raise DiagramError("missing border header lines")
    net = net_from_text("".join(lines[2:]))
    return PlayCospan(net, _border(net, *heads["final"]), _border(net, *heads["initial"]))


def causal_dot(g: CausalGraph) -> str:
    shape = {"c": "circle", "p": "point", "m": "triangle"}
    out = ["digraph causal {"]
    for v in g.vertices:
        out.append(f'  {v[0]}{v[1]} [shape={shape[v[0]]}, label="{v[0]}{v[1]}"];')
    for a, b in sorted(g.edges):
        out.append(f"  {a[0]}{a[1]} -> {b[0]}{b[1]};")
    out.append("}")
    return "\n".join(out) + "\n"


def play_dot(c: PlayCospan) -> str:
    net = c.net
    out = ["digraph play {", "  rankdir=BT;"]
    for i in range(net.channels):
        out.append(f'  c{i} [shape=circle, label="c{i}"];')
    for p, slots in enumerate(net.players):
        out.append(f'  p{p} [shape=point, xlabel="p{p}"];')
        for ch in slots:
            out.append(f"  p{p} -> c{ch} [style=dotted, arrowhead=none];")
    for k, cell in enumerate(net.cells):
        out.append(f'  m{k} [shape=triangle, label="{cell.kind}"];')
        if cell.kind.unary:
            out.append(f"  p{cell.tgt} -> m{k};")
            out.append(f"  m{k} -> p{cell.src};")
        else:
            for r in cell.refs:
                out.append(f"  m{k} -> m{r} [style=dashed];")
    for name, leg in (("final", c.final), ("initial", c.initial)):
        out.append(f"  subgraph cluster_{name} {{")
        out.append(f'    label="{name}";')
        for i, p in enumerate(leg.players):
            out.append(f'    {name}_p{i} [shape=point, xlabel="{name[0]}{i}"];')
        for i, ch in enumerate(leg.channels):
            out.append(f'    {name}_c{i} [shape=circle, label="{name[0]}c{i}"];')
        out.append("  }")
        for i, p in enumerate(leg.players):
            out.append(f"  {name}_p{i} -> p{p} [style=dashed, arrowhead=none];")
        for i, ch in enumerate(leg.channels):
            out.append(f"  {name}_c{i} -> c{ch} [style=dashed, arrowhead=none];")
    out.append("}")
    return "\n".join(out) + "\n"
