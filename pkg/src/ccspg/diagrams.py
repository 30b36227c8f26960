"""Play diagrams as typed element tables.

A :class:`PlayNet` holds three dense tables: channels, players and cells.
Channels are bare ids.  A player of arity ``n`` lists the channels it knows,
one per slot.  A cell records one local action; unary cells point at the
player before the action (``tgt``) and the player after it (``src``), while
fork and synchronisation cells point at the unary cells they bundle.

Everything here is immutable; every constructor returns fresh objects and
every quotient renumbers canonically (smallest representative wins).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple


class DiagramError(Exception):
    """Raised on malformed nets, embeddings or text."""


UNARY_TAGS = ("forkl", "forkr", "tick", "nu", "in", "out")
KIND_ORDER = ("forkl", "forkr", "fork", "tick", "nu", "in", "out", "tau")
_DIM = {
    "forkl": 2, "forkr": 2, "tick": 2, "nu": 2, "in": 2, "out": 2,
    "fork": 3, "tau": 4,
}


@dataclass(frozen=True, order=True)
class Kind:
    """Cell kind.  ``n`` is the arity of the acting player.

    ``in``/``out`` use ``a`` as the 1-based slot acted on.  ``tau`` stores the
    receiver as ``(n, a)`` and the sender as ``(m, c)``.
    """

    tag: str
    n: int
    a: int = 0
    m: int = 0
    c: int = 0

    def __post_init__(self):
        if self.tag not in _DIM:
            raise DiagramError(f"unknown cell kind {self.tag!r}")

    @property
    def dim(self) -> int:
        return _DIM[self.tag]

    @property
    def unary(self) -> bool:
        return self.tag in UNARY_TAGS

    def params(self) -> Tuple[Tuple[str, int], ...]:
        if self.tag == "tau":
            return (("n", self.n), ("a", self.a), ("m", self.m), ("c", self.c))
        if self.tag in ("in", "out"):
            return (("n", self.n), ("a", self.a))
        return (("n", self.n),)

    def __str__(self) -> str:
        return self.tag + "(" + ",".join(str(v) for _, v in self.params()) + ")"


def forkl(n: int) -> Kind:
    return Kind("forkl", n)


def forkr(n: int) -> Kind:
    return Kind("forkr", n)


def fork(n: int) -> Kind:
    return Kind("fork", n)


def tick(n: int) -> Kind:
    return Kind("tick", n)


def nu(n: int) -> Kind:
    return Kind("nu", n)


def inp(n: int, a: int) -> Kind:
    return Kind("in", n, a)


def out(n: int, a: int) -> Kind:
    return Kind("out", n, a)


def tau(n: int, a: int, m: int, c: int) -> Kind:
    return Kind("tau", n, a, m, c)


@dataclass(frozen=True)
class Cell:
    """One cell.  Unary cells use ``src``/``tgt``; others use ``refs``.

    ``refs`` is ``(left, right)`` for a fork and ``(out, in)`` for a tau.
    """

    kind: Kind
    src: int = -1
    tgt: int = -1
    refs: Tuple[int, ...] = ()


@dataclass(frozen=True)
class PlayNet:
    channels: int
    players: Tuple[Tuple[int, ...], ...] = ()
    cells: Tuple[Cell, ...] = ()

    def arity(self, p: int) -> int:
        return len(self.players[p])

    @property
    def is_position(self) -> bool:
        return not self.cells

    def sources(self, k: int) -> Tuple[int, ...]:
        """Players after the action of cell ``k``."""
        cell = self.cells[k]
        if cell.kind.unary:
            return (cell.src,)
        return tuple(self.cells[r].src for r in cell.refs)

    def targets(self, k: int) -> Tuple[int, ...]:
        """Players before the action of cell ``k``."""
        cell = self.cells[k]
        if cell.kind.unary:
            return (cell.tgt,)
        if cell.kind.tag == "fork":
            return (self.cells[cell.refs[0]].tgt,)
        return tuple(self.cells[r].tgt for r in cell.refs)

    def created_channel(self, k: int) -> Optional[int]:
        cell = self.cells[k]
        if cell.kind.tag == "nu":
            return self.players[cell.src][cell.kind.n]
        return None

    def referenced(self) -> set:
        return {r for c in self.cells for r in c.refs}

    def cores(self) -> List[int]:
        """Cells not referenced by any higher cell, ascending."""
        used = self.referenced()
        return [k for k in range(len(self.cells)) if k not in used]


def position(channels: int, players: Iterable[Sequence[int]]) -> PlayNet:
    return PlayNet(channels, tuple(tuple(p) for p in players), ())


def player_list(net: PlayNet) -> List[Tuple[int, int]]:
    """(arity, id) for each player, by id."""
    return [(len(s), i) for i, s in enumerate(net.players)]


def validate_net(net: PlayNet) -> List[str]:
    """Return every violated well-formedness rule; empty means valid."""
    errs: List[str] = []
    nc, npl = net.channels, len(net.players)
    if nc < 0:
        errs.append("negative channel count")
    for p, slots in enumerate(net.players):
        for i, ch in enumerate(slots):
            if not 0 <= ch < nc:
                errs.append(f"player {p} slot {i + 1} names missing channel {ch}")
    for k, cell in enumerate(net.cells):
        kd = cell.kind
        if kd.n < 0:
            errs.append(f"cell {k}: negative arity")
            continue
        if kd.unary:
            if cell.refs:
                errs.append(f"cell {k}: unary cell has refs")
            if not (0 <= cell.src < npl and 0 <= cell.tgt < npl):
                errs.append(f"cell {k}: dangling player reference")
                continue
            t, s = net.players[cell.tgt], net.players[cell.src]
            want = kd.n + 1 if kd.tag == "nu" else kd.n
            if len(t) != kd.n:
                errs.append(f"cell {k}: initial player {cell.tgt} has arity {len(t)}, expected {kd.n}")
            if len(s) != want:
                errs.append(f"cell {k}: final player {cell.src} has arity {len(s)}, expected {want}")
            elif len(t) == kd.n and s[:kd.n] != t:
                errs.append(f"cell {k}: players {cell.tgt} and {cell.src} disagree on shared slots")
            if kd.tag in ("in", "out") and not 1 <= kd.a <= kd.n:
                errs.append(f"cell {k}: slot {kd.a} out of range for arity {kd.n}")
            continue
        if cell.src != -1 or cell.tgt != -1:
            errs.append(f"cell {k}: composite cell has direct player references")
        if len(cell.refs) != 2 or not all(0 <= r < len(net.cells) for r in cell.refs):
            errs.append(f"cell {k}: needs two valid refs")
            continue
        l, r = (net.cells[i] for i in cell.refs)
        if kd.tag == "fork":
            if l.kind != forkl(kd.n) or r.kind != forkr(kd.n):
                errs.append(f"cell {k}: fork refs must be forkl({kd.n}), forkr({kd.n})")
            elif l.tgt != r.tgt:
                errs.append(f"cell {k}: fork branches start from different players")
        else:
            if not (1 <= kd.a <= kd.n and 1 <= kd.c <= kd.m):
                errs.append(f"cell {k}: tau slot out of range")
                continue
            if l.kind != out(kd.m, kd.c) or r.kind != inp(kd.n, kd.a):
                errs.append(f"cell {k}: tau refs must be out({kd.m},{kd.c}), in({kd.n},{kd.a})")
                continue
            sx, ry = l.tgt, r.tgt
            if 0 <= sx < npl and 0 <= ry < npl and len(net.players[sx]) == kd.m \
                    and len(net.players[ry]) == kd.n:
                if net.players[sx][kd.c - 1] != net.players[ry][kd.a - 1]:
                    errs.append(f"cell {k}: sender slot {kd.c} and receiver slot {kd.a} differ")
    return errs


def check_net(net: PlayNet) -> PlayNet:
    errs = validate_net(net)
    if errs:
        raise DiagramError("; ".join(errs))
    return net


# ---------------------------------------------------------------- embeddings


@dataclass(frozen=True)
class Embedding:
    """A structure-preserving map given by three id tables."""

    dom: PlayNet
    cod: PlayNet
    channels: Tuple[int, ...]
    players: Tuple[int, ...]
    cells: Tuple[int, ...] = ()

    def elements(self):
        for i, j in enumerate(self.channels):
            yield ("c", i), ("c", j)
        for i, j in enumerate(self.players):
            yield ("p", i), ("p", j)
        for i, j in enumerate(self.cells):
            yield ("m", i), ("m", j)

    def image(self) -> set:
        return {e for _, e in self.elements()}

    def then(self, other: "Embedding") -> "Embedding":
        """Composite: first ``self``, then ``other``."""
        if self.cod != other.dom:
            raise DiagramError("embeddings do not compose")
        return Embedding(
            self.dom, other.cod,
            tuple(other.channels[i] for i in self.channels),
            tuple(other.players[i] for i in self.players),
            tuple(other.cells[i] for i in self.cells),
        )


def identity(net: PlayNet) -> Embedding:
    return Embedding(net, net, tuple(range(net.channels)),
                     tuple(range(len(net.players))), tuple(range(len(net.cells))))


def embedding_errors(e: Embedding, monic: bool = True) -> List[str]:
    errs = []
    d, c = e.dom, e.cod
    if (len(e.channels), len(e.players), len(e.cells)) != (d.channels, len(d.players), len(d.cells)):
        return ["table sizes do not match the domain"]
    if not all(0 <= x < c.channels for x in e.channels) \
            or not all(0 <= x < len(c.players) for x in e.players) \
            or not all(0 <= x < len(c.cells) for x in e.cells):
        return ["image outside the codomain"]
    if monic:
        for name, tab in (("channel", e.channels), ("player", e.players), ("cell", e.cells)):
            if len(set(tab)) != len(tab):
                errs.append(f"{name} map is not injective")
    for p, slots in enumerate(d.players):
        img = c.players[e.players[p]]
        if tuple(e.channels[x] for x in slots) != img:
            errs.append(f"player {p}: slots not preserved")
    for k, cell in enumerate(d.cells):
        ck = c.cells[e.cells[k]]
        if ck.kind != cell.kind:
            errs.append(f"cell {k}: kind not preserved")
        elif cell.kind.unary:
            if (e.players[cell.src], e.players[cell.tgt]) != (ck.src, ck.tgt):
                errs.append(f"cell {k}: attachments not preserved")
        elif tuple(e.cells[r] for r in cell.refs) != ck.refs:
            errs.append(f"cell {k}: refs not preserved")
    return errs


def check_embedding(e: Embedding, monic: bool = True) -> Embedding:
    errs = embedding_errors(e, monic)
    if errs:
        raise DiagramError("invalid embedding: " + "; ".join(errs))
    return e


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        a, b = self.find(a), self.find(b)
        if a != b:
            if b < a:
                a, b = b, a
            self.parent[b] = a


def _glue(sizes_b, sizes_c, pairs):
    """Quotient of B + C; returns (new ids for B, new ids for C, count)."""
    nb, ncn = sizes_b, sizes_c
    uf = _UnionFind(nb + ncn)
    for x, y in pairs:
        uf.union(x, nb + y)
    num: Dict[int, int] = {}
    ids = []
    for i in range(nb + ncn):
        r = uf.find(i)
        if r not in num:
            num[r] = len(num)
        ids.append(num[r])
    return tuple(ids[:nb]), tuple(ids[nb:]), len(num)


def pushout(f: Embedding, g: Embedding, monic: bool = True) -> Tuple[PlayNet, Embedding, Embedding]:
    """Glue ``f.cod`` and ``g.cod`` along their common domain.

    Elements of ``f.cod`` keep their relative order and come first, then the
    unmatched elements of ``g.cod``.  Returns ``(D, into_from_f, into_from_g)``.
    With ``monic=False`` the legs may identify channels.
    """
    if f.dom != g.dom:
        raise DiagramError("pushout legs have different domains")
    check_embedding(f, monic)
    check_embedding(g, monic)
    B, C, I = f.cod, g.cod, f.dom
    chb, chc, nch = _glue(B.channels, C.channels, zip(f.channels, g.channels))
    plb, plc, npl = _glue(len(B.players), len(C.players), zip(f.players, g.players))
    ceb, cec, nce = _glue(len(B.cells), len(C.cells), zip(f.cells, g.cells))
    players: List[Optional[Tuple[int, ...]]] = [None] * npl
    for p, s in enumerate(B.players):
        players[plb[p]] = tuple(chb[x] for x in s)
    for p, s in enumerate(C.players):
        if players[plc[p]] is None:
            players[plc[p]] = tuple(chc[x] for x in s)
    cells: List[Optional[Cell]] = [None] * nce
    for tab, pl, ce, net in ((ceb, plb, ceb, B), (cec, plc, cec, C)):
        for k, cell in enumerate(net.cells):
            if cells[tab[k]] is None:
                if cell.kind.unary:
                    cells[tab[k]] = Cell(cell.kind, pl[cell.src], pl[cell.tgt])
                else:
                    cells[tab[k]] = Cell(cell.kind, refs=tuple(ce[r] for r in cell.refs))
    D = PlayNet(nch, tuple(players), tuple(cells))
    return (D, Embedding(B, D, chb, plb, ceb), Embedding(C, D, chc, plc, cec))


def subnet(net: PlayNet, channels: Iterable[int], players: Iterable[int],
           cells: Iterable[int] = ()) -> Tuple[PlayNet, Embedding]:
    """Restrict ``net`` to the given elements, renumbered by ascending id.

    The selection must be closed under references.
    """
    ch = sorted(set(channels))
    pl = sorted(set(players))
    ce = sorted(set(cells))
    cmap = {x: i for i, x in enumerate(ch)}
    pmap = {x: i for i, x in enumerate(pl)}
    kmap = {x: i for i, x in enumerate(ce)}
    try:
        new_players = tuple(tuple(cmap[x] for x in net.players[p]) for p in pl)
        new_cells = []
        for k in ce:
            cell = net.cells[k]
            if cell.kind.unary:
                new_cells.append(Cell(cell.kind, pmap[cell.src], pmap[cell.tgt]))
            else:
                new_cells.append(Cell(cell.kind, refs=tuple(kmap[r] for r in cell.refs)))
    except KeyError as exc:
        raise DiagramError(f"selection is not closed: missing {exc}") from None
    sub = PlayNet(len(ch), new_players, tuple(new_cells))
    return sub, Embedding(sub, net, tuple(ch), tuple(pl), tuple(ce))


def pullback(f: Embedding, g: Embedding) -> Tuple[PlayNet, Embedding, Embedding]:
    """Intersection of the images of two monic maps into the same net."""
    if f.cod != g.cod:
        raise DiagramError("pullback legs have different codomains")
    check_embedding(f)
    check_embedding(g)
    gch = {y: x for x, y in enumerate(g.channels)}
    gpl = {y: x for x, y in enumerate(g.players)}
    gce = {y: x for x, y in enumerate(g.cells)}
    B = f.dom
    A, pb = subnet(
        B,
        [x for x in range(B.channels) if f.channels[x] in gch],
        [x for x in range(len(B.players)) if f.players[x] in gpl],
        [x for x in range(len(B.cells)) if f.cells[x] in gce],
    )
    pc = Embedding(A, g.dom,
                   tuple(gch[f.channels[x]] for x in pb.channels),
                   tuple(gpl[f.players[x]] for x in pb.players),
                   tuple(gce[f.cells[x]] for x in pb.cells))
    return A, pb, pc


# ---------------------------------------------------------------- isomorphism


def _signatures(net: PlayNet, colors, rounds: int = 3):
    """Colour refinement over the element graph, used to prune the search."""
    sig = {}
    for c in range(net.channels):
        sig[("c", c)] = ("c", colors.get(("c", c)))
    for p, s in enumerate(net.players):
        sig[("p", p)] = ("p", len(s), colors.get(("p", p)))
    for k, cell in enumerate(net.cells):
        sig[("m", k)] = ("m", cell.kind, colors.get(("m", k)))
    nbrs: Dict[tuple, List[tuple]] = {e: [] for e in sig}
    for p, s in enumerate(net.players):
        for i, c in enumerate(s):
            nbrs[("p", p)].append((i, ("c", c)))
            nbrs[("c", c)].append((-1 - i, ("p", p)))
    for k, cell in enumerate(net.cells):
        if cell.kind.unary:
            links = [("s", ("p", cell.src)), ("t", ("p", cell.tgt))]
        else:
            links = [(i, ("m", r)) for i, r in enumerate(cell.refs)]
        for lab, e in links:
            nbrs[("m", k)].append((lab, e))
            nbrs[e].append(("r" + str(lab), ("m", k)))
    for _ in range(rounds):
        new = {}
        for e, base in sig.items():
            new[e] = hash((base, tuple(sorted((str(l), sig[x].__hash__()) for l, x in nbrs[e]))))
        sig = new
    return sig


def find_iso(n1: PlayNet, n2: PlayNet, fixed: Optional[Dict[tuple, tuple]] = None,
             colors1: Optional[Dict[tuple, object]] = None,
             colors2: Optional[Dict[tuple, object]] = None) -> Optional[Embedding]:
    """Find an isomorphism ``n1 -> n2`` or return None.

    ``fixed`` pins elements (keys like ``("p", 3)``); ``colors1``/``colors2``
    label elements that must map to equally labelled ones.
    """
    if (n1.channels, len(n1.players), len(n1.cells)) != (n2.channels, len(n2.players), len(n2.cells)):
        return None
    s1 = _signatures(n1, colors1 or {})
    s2 = _signatures(n2, colors2 or {})
    if sorted(s1.values()) != sorted(s2.values()):
        return None
    by_sig: Dict[object, List[tuple]] = {}
    for e, s in s2.items():
        by_sig.setdefault(s, []).append(e)

    fwd: Dict[tuple, tuple] = {}
    back: Dict[tuple, tuple] = {}
    trail: List[tuple] = []

    def bind(a, b) -> bool:
        if a in fwd:
            return fwd[a] == b
        if b in back or s1[a] != s2[b]:
            return False
        fwd[a] = b
        back[b] = a
        trail.append(a)
        t, i = a
        j = b[1]
        if t == "p":
            return all(bind(("c", x), ("c", y)) for x, y in zip(n1.players[i], n2.players[j]))
        if t == "m":
            c1, c2 = n1.cells[i], n2.cells[j]
            if c1.kind != c2.kind:
                return False
            if c1.kind.unary:
                return bind(("p", c1.src), ("p", c2.src)) and bind(("p", c1.tgt), ("p", c2.tgt))
            return all(bind(("m", x), ("m", y)) for x, y in zip(c1.refs, c2.refs))
        return True

    def undo(mark: int) -> None:
        while len(trail) > mark:
            a = trail.pop()
            del back[fwd.pop(a)]

    for a, b in (fixed or {}).items():
        if not bind(a, b):
            return None

    order = sorted(((("m", k) for k in range(len(n1.cells)))),
                   key=lambda e: (-n1.cells[e[1]].kind.dim, e[1]))
    order += [("p", p) for p in range(len(n1.players))]
    order += [("c", c) for c in range(n1.channels)]

    def search(i: int) -> bool:
        while i < len(order) and order[i] in fwd:
            i += 1
        if i == len(order):
            return True
        a = order[i]
        for b in by_sig.get(s1[a], ()):
            if b in back:
                continue
            mark = len(trail)
            if bind(a, b) and search(i + 1):
                return True
            undo(mark)
        return False

    if not search(0):
        return None
    return Embedding(
        n1, n2,
        tuple(fwd[("c", c)][1] for c in range(n1.channels)),
        tuple(fwd[("p", p)][1] for p in range(len(n1.players))),
        tuple(fwd[("m", k)][1] for k in range(len(n1.cells))),
    )


# ---------------------------------------------------------------- text format


def _kind_line_params(kind: Kind) -> str:
    return " ".join(f"{k}={v}" for k, v in kind.params())


def net_to_text(net: PlayNet) -> str:
    """Canonical line format: channels, players by arity, cells by kind."""
    lines = [f"channel {c}" for c in range(net.channels)]
    for n, p in sorted(player_list(net)):
        slots = ",".join(str(x) for x in net.players[p])
        lines.append(f"player {p} n={n} slots={slots}")
    order = sorted(range(len(net.cells)),
                   key=lambda k: (KIND_ORDER.index(net.cells[k].kind.tag), k))
    for k in order:
        cell = net.cells[k]
        head = f"{cell.kind.tag} {k} {_kind_line_params(cell.kind)}"
        if cell.kind.unary:
            lines.append(f"{head} s={cell.src} t={cell.tgt}")
        elif cell.kind.tag == "fork":
            lines.append(f"{head} l={cell.refs[0]} r={cell.refs[1]}")
        else:
            lines.append(f"{head} o={cell.refs[0]} i={cell.refs[1]}")
    return "".join(line + "\n" for line in lines)


def _fields(tokens: Sequence[str], lineno: int) -> Dict[str, str]:
    out: Dict[str, str] = {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep or key in out:
            raise DiagramError(f"line {lineno}: bad field {tok!r}")
        out[key] = val
    return out


def _int(s: str, lineno: int) -> int:
    try:
        return int(s)
    except ValueError:
        raise DiagramError(f"line {lineno}: expected an integer, got {s!r}") from None


def net_from_text(text: str) -> PlayNet:
    channels: set = set()
    players: Dict[int, Tuple[int, ...]] = {}
    cells: Dict[int, Cell] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        tag = tok[0]
        if len(tok) < 2:
            raise DiagramError(f"line {lineno}: missing id")
        ident = _int(tok[1], lineno)
        if tag == "channel":
            if len(tok) != 2 or ident in channels:
                raise DiagramError(f"line {lineno}: bad channel line")
            channels.add(ident)
            continue
        f = _fields(tok[2:], lineno)
        if tag == "player":
            if set(f) != {"n", "slots"} or ident in players:
                raise DiagramError(f"line {lineno}: bad player line")
            slots = tuple(_int(x, lineno) for x in f["slots"].split(",")) if f["slots"] else ()
            if len(slots) != _int(f["n"], lineno):
                raise DiagramError(f"line {lineno}: arity does not match slots")
            players[ident] = slots
            continue
        if tag not in _DIM:
            raise DiagramError(f"line {lineno}: unknown element kind {tag!r}")
        if ident in cells:
            raise DiagramError(f"line {lineno}: duplicate cell id {ident}")
        vals = {k: _int(v, lineno) for k, v in f.items()}
        try:
            if tag == "tau":
                kind = Kind(tag, vals.pop("n"), vals.pop("a"), vals.pop("m"), vals.pop("c"))
                cell = Cell(kind, refs=(vals.pop("o"), vals.pop("i")))
            elif tag == "fork":
                cell = Cell(Kind(tag, vals.pop("n")), refs=(vals.pop("l"), vals.pop("r")))
            else:
                a = vals.pop("a") if tag in ("in", "out") else 0
                cell = Cell(Kind(tag, vals.pop("n"), a), vals.pop("s"), vals.pop("t"))
        except KeyError as exc:
            raise DiagramError(f"line {lineno}: missing field {exc}") from None
        if vals:
            raise DiagramError(f"line {lineno}: unexpected fields {sorted(vals)}")
        cells[ident] = cell
    for name, tab in (("channel", channels), ("player", players), ("cell", cells)):
        if set(tab) != set(range(len(tab))):
            raise DiagramError(f"{name} ids are not dense")
    net = PlayNet(len(channels), tuple(players[i] for i in range(len(players))),
                  tuple(cells[i] for i in range(len(cells))))
    return check_net(net)
