"""Matplotlib renderings of causal graphs, LTSs and full-abstraction reports."""

from __future__ import annotations

from collections import defaultdict
from typing import Dict, Hashable, List, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .lts import Graph  # noqa: E402
from .plays import CausalGraph, PlayCospan, causal_graph  # noqa: E402

PASS_COLOR = "#4c9a5b"
FAIL_COLOR = "#c8553d"


def _layers(nodes: Sequence[Hashable], edges: Sequence[Tuple[Hashable, Hashable]]) -> Dict[Hashable, int]:
    """Longest-path layering of a DAG; nodes on a cycle keep layer 0."""
    preds = defaultdict(list)
    for a, b in edges:
        preds[b].append(a)
    level: Dict[Hashable, int] = {}

    def go(v, seen=()):
        if v in level:
            return level[v]
        if v in seen:
            return 0
        best = 0
        for u in preds[v]:
            best = max(best, go(u, seen + (v,)) + 1)
        level[v] = best
        return best

    for v in nodes:
        go(v)
    return level


def _positions(level: Dict[Hashable, int], order: Sequence[Hashable]) -> Dict[Hashable, Tuple[float, float]]:
    rows: Dict[int, List[Hashable]] = defaultdict(list)
    for v in order:
        rows[level[v]].append(v)
    pos = {}
    for y, vs in rows.items():
        for i, v in enumerate(vs):
            pos[v] = (i - (len(vs) - 1) / 2.0, float(y))
    return pos


def _finish(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_causal(g: CausalGraph, path: str, title: str = "causal graph") -> None:
    """Channels as circles, players as dots, cores as triangles, layered along the edges."""
    level = _layers(g.vertices, g.edges)
    pos = _positions(level, g.vertices)
    fig, ax = plt.subplots(figsize=(6, 1.5 + 0.9 * (max(level.values(), default=0) + 1)))
    for a, b in g.edges:
        (x0, y0), (x1, y1) = pos[a], pos[b]
        ax.annotate("", xy=(x1, y1), xytext=(x0, y0),
                    arrowprops=dict(arrowstyle="->", color="0.45", lw=0.8, shrinkA=7, shrinkB=7))
    style = {"c": ("o", "white"), "p": ("o", "black"), "m": ("^", "black")}
    for v in g.vertices:
        marker, face = style[v[0]]
        x, y = pos[v]
        ax.scatter([x], [y], marker=marker, s=160 if v[0] != "p" else 40,
                   facecolors=face, edgecolors="black", zorder=3)
        ax.annotate(f"{v[0]}{v[1]}", (x, y), xytext=(6, 4), textcoords="offset points", fontsize=7)
    ax.set_title(title)
    ax.axis("off")
    _finish(fig, path)


def plot_play(c: PlayCospan, path: str) -> None:
    g = causal_graph(c.net)
    plot_causal(g, path, title=f"play: {len(c.net.cores())} cores, "
                              f"{len(c.initial.players)} -> {len(c.final.players)} players")


def plot_lts(g: Graph, path: str, show=str) -> None:
    """States layered by distance from the root; the root is drawn boxed."""
    nodes = list(range(len(g)))
    dist = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for _, j in g.edges[i]:
                if j not in dist:
                    dist[j] = dist[i] + 1
                    nxt.append(j)
        frontier = nxt
    pos = _positions(dist, nodes)
    depth = max(dist.values(), default=0)
    fig, ax = plt.subplots(figsize=(7, 1.5 + 1.1 * (depth + 1)))
    for i, out in enumerate(g.edges):
        for lab, j in out:
            (x0, y0), (x1, y1) = pos[i], pos[j]
            ax.annotate("", xy=(x1, -y1), xytext=(x0, -y0),
                        arrowprops=dict(arrowstyle="->", color="0.4", lw=0.8, shrinkA=9, shrinkB=9))
            ax.text((x0 + x1) / 2, -(y0 + y1) / 2, str(lab), fontsize=7, color="navy")
    for i in nodes:
        x, y = pos[i]
        ax.text(x, -y, str(i), ha="center", va="center", fontsize=8,
                bbox=dict(boxstyle="square" if i == 0 else "circle", fc="white", ec="black"))
    ax.set_xlim(min(p[0] for p in pos.values()) - 1, max(p[0] for p in pos.values()) + 1)
    ax.set_ylim(-depth - 0.7, 0.7)
    ax.set_title(f"{len(g)} states")
    ax.axis("off")
    _finish(fig, path)


def plot_report(report, path: str) -> None:
    """One row per candidate test; pass/fail for both processes on both sides."""
    rows = report.rows
    cols = ["CCS left", "CCS right", "semantic left", "semantic right"]
    fig, ax = plt.subplots(figsize=(7.5, 1.2 + 0.35 * max(len(rows), 1)))
    for r, (tree, (a, b), (c, d)) in enumerate(rows):
        for k, ok in enumerate((a, b, c, d)):
            ax.add_patch(plt.Rectangle((k, r), 1, 1, fc=PASS_COLOR if ok else FAIL_COLOR,
                                       ec="white"))
            ax.text(k + 0.5, r + 0.5, "pass" if ok else "fail", ha="center", va="center",
                    fontsize=7, color="white")
    ax.set_xlim(0, len(cols))
    ax.set_ylim(max(len(rows), 1), 0)
    ax.set_xticks([k + 0.5 for k in range(len(cols))])
    ax.set_xticklabels(cols, fontsize=8)
    ax.set_yticks([r + 0.5 for r in range(len(rows))])
    ax.set_yticklabels([str(t) for t, _, _ in rows], fontsize=7)
    ax.tick_params(length=0)
    ax.set_title("AGREE" if report.agree else "DISAGREE")
    _finish(fig, path)
