"""Independent brute-force oracles used to pin expected values in tests.

Everything here deliberately avoids the library's fast paths: distances come
from explicit breadth-first searches on explicitly built graphs, ball sizes
from closed-form growth formulas, and projections from windowed argmin scans
with a linear-escape certificate.
"""

from __future__ import annotations

from collections import deque

from ggtlab.groups import GroupModel, Word, word_distance
from ggtlab.spaces import BassSerreTree


def free_ball_size(rank: int, radius: int) -> int:
    """1 + 2k * ((2k-1)^r - 1) / (2k - 2) for a rank-k free group."""
    if radius == 0:
        return 1
    k2 = 2 * rank
    if rank == 1:
        return 2 * radius + 1
    return 1 + k2 * ((k2 - 1) ** radius - 1) // (k2 - 2)


def abelian2_ball_size(radius: int) -> int:
    """l^1 ball in Z^2: 2r^2 + 2r + 1."""
    return 2 * radius * radius + 2 * radius + 1


def naive_ball(model: GroupModel, center: Word, radius: int) -> set[Word]:
    """Plain BFS over the Cayley graph via word multiplication."""
    seen = {center}
    frontier = [center]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for i in range(1, model.rank + 1):
                for s in (i, -i):
                    u = w * Word(model, (s,))
                    if u not in seen:
                        seen.add(u)
                        nxt.append(u)
        frontier = nxt
    return seen


def graph_bfs(adjacency: dict, src):
    """Distances from src over an explicit adjacency dict."""
    dist = {src: 0}
    q = deque([src])
    while q:
        v = q.popleft()
        for u in adjacency[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                q.append(u)
    return dist


def cayley_graph_adjacency(model: GroupModel, radius: int) -> dict:
    verts = naive_ball(model, model.identity(), radius)
    keys = {w.letters for w in verts}
    adj = {}
    for w in verts:
        ns = []
        for i in range(1, model.rank + 1):
            for s in (i, -i):
                u = w * Word(model, (s,))
                if u.letters in keys:
                    ns.append(u)
        adj[w] = ns
    return adj


def bs_tree_adjacency(tree: BassSerreTree, radius: int) -> dict:
    """Finite portion of the coset tree: every ball element spans one edge.

    Coset representatives are prefix-closed, so the induced subgraph is
    distance-exact for cosets of elements within the ball.
    """
    model = tree.model
    adj: dict = {}
    for w in naive_ball(model, model.identity(), radius):
        v0 = tree.vertex(0, w)
        v1 = tree.vertex(1, w)
        adj.setdefault(v0, set()).add(v1)
        adj.setdefault(v1, set()).add(v0)
    return {v: sorted(ns, key=str) for v, ns in adj.items()}


def scan_axis_projection(model: GroupModel, axis, x: Word) -> tuple[set[Word], int]:
    """Windowed argmin over axis points with a linear-escape certificate.

    Valid on Cayley trees, where d(x, rep * root^n) >= |n| |root| - |rep| - |x|
    guarantees that scanning |n| <= (2 d(x, rep) + |rep| + |x|) / |root| + 2
    sees every minimizer.
    """
    q = max(1, len(axis.root))
    d_rep = word_distance(model, x, axis.rep)
    n_max = (2 * d_rep + len(axis.rep) + len(x)) // q + 2
    best = None
    chosen: set[Word] = set()
    pt = axis.rep * axis.root ** (-n_max)
    step = axis.root
    for n in range(-n_max, n_max + 1):
        d = word_distance(model, x, pt)
        if best is None or d < best:
            best, chosen = d, {pt}
        elif d == best:
            chosen.add(pt)
        pt = pt * step
    return chosen, best
