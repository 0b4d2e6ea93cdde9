"""Topology metrics and structural verifiers for digraphs.

Connectivity metrics follow the interconnection-network reading: diameter is
the max over ordered pairs of directed BFS distance, fault tolerance is
reported both as directed vertex/arc connectivity (max-flow) and as
articulation points and bridges of the underlying undirected graph (loops
dropped, antiparallel arc pairs collapsed to one edge).  Loops never affect
separation and are excluded from all cut computations.
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass

from .digraph import Digraph, VertexMap
from .symbolic import is_line_digraph

DEFAULT_NODE_BUDGET = 10_000_000


class SearchBudgetError(RuntimeError):
    """Isomorphism search exceeded its node budget."""


def strongly_connected(d: Digraph) -> bool:
    """True iff the digraph has a single strongly connected component."""
    return len(_scc(d)) <= 1


def _scc(d: Digraph) -> list[list[int]]:
    """Tarjan's strongly connected components, iterative."""
    n = d.n
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            out = d.out_neighbors(v)
            while pi < len(out):
                w = out[pi]
                pi += 1
                if index[w] == -1:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                components.append(comp)
    return components


def _bfs_dist(d: Digraph, source: int) -> list[int]:
    dist = [-1] * d.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in d.out_neighbors(v):
            if dist[w] == -1:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def diameter(d: Digraph) -> int | float:
    """Max directed BFS distance over ordered pairs; inf when not strongly
    connected.  Distance to self is 0, so loops never contribute."""
    best = 0
    for s in range(d.n):
        dist = _bfs_dist(d, s)
        if min(dist) < 0:
            return math.inf
        best = max(best, max(dist))
    return best


def _underlying_adj(d: Digraph) -> list[list[int]]:
    """Underlying simple graph: loops dropped, antiparallel pairs collapsed."""
    nbr: list[set[int]] = [set() for _ in range(d.n)]
    for t, h in d.arcs:
        if t != h:
            nbr[t].add(h)
            nbr[h].add(t)
    return [sorted(s) for s in nbr]


def underlying_cut_analysis(d: Digraph) -> tuple[list[int], list[tuple[int, int]]]:
    """Articulation points and bridges of the underlying undirected graph,
    by iterative depth-first low-link traversal."""
    adj = _underlying_adj(d)
    n = d.n
    disc = [-1] * n
    low = [0] * n
    points: set[int] = set()
    bridges: list[tuple[int, int]] = []
    counter = 0
    for root in range(n):
        if disc[root] != -1:
            continue
        root_children = 0
        work: list[tuple[int, int, int]] = [(root, -1, 0)]
        while work:
            v, parent, pi = work[-1]
            if pi == 0 and disc[v] == -1:
                disc[v] = low[v] = counter
                counter += 1
            advanced = False
            while pi < len(adj[v]):
                w = adj[v][pi]
                pi += 1
                if disc[w] == -1:
                    work[-1] = (v, parent, pi)
                    work.append((w, v, 0))
                    advanced = True
                    break
                if w != parent:
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            work.pop()
            if work:
                p = work[-1][0]
                low[p] = min(low[p], low[v])
                if p == root:
                    root_children += 1
                elif low[v] >= disc[p]:
                    points.add(p)
                if low[v] > disc[p]:
                    bridges.append((min(p, v), max(p, v)))
        if root_children >= 2:
            points.add(root)
    return sorted(points), sorted(bridges)


def _max_flow(n: int, arcs: list[tuple[int, int, int]], s: int, t: int) -> int:
    """Edmonds-Karp on an arc list (tail, head, capacity)."""
    heads: list[int] = []
    caps: list[int] = []
    out: list[list[int]] = [[] for _ in range(n)]
    for u, v, c in arcs:
        out[u].append(len(heads))
        heads.append(v)
        caps.append(c)
        out[v].append(len(heads))
        heads.append(u)
        caps.append(0)
    flow = 0
    while True:
        prev_arc = [-1] * n
        prev_arc[s] = -2
        queue = deque([s])
        while queue and prev_arc[t] == -1:
            v = queue.popleft()
            for a in out[v]:
                w = heads[a]
                if prev_arc[w] == -1 and caps[a] > 0:
                    prev_arc[w] = a
                    queue.append(w)
        if prev_arc[t] == -1:
            return flow
        bottleneck = None
        v = t
        while v != s:
            a = prev_arc[v]
            bottleneck = caps[a] if bottleneck is None else min(bottleneck, caps[a])
            v = heads[a ^ 1]
        v = t
        while v != s:
            a = prev_arc[v]
            caps[a] -= bottleneck
            caps[a ^ 1] += bottleneck
            v = heads[a ^ 1]
        flow += bottleneck


def arc_connectivity(d: Digraph) -> int:
    """Directed arc connectivity by max-flow with unit capacities; loops
    excluded; 0 when not strongly connected or on fewer than 2 vertices."""
    if d.n < 2 or not strongly_connected(d):
        return 0
    arcs = [(t, h, 1) for t, h in d.arcs if t != h]
    best = None
    for v in range(1, d.n):
        for s, t in ((0, v), (v, 0)):
            value = _max_flow(d.n, arcs, s, t)
            best = value if best is None else min(best, value)
    return best


def vertex_connectivity(d: Digraph) -> int:
    """Directed vertex connectivity via vertex-split max-flow over all
    non-adjacent ordered pairs; n-1 when every ordered pair is adjacent."""
    if d.n < 2 or not strongly_connected(d):
        return 0
    n = d.n
    inf = n
    base_arcs = [(2 * t + 1, 2 * h, inf) for t, h in d.arcs if t != h]
    best = None
    for s in range(n):
        for t in range(n):
            if s == t or d.has_arc(s, t):
                continue
            arcs = list(base_arcs)
            arcs.extend((2 * v, 2 * v + 1, 1) for v in range(n) if v != s and v != t)
            value = _max_flow(2 * n, arcs, 2 * s + 1, 2 * t)
            best = value if best is None else min(best, value)
    return n - 1 if best is None else best


def _joint_refine(a: Digraph, b: Digraph) -> tuple[list[int], list[int]]:
    """Iterated in/out-degree + loop-flag + neighbor-signature refinement,
    run on both graphs together so color ids are comparable across them."""

    def canonicalize(xa: list, xb: list) -> tuple[list[int], list[int], int]:
        table = {sig: i for i, sig in enumerate(sorted(set(xa) | set(xb)))}
        return [table[s] for s in xa], [table[s] for s in xb], len(table)

    def signatures(d: Digraph, colors: list[int]) -> list[tuple]:
        return [
            (
                colors[v],
                tuple(sorted(colors[w] for w in d.out_neighbors(v))),
                tuple(sorted(colors[w] for w in d.in_neighbors(v))),
            )
            for v in range(d.n)
        ]

    ca, cb, count = canonicalize(
        [(a.out_degree(v), a.in_degree(v), a.has_arc(v, v)) for v in range(a.n)],
        [(b.out_degree(v), b.in_degree(v), b.has_arc(v, v)) for v in range(b.n)],
    )
    while True:
        na, nb, new_count = canonicalize(signatures(a, ca), signatures(b, cb))
        if new_count == count:
            return na, nb
        ca, cb, count = na, nb, new_count


def isomorphic(a: Digraph, b: Digraph, node_budget: int = DEFAULT_NODE_BUDGET) -> VertexMap | None:
    """Digraph isomorphism witness, or None.

    Backtracking over color classes from the degree/loop/neighbor-signature
    refinement, expanding along arcs of the already-mapped region first.  The
    search order is deterministic, so so is the witness.  Aborts with
    SearchBudgetError after node_budget candidate trials.
    """
    if a.n != b.n or a.arc_count != b.arc_count:
        return None
    n = a.n
    if n == 0:
        return VertexMap(())
    colors_a, colors_b = _joint_refine(a, b)
    if sorted(colors_a) != sorted(colors_b):
        return None
    class_b: dict[tuple, list[int]] = {}
    for v in range(n):
        class_b.setdefault(colors_b[v], []).append(v)
    class_size = {c: len(vs) for c, vs in class_b.items()}

    # Static order: grow along adjacency so every new vertex is constrained
    # by mapped neighbors; prefer small color classes, then small index.
    order: list[int] = []
    placed = [False] * n
    adjacency = [sorted(set(a.out_neighbors(v)) | set(a.in_neighbors(v))) for v in range(n)]
    attached = [0] * n
    for _ in range(n):
        pick = min(
            (v for v in range(n) if not placed[v]),
            key=lambda v: (-attached[v], class_size[colors_a[v]], v),
        )
        placed[pick] = True
        order.append(pick)
        for w in adjacency[pick]:
            if not placed[w]:
                attached[w] += 1

    mapping = [-1] * n
    used = [False] * n
    budget = node_budget

    def candidates(u: int) -> list[int]:
        opts = [x for x in class_b[colors_a[u]] if not used[x]]
        ok = []
        for x in opts:
            mapped_out = [w for w in a.out_neighbors(u) if mapping[w] != -1]
            mapped_in = [w for w in a.in_neighbors(u) if mapping[w] != -1]
            if any(not b.has_arc(x, mapping[w]) for w in mapped_out):
                continue
            if any(not b.has_arc(mapping[w], x) for w in mapped_in):
                continue
            back_out = sum(1 for y in b.out_neighbors(x) if y in image_set)
            back_in = sum(1 for y in b.in_neighbors(x) if y in image_set)
            if back_out != len(mapped_out) or back_in != len(mapped_in):
                continue
            ok.append(x)
        return ok

    image_set: set[int] = set()
    stack: list[tuple[int, list[int], int]] = [(order[0], candidates(order[0]), 0)]
    while stack:
        u, cands, ci = stack[-1]
        if ci >= len(cands):
            stack.pop()
            if stack:
                pu, _, _ = stack[-1]
                x = mapping[pu]
                used[x] = False
                image_set.discard(x)
                mapping[pu] = -1
                stack[-1] = (stack[-1][0], stack[-1][1], stack[-1][2] + 1)
            continue
        budget -= 1
        if budget < 0:
            raise SearchBudgetError(f"isomorphism search exceeded {node_budget} nodes")
        x = cands[ci]
        mapping[u] = x
        used[x] = True
        image_set.add(x)
        depth = len(stack)
        if depth == n:
            return VertexMap(tuple(mapping))
        nxt = order[depth]
        stack.append((nxt, candidates(nxt), 0))
    return None


@dataclass(frozen=True)
class AnalysisReport:
    """Topology metrics bundle for one digraph."""

    order: int
    size: int
    regular_degree: int | None
    strongly_connected: bool
    diameter: int | float
    articulation_points: tuple[int, ...]
    bridges: tuple[tuple[int, int], ...]
    vertex_connectivity: int
    arc_connectivity: int
    is_line_digraph: bool

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "size": self.size,
            "regular_degree": self.regular_degree,
            "strongly_connected": self.strongly_connected,
            "diameter": None if self.diameter == math.inf else self.diameter,
            "articulation_points": list(self.articulation_points),
            "bridges": [list(b) for b in self.bridges],
            "vertex_connectivity": self.vertex_connectivity,
            "arc_connectivity": self.arc_connectivity,
            "is_line_digraph": self.is_line_digraph,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def analyze(d: Digraph) -> AnalysisReport:
    """Aggregate every metric above into one report."""
    points, bridges = underlying_cut_analysis(d)
    return AnalysisReport(
        order=d.n,
        size=d.arc_count,
        regular_degree=d.regular_degree(),
        strongly_connected=strongly_connected(d),
        diameter=diameter(d),
        articulation_points=tuple(points),
        bridges=tuple(bridges),
        vertex_connectivity=vertex_connectivity(d),
        arc_connectivity=arc_connectivity(d),
        is_line_digraph=is_line_digraph(d)[0],
    )
