"""Line digraphs and state splits (symbolic dynamics), plus the partition
machinery that ties splits to diagonal unions.

An in-split with the partition induced by a factorization reproduces the
diagonal union arc-for-arc under the class-major labeling: the head copy of
a new arc is the class (= factor) of the underlying arc, and the tail ranges
over every copy of the old tail.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .digraph import Arc, Digraph, VertexMap, vertex_limit, VertexLimitError
from .factorization import Factorization, require_valid


class PartitionError(ValueError):
    """The arc partition does not cover the declared side of the digraph."""


@dataclass(frozen=True)
class LineDigraphResult:
    """Line digraph plus the arc each new vertex stands for."""

    digraph: Digraph
    vertex_arcs: tuple[Arc, ...]


@dataclass(frozen=True)
class ArcPartition:
    """Per-vertex ordered classes of incident arcs on one side.

    mode "in" partitions each vertex's incoming arcs, "out" its outgoing
    arcs.  Empty classes are permitted, so factor-induced partitions keep
    exactly k classes at every vertex.
    """

    mode: str
    classes: tuple[tuple[tuple[Arc, ...], ...], ...]

    def __post_init__(self) -> None:
        if self.mode not in ("in", "out"):
            raise PartitionError(f'mode must be "in" or "out", got {self.mode!r}')
        canon = tuple(
            tuple(tuple(sorted((int(t), int(h)) for t, h in cls)) for cls in per_vertex)
            for per_vertex in self.classes
        )
        object.__setattr__(self, "classes", canon)

    def m(self, v: int) -> int:
        return len(self.classes[v])


@dataclass(frozen=True)
class SplitResult:
    """State split graph with both labelings.

    digraph uses base-major indexing: copy j of base vertex i sits at
    offset(i) + j with offsets by ascending base vertex.  vertex_labels[x]
    is that (base vertex, class index) pair.  class_major relabels to the
    class-major order (sorted by class first), which is the labeling under
    which factor-induced in-splits equal the diagonal union.
    """

    digraph: Digraph
    vertex_labels: tuple[tuple[int, int], ...]
    class_major: VertexMap

    def class_major_digraph(self) -> Digraph:
        return self.class_major.apply(self.digraph)


def validate_partition(d: Digraph, p: ArcPartition) -> str | None:
    """None when p partitions the declared side of every vertex of d."""
    if len(p.classes) != d.n:
        return f"partition lists {len(p.classes)} vertices, digraph has {d.n}"
    for v in range(d.n):
        per = p.classes[v]
        if not per:
            return f"vertex {v} has no classes (m(v) must be >= 1)"
        incident = set()
        for cls in per:
            for a in cls:
                if a not in d.arc_set:
                    return f"vertex {v} lists arc {a} not in the digraph"
                side_ok = a[1] == v if p.mode == "in" else a[0] == v
                if not side_ok:
                    return f"arc {a} is not an {p.mode}-arc of vertex {v}"
                if a in incident:
                    return f"arc {a} appears in two classes at vertex {v}"
                incident.add(a)
        expected = {(t, v) for t in d.in_neighbors(v)} if p.mode == "in" else {(v, h) for h in d.out_neighbors(v)}
        if incident != expected:
            missing = sorted(expected - incident)[0]
            return f"arc {missing} at vertex {v} is not assigned to any class"
    return None


def state_split(d: Digraph, p: ArcPartition) -> SplitResult:
    """Split every vertex into one copy per class of its declared-side arcs.

    Out mode: an arc (h, l) in outgoing class c at h yields arcs from copy c
    of h to every copy of l.  In mode (the dual): an arc in incoming class c
    at l yields arcs from every copy of h to copy c of l.
    """
    report = validate_partition(d, p)
    if report is not None:
        raise PartitionError(report)
    m = [p.m(v) for v in range(d.n)]
    offsets = [0] * d.n
    for v in range(1, d.n):
        offsets[v] = offsets[v - 1] + m[v - 1]
    total = offsets[-1] + m[-1] if d.n else 0
    _check = vertex_limit()
    if total > _check:
        raise VertexLimitError(f"state split needs {total} vertices; limit is {_check}")

    class_of: dict[Arc, int] = {}
    for v in range(d.n):
        for c, cls in enumerate(p.classes[v]):
            for a in cls:
                class_of[a] = c
    arcs = []
    for t, h in d.arcs:
        c = class_of[(t, h)]
        if p.mode == "in":
            arcs.extend((offsets[t] + j, offsets[h] + c) for j in range(m[t]))
        else:
            arcs.extend((offsets[t] + c, offsets[h] + j) for j in range(m[h]))
    labels = tuple((v, c) for v in range(d.n) for c in range(m[v]))
    by_class = sorted(range(total), key=lambda x: (labels[x][1], labels[x][0]))
    rank = [0] * total
    for r, x in enumerate(by_class):
        rank[x] = r
    return SplitResult(Digraph(total, tuple(arcs)), labels, VertexMap(tuple(rank)))


def partition_from_factorization(f: Factorization, mode: str) -> ArcPartition:
    """Class j at each vertex = that vertex's declared-side arcs of factor j.

    Empty classes are kept, so every vertex gets exactly k copies and the
    split lines up with the k*n vertices of the diagonal union.
    """
    require_valid(f)
    n = f.base.n
    classes = []
    for v in range(n):
        per = []
        for h in f.factors:
            if mode == "in":
                per.append(tuple((t, v) for t in h.in_neighbors(v)))
            else:
                per.append(tuple((v, w) for w in h.out_neighbors(v)))
        classes.append(tuple(per))
    return ArcPartition(mode, tuple(classes))


def line_digraph(d: Digraph) -> LineDigraphResult:
    """Line digraph: vertices are the arcs of d in canonical order, with an
    arc a -> b exactly when head(a) = tail(b)."""
    _check_size(len(d.arcs))
    index_by_tail: list[list[int]] = [[] for _ in range(d.n)]
    for i, (t, _h) in enumerate(d.arcs):
        index_by_tail[t].append(i)
    arcs = []
    for i, (_t, h) in enumerate(d.arcs):
        arcs.extend((i, j) for j in index_by_tail[h])
    return LineDigraphResult(Digraph(len(d.arcs), tuple(arcs)), d.arcs)


def _check_size(n: int) -> None:
    limit = vertex_limit()
    if n > limit:
        raise VertexLimitError(f"line digraph needs {n} vertices; limit is {limit}")


def iterated_line_digraph(d: Digraph, t: int) -> Digraph:
    """t-fold line digraph; t = 0 returns d unchanged."""
    if t < 0:
        raise ValueError(f"iteration count must be >= 0, got {t}")
    for _ in range(t):
        d = line_digraph(d).digraph
    return d


def is_line_digraph(d: Digraph) -> tuple[bool, tuple[int, int] | None]:
    """Multidigraph line-digraph criterion: every vertex pair has equal-or-
    disjoint out-neighborhoods and equal-or-disjoint in-neighborhoods.
    Returns (False, offending pair) on failure."""
    outs = [frozenset(d.out_neighbors(v)) for v in range(d.n)]
    ins = [frozenset(d.in_neighbors(v)) for v in range(d.n)]
    for u in range(d.n):
        for v in range(u + 1, d.n):
            if outs[u] != outs[v] and outs[u] & outs[v]:
                return False, (u, v)
            if ins[u] != ins[v] and ins[u] & ins[v]:
                return False, (u, v)
    return True, None


def partition_to_json(p: ArcPartition) -> str:
    """Partition JSON: {"mode": ..., "classes": {"<v>": [[[t, h], ...], ...]}}."""
    return json.dumps(
        {
            "mode": p.mode,
            "classes": {str(v): [[list(a) for a in cls] for cls in per] for v, per in enumerate(p.classes)},
        }
    )


def partition_from_json(text: str, d: Digraph) -> ArcPartition:
    obj = json.loads(text)
    if not isinstance(obj, dict) or "mode" not in obj or "classes" not in obj:
        raise ValueError('partition JSON must be an object with "mode" and "classes"')
    classes = []
    for v in range(d.n):
        key = str(v)
        if key not in obj["classes"]:
            raise ValueError(f"partition JSON is missing vertex {v}")
        classes.append(tuple(tuple((t, h) for t, h in cls) for cls in obj["classes"][key]))
    return ArcPartition(obj["mode"], tuple(classes))
