"""Factorizations of digraphs: validation, the trivial factorization, explicit
factor lists given as matrices, and decomposition of k-regular digraphs into
k cycle factors (arc-disjoint spanning permutations).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .digraph import Arc, Digraph, adjacency_matrix, from_json as graph_from_json, to_json as graph_to_json


class FactorizationError(ValueError):
    """The factor list violates the spanning/partition invariants."""


class NotRegularError(ValueError):
    """Cycle factorization requested for a digraph that is not k-regular."""


class MatchingFailedError(RuntimeError):
    """Internal: perfect matching failed on a regular bipartite graph."""


@dataclass(frozen=True)
class Factorization:
    """Ordered decomposition of base into spanning, arc-disjoint factors.

    Order is significant: it fixes the block order of the diagonal union.
    Invalid factor lists are representable; validate() reports violations.
    """

    base: Digraph
    factors: tuple[Digraph, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def k(self) -> int:
        return len(self.factors)


def validate(f: Factorization) -> str | None:
    """None when f is a valid factorization, else the first violation found."""
    if f.k == 0:
        return "factorization has no factors"
    seen: dict[Arc, int] = {}
    for i, h in enumerate(f.factors):
        if h.n != f.base.n:
            return f"factor {i} spans {h.n} vertices, base has {f.base.n}"
        for a in h.arcs:
            if a not in f.base.arc_set:
                return f"factor {i} uses arc {a} not in the base digraph"
            if a in seen:
                return f"arc {a} covered twice (factors {seen[a]} and {i})"
            seen[a] = i
    if len(seen) != f.base.arc_count:
        missing = next(a for a in f.base.arcs if a not in seen)
        return f"arc {missing} of the base is not covered by any factor"
    return None


def require_valid(f: Factorization) -> None:
    report = validate(f)
    if report is not None:
        raise FactorizationError(report)


def trivial(d: Digraph) -> Factorization:
    """The one-factor factorization {D}."""
    return Factorization(d, (d,))


def _augment(start: int, adj: Sequence[Sequence[int]], match_r: list[int], seen: list[bool]) -> list[tuple[int, int]] | None:
    """One augmenting-path search; returns the (tail, head) edges to flip."""
    stack = [(start, iter(adj[start]))]
    via: list[tuple[int, int]] = []
    while stack:
        u, it = stack[-1]
        advanced = False
        for v in it:
            if seen[v]:
                continue
            seen[v] = True
            via.append((u, v))
            if match_r[v] < 0:
                return via
            stack.append((match_r[v], iter(adj[match_r[v]])))
            advanced = True
            break
        if not advanced:
            stack.pop()
            if via:
                via.pop()
    return None


def _perfect_matching(n: int, adj: Sequence[Sequence[int]]) -> list[int]:
    """Perfect matching tails -> heads by augmenting paths, ascending order."""
    match_l = [-1] * n
    match_r = [-1] * n
    for u in range(n):
        path = _augment(u, adj, match_r, [False] * n)
        if path is None:
            raise MatchingFailedError(f"no augmenting path from vertex {u}")
        for a, b in path:
            match_l[a] = b
            match_r[b] = a
    return match_l


def cycle_factorization(d: Digraph) -> Factorization:
    """Decompose a k-regular digraph into k spanning 1-regular factors.

    Each factor's adjacency matrix is a permutation matrix.  Factors are
    discovered by k rounds of bipartite perfect matching on the remaining
    arcs, scanning vertices in ascending order, so the result is
    deterministic for a fixed input.
    """
    k = d.regular_degree()
    if k is None:
        degrees = sorted({(d.out_degree(v), d.in_degree(v)) for v in range(d.n)})
        raise NotRegularError(f"digraph is not regular: degree pairs {degrees}")
    if k == 0:
        raise NotRegularError("digraph has no arcs; a factorization needs at least one factor")
    remaining = [list(d.out_neighbors(v)) for v in range(d.n)]
    factors = []
    for _ in range(k):
        match = _perfect_matching(d.n, remaining)
        factors.append(Digraph(d.n, tuple((u, match[u]) for u in range(d.n))))
        for u in range(d.n):
            remaining[u].remove(match[u])
    f = Factorization(d, tuple(factors))
    require_valid(f)
    return f


def factor_from_matrices(d: Digraph, mats: Sequence) -> Factorization:
    """Factorization from explicit 0/1 factor matrices; their entrywise sum
    must equal the adjacency matrix of d."""
    arrays = [np.asarray(m, dtype=complex) for m in mats]
    for i, a in enumerate(arrays):
        if a.shape != (d.n, d.n):
            raise FactorizationError(f"factor matrix {i} has shape {a.shape}, expected {(d.n, d.n)}")
    total = sum(arrays) if arrays else np.zeros((d.n, d.n), dtype=complex)
    if not np.array_equal(total, adjacency_matrix(d)):
        raise FactorizationError("factor matrices do not sum to the adjacency matrix")
    factors = []
    for a in arrays:
        rows, cols = np.nonzero(np.abs(a) > 0.5)
        factors.append(Digraph(d.n, tuple(zip(rows.tolist(), cols.tolist()))))
    f = Factorization(d, tuple(factors))
    require_valid(f)
    return f


def reorder(f: Factorization, order: Sequence[int]) -> Factorization:
    """Permute the factor list; the diagonal union's block order follows it."""
    if sorted(order) != list(range(f.k)):
        raise ValueError(f"order must be a permutation of 0..{f.k - 1}")
    return Factorization(f.base, tuple(f.factors[i] for i in order))


def to_json(f: Factorization) -> str:
    """Factorization JSON: {"base": <graph>, "factors": [[[t, h], ...], ...]}."""
    return json.dumps(
        {
            "base": {"n": f.base.n, "arcs": [list(a) for a in f.base.arcs]},
            "factors": [[list(a) for a in h.arcs] for h in f.factors],
        }
    )


def from_json(text: str) -> Factorization:
    obj = json.loads(text)
    if not isinstance(obj, dict) or "base" not in obj or "factors" not in obj:
        raise ValueError('factorization JSON must be an object with "base" and "factors"')
    base = graph_from_json(json.dumps(obj["base"]))
    factors = tuple(Digraph(base.n, tuple((t, h) for t, h in arcs)) for arcs in obj["factors"])
    return Factorization(base, factors)
