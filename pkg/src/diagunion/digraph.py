"""Digraph value type, generators for the standard families, and matrix conversion.

Vertices are dense integer indices 0..n-1.  Arcs are ordered (tail, head)
pairs; loops are allowed, parallel arcs are not.  All constructors are
deterministic: the arc list is kept in sorted order so serialization and
fixtures are byte-reproducible.
"""
from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

Arc = tuple[int, int]

DEFAULT_VERTEX_LIMIT = 65536


class VertexLimitError(ValueError):
    """A construction would exceed the configured vertex limit."""


def vertex_limit() -> int:
    """Current cap on constructed vertex counts (env DUNION_VERTEX_LIMIT)."""
    return int(os.environ.get("DUNION_VERTEX_LIMIT", DEFAULT_VERTEX_LIMIT))


def _check_limit(n: int, what: str) -> None:
    limit = vertex_limit()
    if n > limit:
        raise VertexLimitError(f"{what} needs {n} vertices; limit is {limit}")


@dataclass(frozen=True)
class Digraph:
    """Immutable simple digraph on vertices 0..n-1 with loops permitted."""

    n: int
    arcs: tuple[Arc, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 0:
            raise ValueError(f"vertex count must be a non-negative int, got {self.n!r}")
        arcs = tuple(sorted((int(t), int(h)) for t, h in self.arcs))
        for t, h in arcs:
            if not (0 <= t < self.n and 0 <= h < self.n):
                raise ValueError(f"arc ({t}, {h}) out of range for {self.n} vertices")
        if len(set(arcs)) != len(arcs):
            dup = next(a for i, a in enumerate(arcs) if i and arcs[i - 1] == a)
            raise ValueError(f"parallel arc {dup} is not allowed")
        object.__setattr__(self, "arcs", arcs)

    @cached_property
    def arc_set(self) -> frozenset[Arc]:
        return frozenset(self.arcs)

    @cached_property
    def _out(self) -> tuple[tuple[int, ...], ...]:
        nbr: list[list[int]] = [[] for _ in range(self.n)]
        for t, h in self.arcs:
            nbr[t].append(h)
        return tuple(tuple(v) for v in nbr)

    @cached_property
    def _in(self) -> tuple[tuple[int, ...], ...]:
        nbr: list[list[int]] = [[] for _ in range(self.n)]
        for t, h in self.arcs:
            nbr[h].append(t)
        return tuple(tuple(sorted(v)) for v in nbr)

    def out_neighbors(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def in_neighbors(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def out_degree(self, v: int) -> int:
        return len(self._out[v])

    def in_degree(self, v: int) -> int:
        return len(self._in[v])

    def has_arc(self, tail: int, head: int) -> bool:
        return (tail, head) in self.arc_set

    @property
    def arc_count(self) -> int:
        return len(self.arcs)

    def regular_degree(self) -> int | None:
        """k when every in- and out-degree equals k (loops counted), else None."""
        if self.n == 0:
            return None
        k = self.out_degree(0)
        for v in range(self.n):
            if self.out_degree(v) != k or self.in_degree(v) != k:
                return None
        return k


@dataclass(frozen=True)
class VertexMap:
    """Bijection on 0..n-1, used as a relabeling or isomorphism witness."""

    forward: tuple[int, ...]

    def __post_init__(self) -> None:
        forward = tuple(int(v) for v in self.forward)
        n = len(forward)
        if sorted(forward) != list(range(n)):
            raise ValueError("forward image is not a bijection on [0, n)")
        object.__setattr__(self, "forward", forward)

    @property
    def n(self) -> int:
        return len(self.forward)

    def __call__(self, v: int) -> int:
        return self.forward[v]

    def inverse(self) -> "VertexMap":
        inv = [0] * self.n
        for i, v in enumerate(self.forward):
            inv[v] = i
        return VertexMap(tuple(inv))

    def apply(self, d: Digraph) -> Digraph:
        """Relabel d, sending vertex v to forward[v]."""
        if d.n != self.n:
            raise ValueError(f"map on {self.n} vertices applied to digraph on {d.n}")
        return Digraph(d.n, tuple((self.forward[t], self.forward[h]) for t, h in d.arcs))


def adjacency_matrix(d: Digraph) -> np.ndarray:
    """n x n 0/1 matrix with entry (i, j) = 1 iff arc (i, j) exists (row = tail)."""
    m = np.zeros((d.n, d.n), dtype=complex)
    for t, h in d.arcs:
        m[t, h] = 1.0
    return m


def from_matrix(m: np.ndarray, tol: float = 1e-9) -> Digraph:
    """Support digraph of a square matrix: arc (i, j) iff |m[i, j]| > tol."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"support digraph needs a square matrix, got shape {m.shape}")
    rows, cols = np.nonzero(np.abs(m) > tol)
    return Digraph(m.shape[0], tuple(zip(rows.tolist(), cols.tolist())))


def complete_with_loops(n: int) -> Digraph:
    """Complete symmetric digraph with a loop at every vertex (all n^2 arcs)."""
    if n < 1:
        raise ValueError("complete digraph needs at least one vertex")
    _check_limit(n, "complete digraph")
    return Digraph(n, tuple((i, j) for i in range(n) for j in range(n)))


def cayley_zn(n: int, gens: Iterable[int]) -> Digraph:
    """Cayley digraph of Z_n: arcs i -> (i + s) mod n for each generator s."""
    if n < 1:
        raise ValueError("cayley_zn needs n >= 1")
    _check_limit(n, "Cayley digraph")
    s_set = sorted({int(s) for s in gens})
    for s in s_set:
        if not (0 <= s < n):
            raise ValueError(f"generator {s} outside [0, {n})")
    return Digraph(n, tuple((i, (i + s) % n) for i in range(n) for s in s_set))


def de_bruijn(b: int, m: int) -> Digraph:
    """de Bruijn digraph B(b, m): length-m words over b symbols, arcs shift left.

    A word w_1..w_m is encoded big-endian as an integer in base b, so the
    canonical vertex order is the numeric word order.
    """
    if b < 2:
        raise ValueError("de Bruijn digraph needs alphabet size b >= 2")
    if m < 1:
        raise ValueError("de Bruijn digraph needs word length m >= 1")
    n = b**m
    _check_limit(n, f"de Bruijn digraph B({b},{m})")
    shift = b ** (m - 1)
    arcs = []
    for v in range(n):
        prefix = (v % shift) * b
        arcs.extend((v, prefix + c) for c in range(b))
    return Digraph(n, tuple(arcs))


def de_bruijn_word(v: int, b: int, m: int) -> str:
    """Word label for de Bruijn vertex v (digits, comma-separated when b > 10)."""
    digits = []
    for _ in range(m):
        digits.append(v % b)
        v //= b
    digits.reverse()
    sep = "" if b <= 10 else ","
    return sep.join(str(x) for x in digits)


def random_regular(n: int, k: int, seed: int) -> Digraph:
    """Random k-in/k-out-regular digraph: union of k arc-disjoint permutations.

    Permutations are drawn by rejection, so the result is deterministic for a
    fixed seed.  Loops are allowed; k > n is infeasible without parallel arcs.
    """
    if n < 1 or k < 1:
        raise ValueError("random_regular needs n >= 1 and k >= 1")
    if k > n:
        raise ValueError(f"k={k} > n={n} would force parallel arcs")
    _check_limit(n, "random regular digraph")
    rng = random.Random(seed)
    used: set[Arc] = set()
    budget = 1000 * k
    found = 0
    while found < k:
        if budget <= 0:
            raise RuntimeError(f"rejection budget exhausted at {found}/{k} permutations")
        budget -= 1
        perm = list(range(n))
        rng.shuffle(perm)
        arcs = [(i, perm[i]) for i in range(n)]
        if any(a in used for a in arcs):
            continue
        used.update(arcs)
        found += 1
    return Digraph(n, tuple(used))


def to_json(d: Digraph) -> str:
    """Canonical graph JSON: {"n": <int>, "arcs": [[t, h], ...]} sorted lexicographically."""
    return json.dumps({"n": d.n, "arcs": [list(a) for a in d.arcs]})


def from_json(text: str) -> Digraph:
    """Parse graph JSON produced by to_json (tolerant of arc order)."""
    obj = json.loads(text)
    if not isinstance(obj, dict) or "n" not in obj or "arcs" not in obj:
        raise ValueError('graph JSON must be an object with "n" and "arcs"')
    return Digraph(obj["n"], tuple((t, h) for t, h in obj["arcs"]))
