"""The diagonal-union composition and its unitary weighting.

Depth 1 composes a factorization F = {H_1..H_k} of a digraph D on n vertices
into a digraph on k*n vertices whose adjacency matrix is
(J_k (x) I_n) . (M(H_1) (+) ... (+) M(H_k)): every block-row is
[M(H_1) | ... | M(H_k)].  Deeper levels re-factor the previous level into the
k summands picked out by the cyclic shift matrices of Z_k under the blockwise
Hadamard product, and compose again.

The identity factor in the iteration is sized to the previous level
(k^(d-1) * n); the naive reading n^(d-1) is dimensionally inconsistent
whenever k != n.

Two routes are maintained for the composition: a direct arc rule and the
literal matrix formula.  They are cross-checked whenever the result is small
enough for dense products (DENSE_CHECK_LIMIT vertices); products of 0/1
matrices are verified to stay 0/1 before thresholding.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .digraph import Digraph, adjacency_matrix, from_matrix, vertex_limit, VertexLimitError
from .factorization import Factorization, require_valid
from .matrices import (
    PermutationMatrix,
    direct_sum,
    fourier,
    generalized_hadamard,
    is_unitary,
    kronecker,
    rho_reg_zk,
    SUPPORT_TOL,
    UNITARY_TOL,
)

# Largest size at which the literal kron/matmul formula is replayed as a check.
DENSE_CHECK_LIMIT = 1024


class NonPermutationSummandError(ValueError):
    """Operation requires a cycle factorization (all factors 1-regular)."""


class CouplingNotUnitaryError(ValueError):
    """The coupling matrix fails the unitarity test."""


class DenseSupportError(ValueError):
    """The coupling matrix has a (near-)zero entry, which would shrink support."""


@dataclass(frozen=True)
class DiagonalUnionResult:
    """Composed digraph plus the block bookkeeping.

    Vertex (copy j, previous-level vertex i) sits at index j * block_size + i;
    labels[v] is that (copy, inner) pair.  At depth 1 the inner index is a
    base vertex, so the encoding reads j * n + i.
    """

    digraph: Digraph
    depth: int
    block_size: int
    factor_count: int
    labels: tuple[tuple[int, int], ...]

    def coordinates(self, v: int) -> tuple[int, ...]:
        """Full coordinate tower (copy_d, ..., copy_1, base vertex) of v."""
        k = self.factor_count
        size = self.block_size
        coords = []
        for _ in range(self.depth):
            copy, v = divmod(v, size)
            coords.append(copy)
            size //= k
        coords.append(v)
        return tuple(coords)


def _compose_arcs(prev: Digraph, factors_arcs: list[tuple[tuple[int, int], ...]]) -> Digraph:
    """Arc rule: (j*s + u) -> (j'*s + v) iff (u, v) is an arc of factor j'."""
    s = prev.n
    k = len(factors_arcs)
    arcs = []
    for jp, arcset in enumerate(factors_arcs):
        for u, v in arcset:
            arcs.extend((j * s + u, jp * s + v) for j in range(k))
    return Digraph(k * s, tuple(arcs))


def _compose_matrix(factor_mats: list[np.ndarray]) -> Digraph:
    """Literal formula (J_k (x) I_s) . (+) M_j, thresholded back to 0/1."""
    k = len(factor_mats)
    s = factor_mats[0].shape[0]
    product = kronecker(np.ones((k, k)), np.eye(s)) @ direct_sum(factor_mats)
    if product.size and np.max(np.abs(product)) > 1.0 + SUPPORT_TOL:
        raise RuntimeError("composition produced an entry above 1; factors were not arc-disjoint")
    return from_matrix(product, tol=0.5)


def diagonal_union(f: Factorization) -> DiagonalUnionResult:
    """Depth-1 diagonal union of a validated factorization."""
    require_valid(f)
    k, n = f.k, f.base.n
    if k * n > vertex_limit():
        raise VertexLimitError(f"diagonal union needs {k * n} vertices; limit is {vertex_limit()}")
    result = _compose_arcs(f.base, [h.arcs for h in f.factors])
    if result.n <= DENSE_CHECK_LIMIT:
        by_matrix = _compose_matrix([adjacency_matrix(h) for h in f.factors])
        if by_matrix != result:
            raise RuntimeError("matrix route and arc rule disagree on the diagonal union")
    labels = tuple((j, i) for j in range(k) for i in range(n))
    return DiagonalUnionResult(result, 1, n, k, labels)


def _level_factors(prev: Digraph, k: int) -> list[tuple[tuple[int, int], ...]]:
    """Arc sets of the k summands rho(j) o_G M(prev), grouped by shift j.

    Viewing prev (size s, k | s) as k x k blocks of size s/k, the summand j
    keeps exactly the arcs whose block displacement is j.
    """
    bs = prev.n // k
    buckets: list[list[tuple[int, int]]] = [[] for _ in range(k)]
    for u, v in prev.arcs:
        buckets[(v // bs - u // bs) % k].append((u, v))
    return [tuple(b) for b in buckets]


def diagonal_union_depth(f: Factorization, depth: int) -> DiagonalUnionResult:
    """Iterated diagonal union; depth 1 is diagonal_union(f)."""
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    require_valid(f)
    k, n = f.k, f.base.n
    if k**depth * n > vertex_limit():
        raise VertexLimitError(
            f"depth-{depth} diagonal union needs {k**depth * n} vertices; limit is {vertex_limit()}"
        )
    level = diagonal_union(f)
    current = level.digraph
    for _ in range(2, depth + 1):
        factors_arcs = _level_factors(current, k)
        nxt = _compose_arcs(current, factors_arcs)
        if nxt.n <= DENSE_CHECK_LIMIT:
            prev_mat = adjacency_matrix(current)
            summands = [generalized_hadamard(rho_reg_zk(k, j).to_dense(), prev_mat) for j in range(k)]
            if _compose_matrix(summands) != nxt:
                raise RuntimeError("matrix route and arc rule disagree on the level step")
        current = nxt
    block = k ** (depth - 1) * n
    labels = tuple((j, i) for j in range(k) for i in range(block))
    return DiagonalUnionResult(current, depth, block, k, labels)


def _require_cycle_factors(f: Factorization) -> None:
    for i, h in enumerate(f.factors):
        if h.regular_degree() != 1:
            raise NonPermutationSummandError(f"factor {i} is not a spanning 1-regular subdigraph")


def induced_cycle_factors(f: Factorization, depth: int) -> list[PermutationMatrix]:
    """The k permutation summands whose diagonal union is level `depth`.

    At depth 1 these are the base factors themselves; deeper, they are the
    shift-j blockwise-Hadamard summands of the previous level, which stay
    permutations exactly when the base factorization is a cycle factorization.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    require_valid(f)
    _require_cycle_factors(f)
    if depth == 1:
        perms = []
        for h in f.factors:
            image = [-1] * h.n
            for u, v in h.arcs:
                image[u] = v
            perms.append(PermutationMatrix(tuple(image)))
        return perms
    prev = diagonal_union_depth(f, depth - 1).digraph
    perms = []
    for arcset in _level_factors(prev, f.k):
        image = [-1] * prev.n
        for u, v in arcset:
            if image[u] != -1:
                raise RuntimeError(f"summand not 1-regular at vertex {u}")
            image[u] = v
        perms.append(PermutationMatrix(tuple(image)))
    return perms


def _require_coupling(c, k: int) -> np.ndarray:
    coupling = np.asarray(c, dtype=complex)
    if coupling.shape != (k, k):
        raise ValueError(f"coupling must be {k} x {k}, got shape {coupling.shape}")
    ok, residual = is_unitary(coupling, UNITARY_TOL)
    if not ok:
        raise CouplingNotUnitaryError(f"coupling fails unitarity with residual {residual:.3e}")
    smallest = float(np.min(np.abs(coupling)))
    if smallest <= SUPPORT_TOL:
        raise DenseSupportError(f"coupling entry of modulus {smallest:.3e} would shrink the support")
    return coupling


def unitary_weighting(f: Factorization, depth: int, coupling=None) -> np.ndarray:
    """Unitary matrix supported exactly on the depth-d diagonal union.

    U = (C (x) I) . (Q_0 (+) ... (+) Q_{k-1}) with Q_j the induced cycle
    factors at this depth and C a dense-support unitary coupling (Fourier by
    default).  A product of unitaries, hence unitary; the coupling's dense
    support keeps every block's permutation pattern in the support.
    """
    perms = induced_cycle_factors(f, depth)
    coupling = _require_coupling(fourier(f.k) if coupling is None else coupling, f.k)
    block = perms[0].size
    return kronecker(coupling, np.eye(block)) @ direct_sum([q.to_dense() for q in perms])


def couple_unitary_factors(factor_mats, coupling=None) -> np.ndarray:
    """Depth-1 weighting from arbitrary unitary factor matrices.

    The factors' supports must be pairwise arc-disjoint (so they factorize
    their union); the result (C (x) I_n) . (+) V_j is unitary and supported
    on the diagonal union of those supports, provided no product |C_ab*V_uv|
    dips under the support threshold.
    """
    mats = [np.asarray(v, dtype=complex) for v in factor_mats]
    if not mats:
        raise ValueError("need at least one factor matrix")
    n = mats[0].shape[0]
    supports = []
    for i, v in enumerate(mats):
        if v.shape != (n, n):
            raise ValueError(f"factor {i} has shape {v.shape}, expected {(n, n)}")
        ok, residual = is_unitary(v, UNITARY_TOL)
        if not ok:
            raise CouplingNotUnitaryError(f"factor {i} fails unitarity with residual {residual:.3e}")
        supports.append(from_matrix(v, SUPPORT_TOL).arc_set)
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            overlap = supports[i] & supports[j]
            if overlap:
                raise ValueError(f"factors {i} and {j} share support arc {sorted(overlap)[0]}")
    coupling = _require_coupling(fourier(len(mats)) if coupling is None else coupling, len(mats))
    return kronecker(coupling, np.eye(n)) @ direct_sum(mats)
