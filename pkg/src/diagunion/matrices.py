"""Dense complex matrix kernels: entrywise and blockwise products, Kronecker
and direct sums, cyclic-shift permutation representations, and unitarity tests.

Everything here works on plain numpy arrays (complex128).  Sizes are desk
scale, so dense kernels are used throughout.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

UNITARY_TOL = 1e-10
SUPPORT_TOL = 1e-9


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got ndim={a.ndim}")
    return a


def _as_square(m) -> np.ndarray:
    a = _as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def hadamard(n_mat, m_mat) -> np.ndarray:
    """Entrywise (Schur) product of two equal-shape matrices."""
    a, b = _as_matrix(n_mat), _as_matrix(m_mat)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return a * b


def generalized_hadamard(n_mat, m_mat) -> np.ndarray:
    """Blockwise scaling of an m x m matrix by an n x n matrix, n | m.

    With r = m/n, the (i, j) block of size r x r is multiplied by the scalar
    n_mat[i, j]; r = 1 reduces to the plain entrywise product.
    """
    small, big = _as_square(n_mat), _as_square(m_mat)
    n, m = small.shape[0], big.shape[0]
    if n == 0:
        raise ValueError("scaling matrix must be non-empty")
    if m % n:
        raise ValueError(f"size {n} does not divide size {m}")
    r = m // n
    if r == 1:
        return small * big
    blocks = big.reshape(n, r, n, r)
    return (blocks * small[:, None, :, None]).reshape(m, m)


def kronecker(n_mat, m_mat) -> np.ndarray:
    """Kronecker product: block (i, j) is n_mat[i, j] * m_mat."""
    return np.kron(_as_matrix(n_mat), _as_matrix(m_mat))


def direct_sum(mats: Iterable) -> np.ndarray:
    """Block-diagonal stacking of square matrices in list order ([] -> 0 x 0)."""
    blocks = [_as_square(m) for m in mats]
    total = sum(b.shape[0] for b in blocks)
    out = np.zeros((total, total), dtype=complex)
    at = 0
    for b in blocks:
        s = b.shape[0]
        out[at : at + s, at : at + s] = b
        at += s
    return out


@dataclass(frozen=True)
class PermutationMatrix:
    """Permutation matrix stored as the column index of the 1 in each row."""

    image: tuple[int, ...]

    def __post_init__(self) -> None:
        image = tuple(int(v) for v in self.image)
        if sorted(image) != list(range(len(image))):
            raise ValueError("image is not a bijection on [0, n)")
        object.__setattr__(self, "image", image)

    @property
    def size(self) -> int:
        return len(self.image)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.size, self.size), dtype=complex)
        for i, j in enumerate(self.image):
            out[i, j] = 1.0
        return out

    @classmethod
    def from_dense(cls, m, tol: float = SUPPORT_TOL) -> "PermutationMatrix":
        """Read a permutation pattern off a dense matrix; reject anything else."""
        a = _as_square(m)
        image = []
        for i in range(a.shape[0]):
            ones = [j for j in range(a.shape[1]) if abs(a[i, j] - 1.0) <= tol]
            rest = [j for j in range(a.shape[1]) if j not in ones and abs(a[i, j]) > tol]
            if len(ones) != 1 or rest:
                raise ValueError(f"row {i} is not a permutation row")
            image.append(ones[0])
        return cls(tuple(image))


def rho_reg_zk(k: int, l: int) -> PermutationMatrix:
    """Regular permutation representation of Z_k at element l: 1 at (i, (i+l) mod k)."""
    if not (0 <= l < k):
        raise ValueError(f"element {l} outside Z_{k}")
    return PermutationMatrix(tuple((i + l) % k for i in range(k)))


def is_unitary(u, tol: float = UNITARY_TOL) -> tuple[bool, float]:
    """Check U†U = I in max norm; returns (ok, residual)."""
    a = _as_square(u)
    gram = a.conj().T @ a
    residual = float(np.max(np.abs(gram - np.eye(a.shape[0])))) if a.shape[0] else 0.0
    return residual <= tol, residual


def fourier(k: int) -> np.ndarray:
    """Discrete Fourier matrix: entry (a, b) = exp(2*pi*i*ab/k) / sqrt(k).

    Unitary with every entry of modulus 1/sqrt(k), so it has dense support.
    """
    if k < 1:
        raise ValueError("fourier needs k >= 1")
    idx = np.arange(k)
    return np.exp(2j * np.pi * np.outer(idx, idx) / k) / np.sqrt(k)


def dump_csv(m, tol: float = SUPPORT_TOL) -> str:
    """Matrix dump: header row,col,re,im; entries with |value| > tol, sorted."""
    a = _as_matrix(m)
    lines = ["row,col,re,im"]
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            v = a[i, j]
            if abs(v) > tol:
                lines.append(f"{i},{j},{v.real!r},{v.imag!r}")
    return "\n".join(lines) + "\n"


def load_csv(text: str) -> np.ndarray:
    """Parse a matrix dump.  Dimensions are inferred from the largest indices,
    so fully-zero trailing rows/columns are not recoverable."""
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "row,col,re,im":
        raise ValueError("matrix CSV must start with header row,col,re,im")
    entries = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 4:
            raise ValueError(f"malformed matrix CSV line: {ln!r}")
        entries.append((int(parts[0]), int(parts[1]), float(parts[2]), float(parts[3])))
    size = 1 + max(max(r for r, *_ in entries), max(c for _, c, *_ in entries)) if entries else 0
    out = np.zeros((size, size), dtype=complex)
    for r, c, re, im in entries:
        out[r, c] = complex(re, im)
    return out
