"""Pure-Python/numpy implementation of the complexity kernels.

Mirrors ``_kernels.pyx`` function for function.  The cut test here is a
singular value decomposition; the compiled version uses a Gram-matrix
eigenvalue, so the two backends double as cross-checks of each other.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np


def _cut_is_product(amps: np.ndarray, n: int, subset: tuple[int, ...], eps: float) -> bool:
    rest = [q for q in range(n) if q not in subset]
    t = amps.reshape((2,) * n)
    order = [n - 1 - q for q in reversed(subset)] + [n - 1 - q for q in reversed(rest)]
    mat = np.transpose(t, order).reshape(2 ** len(subset), -1)
    s = np.linalg.svd(mat, compute_uv=False)
    total = float(np.sum(s**2))
    return total - s[0] ** 2 <= eps * total


def state_blocks(amps, n: int, eps: float) -> list[int]:
    """Finest factorization blocks as bit masks, in discovery order."""
    amps = np.asarray(amps, dtype=complex)
    remaining = list(range(n))
    blocks = []
    while remaining:
        found = None
        for k in range(1, len(remaining) // 2 + 1):
            for subset in combinations(remaining, k):
                if _cut_is_product(amps, n, subset, eps):
                    found = subset
                    break
            if found:
                break
        block = found if found else tuple(remaining)
        blocks.append(sum(1 << q for q in block))
        remaining = [q for q in remaining if q not in block]
    return blocks


def state_nu(amps, n: int, eps: float) -> int:
    return max(bin(m).count("1") for m in state_blocks(amps, n, eps))


def batch_state_nu(amps, tables, n: int, eps: float) -> np.ndarray:
    amps = np.asarray(amps, dtype=complex)
    tables = np.asarray(tables, dtype=np.int64)
    out = np.empty(tables.shape[0], dtype=np.int32)
    buf = np.empty_like(amps)
    for i, table in enumerate(tables):
        buf[table] = amps
        out[i] = state_nu(buf, n, eps)
    return out


def _pauli_supports(matrix: np.ndarray, n: int, tol: float) -> np.ndarray:
    """Bit masks of the qubit supports of all Pauli terms above ``tol``."""
    dim = 2**n
    w = np.array(matrix, dtype=complex).reshape(dim, dim)
    rows = np.arange(dim)
    for q in range(n):
        m = 1 << q
        lo = rows[(rows & m) == 0]
        hi = lo | m
        m00 = w[np.ix_(lo, lo)]
        m01 = w[np.ix_(lo, hi)]
        m10 = w[np.ix_(hi, lo)]
        m11 = w[np.ix_(hi, hi)]
        w[np.ix_(lo, lo)] = (m00 + m11) / 2
        w[np.ix_(lo, hi)] = (m01 + m10) / 2
        w[np.ix_(hi, lo)] = 1j * (m01 - m10) / 2
        w[np.ix_(hi, hi)] = (m00 - m11) / 2
    j, k = np.nonzero(np.abs(w) > tol)
    return np.unique(j | k)


def _components(masks, n: int) -> list[int]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for mask in masks:
        bits = [q for q in range(n) if (int(mask) >> q) & 1]
        for q in bits[1:]:
            a, b = find(bits[0]), find(q)
            if a != b:
                parent[max(a, b)] = min(a, b)
    comps: dict[int, int] = {}
    for q in range(n):
        r = find(q)
        comps[r] = comps.get(r, 0) | (1 << q)
    return [comps[r] for r in sorted(comps)]


def ham_blocks(matrix, n: int, tol: float) -> list[int]:
    return _components(_pauli_supports(matrix, n, tol), n)


def ham_nu(matrix, n: int, tol: float) -> int:
    return max(bin(m).count("1") for m in ham_blocks(matrix, n, tol))


def batch_ham_nu(matrix, tables, n: int, tol: float) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    tables = np.asarray(tables, dtype=np.int64)
    out = np.empty(tables.shape[0], dtype=np.int32)
    for i, table in enumerate(tables):
        # (P^-1 H P)[j, k] = H[tau(j), tau(k)]
        out[i] = ham_nu(matrix[np.ix_(table, table)], n, tol)
    return out
