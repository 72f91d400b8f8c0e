"""Dense linear algebra over GF(2) on numpy uint8 matrices.

Used by the attacks (information sets, dual codes, re-encoding checks) and as
an independent oracle for the circulant arithmetic at small sizes.
"""
from __future__ import annotations

import numpy as np


def rref(a: np.ndarray, column_order: np.ndarray | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form.

    Columns are scanned in ``column_order`` (default left to right).  Returns
    the reduced matrix with zero rows dropped and the list of pivot columns,
    where row ``i`` of the result has its leading one in ``pivots[i]``.
    """
    m = (np.asarray(a, dtype=np.uint8) & 1).copy()
    rows, cols = m.shape
    order = np.arange(cols) if column_order is None else np.asarray(column_order)
    pivots: list[int] = []
    r = 0
    for c in order:
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        hit = np.flatnonzero(m[:, c])
        hit = hit[hit != r]
        if hit.size:
            m[hit] ^= m[r]
        pivots.append(int(c))
        r += 1
    return m[:r], pivots


def rank(a: np.ndarray) -> int:
    return len(rref(a)[1])


def inverse(a: np.ndarray) -> np.ndarray:
    """Inverse of a square matrix; raises ``np.linalg.LinAlgError`` if singular."""
    a = np.asarray(a, dtype=np.uint8) & 1
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    red, piv = rref(np.hstack([a, np.eye(n, dtype=np.uint8)]), column_order=np.arange(n))
    if len(piv) < n:
        raise np.linalg.LinAlgError("singular matrix over GF(2)")
    return red[:, n:]


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return ((np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) & 1).astype(np.uint8)


def nullspace(a: np.ndarray) -> np.ndarray:
    """Basis of {x : a x^T = 0}, one vector per row."""
    a = np.asarray(a, dtype=np.uint8) & 1
    n = a.shape[1]
    red, piv = rref(a)
    free = [c for c in range(n) if c not in set(piv)]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, pc in enumerate(piv):
            basis[i, pc] = red[r, f]
    return basis


def dual_generator(g: np.ndarray) -> np.ndarray:
    """Generator matrix of the dual code of the row space of ``g``."""
    return nullspace(g)


class RowSpaceSolver:
    """Solve ``u @ g = c`` for many right-hand sides ``c``.

    ``g`` must have full row rank.  An information set is fixed once, so every
    solve is a single product plus a membership check.
    """

    def __init__(self, g: np.ndarray):
        self.g = np.asarray(g, dtype=np.uint8) & 1
        k = self.g.shape[0]
        _, piv = rref(self.g)
        if len(piv) != k:
            raise np.linalg.LinAlgError("generator does not have full row rank")
        self.info_set = np.array(piv)
        self._inv = inverse(self.g[:, self.info_set])

    def solve(self, c: np.ndarray) -> np.ndarray | None:
        """Return ``u`` with ``u @ g == c``, or None if ``c`` is not in the row space."""
        c = np.asarray(c, dtype=np.uint8) & 1
        u = matmul(c[self.info_set][None, :], self._inv)[0]
        if not np.array_equal(matmul(u[None, :], self.g)[0], c):
            return None
        return u
