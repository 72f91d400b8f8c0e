"""QC-LDPC codes with a single row of circulant blocks, built from random
difference families."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np
import scipy.sparse as sp

from .circulant import NonInvertible, QcBlockMatrix, RingPoly, vec_mul
from .params import SystemParams


class ExhaustedRetries(RuntimeError):
    """Random sampling did not succeed within its attempt budget."""


class LastBlockSingular(ArithmeticError):
    pass


@dataclass(frozen=True)
class DifferenceFamily:
    p: int
    sets: tuple[tuple[int, ...], ...]

    @property
    def n0(self) -> int:
        return len(self.sets)

    @property
    def d_v(self) -> int:
        return len(self.sets[0]) if self.sets else 0

    def differences(self) -> list[int]:
        return [(a - b) % self.p for h in self.sets for a, b in permutations(h, 2)]


def check_disjoint_differences(df: DifferenceFamily) -> bool:
    """True iff no difference value mod p occurs twice across the family."""
    for h in df.sets:
        if len(set(x % df.p for x in h)) != len(h):
            return False
    diffs = df.differences()
    return len(diffs) == len(set(diffs))


def sample_difference_family(n0: int, d_v: int, p: int, rng: np.random.Generator,
                             max_rejections: int = 1000, max_restarts: int = 200) -> DifferenceFamily:
    """Draw ``n0`` sets of ``d_v`` residues with globally distinct differences.

    Elements are drawn uniformly one at a time; a candidate is rejected if it
    would repeat a difference.  A set that collects ``max_rejections``
    rejections is restarted from scratch.
    """
    if n0 * d_v * (d_v - 1) >= p:
        raise ValueError(f"n0*d_v*(d_v-1)={n0 * d_v * (d_v - 1)} leaves no room in Z_{p}")
    used: set[int] = set()
    sets = []
    restarts = 0
    while len(sets) < n0:
        current: list[int] = []
        new_diffs: set[int] = set()
        rejections = 0
        while len(current) < d_v:
            x = int(rng.integers(p))
            cand = []
            for y in current:
                cand.append((x - y) % p)
                cand.append((y - x) % p)
            ok = x not in current and len(set(cand)) == len(cand)
            ok = ok and not any(d in used or d in new_diffs for d in cand)
            if ok:
                current.append(x)
                new_diffs.update(cand)
                continue
            rejections += 1
            if rejections >= max_rejections:
                restarts += 1
                if restarts > max_restarts:
                    raise ExhaustedRetries("could not complete a difference family")
                current, new_diffs, rejections = [], set(), 0
        used |= new_diffs
        sets.append(tuple(current))
    return DifferenceFamily(p, tuple(sets))


def build_parity_check(df: DifferenceFamily) -> QcBlockMatrix:
    return QcBlockMatrix(df.p, [[RingPoly.from_support(df.p, h) for h in df.sets]])


def derive_generator(h: QcBlockMatrix) -> QcBlockMatrix:
    """Systematic generator [I | column of (H_last^-1 H_i)^T] for a 1 x n0 block H."""
    if h.rows0 != 1:
        raise ValueError("parity-check matrix must have a single block row")
    n0, p = h.cols0, h.p
    try:
        last_inv = h[0, n0 - 1].inverse()
    except NonInvertible as exc:
        raise LastBlockSingular("last circulant block of H is singular") from exc
    rows = []
    for i in range(n0 - 1):
        row = [RingPoly.one(p) if j == i else RingPoly.zero(p) for j in range(n0 - 1)]
        row.append((last_inv * h[0, i]).transpose())
        rows.append(row)
    return QcBlockMatrix(p, rows)


def has_no_length4_cycles(h: QcBlockMatrix) -> bool:
    """True iff no two columns of the expanded H share more than one row."""
    p = h.p
    rows, cols = [], []
    for bi, brow in enumerate(h.blocks()):
        for bj, poly in enumerate(brow):
            for s in poly.support():
                r = np.arange(p)
                rows.append(bi * p + r)
                cols.append(bj * p + (r + s) % p)
    if not rows:
        return True
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    hs = sp.csr_matrix((np.ones(rows.size, dtype=np.int32), (rows, cols)),
                       shape=(h.rows0 * p, h.cols0 * p))
    # column pairs sharing two rows <=> row pairs sharing two columns
    overlap = (hs @ hs.T).tocoo()
    off = overlap.row != overlap.col
    return not np.any(overlap.data[off] > 1)


@dataclass(frozen=True)
class QcLdpcCode:
    params: SystemParams
    H: QcBlockMatrix
    G: QcBlockMatrix
    family: DifferenceFamily | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return self.H.cols0 * self.H.p

    @property
    def k(self) -> int:
        return self.G.rows0 * self.G.p

    def encode(self, u: np.ndarray) -> np.ndarray:
        return vec_mul(u, self.G)


def sample_code(params: SystemParams, rng: np.random.Generator, max_attempts: int = 100) -> QcLdpcCode:
    """Sample a family, resampling it whole while the last block is singular."""
    for _ in range(max_attempts):
        df = sample_difference_family(params.n0, params.d_v, params.p, rng)
        h = build_parity_check(df)
        try:
            g = derive_generator(h)
        except LastBlockSingular:
            continue
        return QcLdpcCode(params, h, g, df)
    raise ExhaustedRetries("no difference family with an invertible last block")
