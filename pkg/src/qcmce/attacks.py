"""Executable attacks at toy scale.

* Stern's low-weight codeword search.
* Attack on the dual code: sparse rows of H' recovered by Stern, then used
  as an LDPC matrix to decode intercepted ciphertexts.
* Decoding attack: the error vector is a minimum-weight word of the code
  spanned by G' and quasi-cyclic shifts of the ciphertext.
* OTD key recovery, three strategies, against sparse S and block-diagonal Q.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .circulant import (NonInvertible, QcBlockMatrix, RingPoly, Singular, bits_to_polys, qc_inv,
                        to_dense, vec_block_shift)
from .decoder import DecoderConfig, SumProductDecoder
from .gf2 import RowSpaceSolver, matmul, nullspace, rank, rref
from .cryptosystem import Ciphertext, PublicKey


class NotFound(LookupError):
    """The attack budget ran out without a verified result."""


class NoCandidate(NotFound):
    pass


@dataclass(frozen=True)
class SternConfig:
    """``l=None`` picks min(8, (n-k)//2) for the code at hand."""

    g: int = 1
    l: int | None = None
    max_iterations: int = 1000
    seed: int | None = None


def _pack(m: np.ndarray) -> list[int]:
    """Rows of a 0/1 matrix as integers, bit j = column j."""
    m = np.asarray(m, dtype=np.uint8)
    if m.shape[1] == 0:
        return [0] * m.shape[0]
    packed = np.packbits(m, axis=1, bitorder="little")
    return [int.from_bytes(r.tobytes(), "little") for r in packed]


def _unpack(v: int, n: int) -> np.ndarray:
    raw = np.frombuffer(v.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].copy()


class SternSearch:
    """Stern's algorithm on the row space of ``generator``.

    One iteration draws a random column order, takes the first independent
    columns as information set, splits it in two halves, enumerates
    ``g``-subsets of rows on each half and matches them on an ``l``-bit window
    of redundancy columns.  Every codeword with exactly ``g`` information bits
    in each half and none in the window is found.
    """

    def __init__(self, generator: np.ndarray, config: SternConfig | None = None):
        self.config = config or SternConfig()
        basis, _ = rref(np.asarray(generator, dtype=np.uint8))
        self.basis = basis
        self.k, self.n = basis.shape[0], np.asarray(generator).shape[1]
        self.rng = np.random.default_rng(self.config.seed)
        if self.k and not 0 < self.config.g <= max(self.k // 2, 1):
            raise ValueError(f"g={self.config.g} out of range for k={self.k}")
        redundancy = self.n - self.k
        l = self.config.l if self.config.l is not None else min(8, max(1, redundancy // 2))
        if self.k and redundancy and not 0 < l <= redundancy:
            raise ValueError(f"l={l} out of range for n-k={redundancy}")
        self.l = min(l, redundancy)

    def iteration(self, w: int, rng: np.random.Generator | None = None) -> set[int]:
        rng = rng or self.rng
        if self.k == 0:
            return set()
        g = self.config.g
        perm = rng.permutation(self.n)
        red, piv = rref(self.basis, column_order=perm)
        pivset = set(piv)
        rest = [int(c) for c in perm if int(c) not in pivset]
        window = rest[: self.l]
        half = self.k // 2
        proj = _pack(red[:, window])
        full = _pack(red)
        left = defaultdict(list)
        for rows in combinations(range(half), g):
            key = acc = 0
            for r in rows:
                key ^= proj[r]
                acc ^= full[r]
            left[key].append(acc)
        found = set()
        for rows in combinations(range(half, self.k), g):
            key = acc = 0
            for r in rows:
                key ^= proj[r]
                acc ^= full[r]
            for a in left.get(key, ()):
                c = a ^ acc
                if c and c.bit_count() <= w:
                    found.add(c)
        return found

    def run(self, w: int, max_iterations: int | None = None) -> list[np.ndarray]:
        """Iterate until a hit; return the hits of that iteration (maybe empty)."""
        budget = self.config.max_iterations if max_iterations is None else max_iterations
        for _ in range(budget):
            hits = self.iteration(w)
            if hits:
                return [_unpack(c, self.n) for c in sorted(hits)]
        return []


def stern_search(code: np.ndarray | QcBlockMatrix, w: int, cfg: SternConfig | None = None,
                 form: str = "generator") -> list[np.ndarray]:
    """Codewords of weight <= w, or an empty list when the budget runs out.

    ``form="parity"`` treats ``code`` as a parity-check matrix.
    """
    m = to_dense(code) if isinstance(code, QcBlockMatrix) else np.asarray(code, dtype=np.uint8)
    if form == "parity":
        m = nullspace(m)
    elif form != "generator":
        raise ValueError("form must be 'generator' or 'parity'")
    return SternSearch(m, cfg).run(w)


# attacks on the dual code

def public_parity_check_dense(pk: PublicKey) -> np.ndarray:
    return nullspace(to_dense(pk.Gpub))


def dual_code_attack(pk: PublicKey, cfg: SternConfig | None = None) -> list[np.ndarray]:
    """Search the dual of the public code for rows of weight <= d_c * m."""
    gd = to_dense(pk.Gpub)
    w = pk.params.d_c * pk.params.m
    rows = SternSearch(nullspace(gd), cfg).run(w)
    return [r for r in rows if not matmul(gd, r[:, None]).any()]


def parity_check_from_row(row: np.ndarray, p: int) -> QcBlockMatrix:
    """The 1 x n0 circulant matrix whose rows are the quasi-cyclic shifts of ``row``."""
    return QcBlockMatrix(p, [bits_to_polys(row, p)])


@dataclass
class DualBreak:
    parity_check: QcBlockMatrix
    message: np.ndarray
    iterations: int


def break_with_dual_rows(pk: PublicKey, rows: list[np.ndarray], x: Ciphertext | np.ndarray,
                         max_iterations: int = 100) -> DualBreak:
    """Decode an intercepted ciphertext with an LDPC matrix built from recovered dual rows."""
    bits = x.bits if isinstance(x, Ciphertext) else np.asarray(x, dtype=np.uint8)
    params = pk.params
    gd = to_dense(pk.Gpub)
    solver = RowSpaceSolver(gd)
    for row in rows:
        h = parity_check_from_row(row, params.p)
        hd = to_dense(h)
        if matmul(gd, hd.T).any() or rank(hd) != params.n - params.k:
            continue
        dec = SumProductDecoder(h, DecoderConfig(t=params.t_prime, max_iterations=max_iterations))
        out = dec.decode(bits)
        if not out.success:
            continue
        u = solver.solve(out.codeword)
        if u is not None:
            return DualBreak(h, u, out.iterations_used)
    raise NotFound("no recovered row decodes the ciphertext")


# decoding attack

@dataclass
class ExtendedCode:
    generator: np.ndarray
    r: int

    @property
    def rows(self) -> int:
        return self.generator.shape[0]


def build_extended_code(pk: PublicKey, x: Ciphertext | np.ndarray, r: int) -> ExtendedCode:
    """G' stacked with the block-wise shifts x, x^(1), ..., x^(r-1) of the ciphertext."""
    bits = x.bits if isinstance(x, Ciphertext) else np.asarray(x, dtype=np.uint8)
    p, n0 = pk.params.p, pk.params.n0
    if not 1 <= r <= p:
        raise ValueError(f"r must lie in [1, {p}]")
    shifts = np.stack([vec_block_shift(bits, s, n0) for s in range(r)])
    return ExtendedCode(np.vstack([to_dense(pk.Gpub), shifts]).astype(np.uint8), r)


@dataclass
class DecodingAttackResult:
    error: np.ndarray
    message: np.ndarray
    iterations: int


def decoding_attack(pk: PublicKey, x: Ciphertext | np.ndarray, r: int,
                    cfg: SternConfig | None = None) -> DecodingAttackResult:
    """Recover the intentional error as a weight-t' word of the extended code.

    A hit is accepted only if un-shifting it gives ``e`` with ``x + e`` in the
    row space of G' (the message is re-derived and re-encoded).
    """
    bits = x.bits if isinstance(x, Ciphertext) else np.asarray(x, dtype=np.uint8)
    params = pk.params
    cfg = cfg or SternConfig()
    solver = RowSpaceSolver(to_dense(pk.Gpub))
    if params.t_prime == 0:
        u = solver.solve(bits)
        if u is None:
            raise NotFound("ciphertext is not a codeword and t' = 0")
        return DecodingAttackResult(np.zeros_like(bits), u, 0)
    search = SternSearch(build_extended_code(pk, bits, r).generator, cfg)
    for it in range(1, cfg.max_iterations + 1):
        for c in search.iteration(params.t_prime):
            cand = _unpack(c, params.n)
            if cand.sum() != params.t_prime:
                continue
            for s in range(params.p):
                e = vec_block_shift(cand, -s, params.n0)
                u = solver.solve(bits ^ e)
                if u is not None:
                    return DecodingAttackResult(e, u, it)
    raise NotFound(f"no weight-{params.t_prime} error found in {cfg.max_iterations} iterations")


# OTD attacks

@dataclass
class OtdResult:
    """Recovered block rows: row i -> (shift of q_i, matching shift of S block row i)."""

    q: dict[int, RingPoly] = field(default_factory=dict)
    s_rows: dict[int, list[RingPoly]] = field(default_factory=dict)
    candidates: dict[int, list[RingPoly]] = field(default_factory=dict)
    work: int = 0

    @property
    def rows_recovered(self) -> list[int]:
        return sorted(self.q)


def otd_inverse_blocks(pk: PublicKey) -> QcBlockMatrix:
    """Inverse of the first k columns of G'; block (i, j) is Q_i S_ij on weak keys."""
    k0 = pk.params.k0
    try:
        return qc_inv(pk.Gpub.submatrix(slice(None), slice(0, k0)))
    except Singular as exc:
        raise NoCandidate("first k columns of G' are not invertible") from exc


def _explains_row(q: RingPoly, g_row: list[RingPoly], m: int) -> list[RingPoly] | None:
    """If q (weight m) times sparse blocks reproduces g_row, return those blocks."""
    if q.weight != m:
        return None
    try:
        qinv = q.inverse()
    except NonInvertible:
        return None
    s_row = [qinv * g for g in g_row]
    if all(s.weight in (0, m) for s in s_row) and any(s.weight for s in s_row):
        if all(q * s == g for s, g in zip(s_row, g_row)):
            return s_row
    return None


def _validated(c: RingPoly, g: RingPoly, m: int) -> bool:
    try:
        return (c.inverse() * g).weight == m
    except NonInvertible:
        return False


def _finish(result: OtdResult, ginv: QcBlockMatrix, m: int) -> OtdResult:
    for i, cands in result.candidates.items():
        g_row = ginv.block_row(i)
        for c in sorted(cands, key=lambda c: c.value):
            s_row = _explains_row(c, g_row, m)
            if s_row is not None:
                result.q[i], result.s_rows[i] = c, s_row
                break
    if not result.q:
        raise NoCandidate("no candidate explains any block row of the inverted public key")
    return result


def otd_strategy1(pk: PublicKey, max_tuples: int = 200_000, max_support: int | None = -1) -> OtdResult:
    """Enumerate m-subsets of supp(g_ij) and keep those c with c^-1 g_ij of weight m.

    A product of two weight-m polynomials has weight at most m^2, so by
    default heavier blocks are skipped; ``max_support=None`` enumerates them
    anyway (bounded by ``max_tuples``).
    """
    m = pk.params.m
    if max_support == -1:
        max_support = m * m
    ginv = otd_inverse_blocks(pk)
    result = OtdResult()
    for i in range(ginv.rows0):
        cands = set()
        for g in ginv.block_row(i):
            sup = g.support()
            if not g or comb(len(sup), m) > max_tuples:
                continue
            if max_support is not None and len(sup) > max_support:
                continue
            for tup in combinations(sup, m):
                result.work += 1
                c = RingPoly.from_support(g.p, tup)
                if _validated(c, g, m):
                    cands.add(c)
        result.candidates[i] = list(cands)
    return _finish(result, ginv, m)


def otd_strategy2(pk: PublicKey) -> OtdResult:
    """Intersect g_ij with its own shifts; weight-m intersections are candidate shifts of q_i."""
    m = pk.params.m
    ginv = otd_inverse_blocks(pk)
    result = OtdResult()
    for i in range(ginv.rows0):
        cands = set()
        for g in ginv.block_row(i):
            if not g:
                continue
            for d in range(1, g.p):
                result.work += 1
                h = g.hadamard(g.shift(d))
                if h.weight == m and _validated(h, g, m):
                    cands.add(h)
        result.candidates[i] = list(cands)
    return _finish(result, ginv, m)


def otd3_generator(ginv: QcBlockMatrix, i: int) -> tuple[QcBlockMatrix, int]:
    """(Q_i S_ij0)^-1 R_i for the first invertible block j0 of block row i."""
    row = ginv.block_row(i)
    for j0, g in enumerate(row):
        try:
            ginv0 = g.inverse()
        except NonInvertible:
            continue
        return QcBlockMatrix(ginv.p, [[ginv0 * h for h in row]]), j0
    raise NoCandidate(f"block row {i} has no invertible block")


def otd_strategy3(pk: PublicKey, cfg: SternConfig | None = None, rows: list[int] | None = None) -> OtdResult:
    """Stern search in the code spanned by the normalised block row of the inverse.

    On weak keys that code contains the block row [S_i0 | ... | S_i,k0-1] and
    its shifts, each of weight at most m*k0.
    """
    params = pk.params
    m, k0, p = params.m, params.k0, params.p
    cfg = cfg or SternConfig(g=1, l=8, max_iterations=50)
    ginv = otd_inverse_blocks(pk)
    result = OtdResult()
    for i in range(k0) if rows is None else rows:
        try:
            gen, _ = otd3_generator(ginv, i)
        except NoCandidate:
            continue
        search = SternSearch(to_dense(gen), SternConfig(cfg.g, cfg.l, cfg.max_iterations,
                                                        None if cfg.seed is None else cfg.seed + i))
        g_row = ginv.block_row(i)
        for _ in range(cfg.max_iterations):
            result.work += 1
            hits = search.iteration(m * k0)
            cands = []
            for c in sorted(hits):
                s_row = [RingPoly(p, v) for v in bits_to_polys(_unpack(c, k0 * p), p)]
                for j, s in enumerate(s_row):
                    if s.weight == m and s.is_invertible():
                        cands.append(g_row[j] * s.inverse())
                        break
            result.candidates.setdefault(i, []).extend(cands)
            if any(_explains_row(q, g_row, m) for q in cands):
                break
    return _finish(result, ginv, m)


def verify_otd_recovery(pk: PublicKey, result: OtdResult) -> bool:
    """Recovered factors must be sparse and reproduce the public blocks Q_i S_ij."""
    if not result.q:
        return False
    ginv = otd_inverse_blocks(pk)
    m = pk.params.m
    for i, q in result.q.items():
        s_row = result.s_rows[i]
        if q.weight != m or any(s.weight not in (0, m) for s in s_row):
            return False
        if any(q * s != g for s, g in zip(s_row, ginv.block_row(i))):
            return False
    return True
