"""Arithmetic in GF(2)[x]/(x^p + 1) and matrices of p x p circulant blocks.

A circulant block is stored as the polynomial of its first row: coefficient
``i`` is bit ``i`` of a Python integer, so bit ``i`` of 64-bit word ``w``
holds coefficient ``64*w + i``.  Row ``r`` of the expanded block is the first
row rotated right by ``r``; entry ``(r, c)`` equals coefficient ``(c - r) mod p``.

Under this convention a row vector ``v`` of length ``p`` times the circulant
of ``a`` is the ring product ``v(x) * a(x)``, and matrix products map to
polynomial products.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class NonInvertible(ArithmeticError):
    """Raised when a ring element has no inverse modulo x^p + 1."""


class Singular(ArithmeticError):
    """Raised when block elimination finds no invertible pivot."""


class NotCirculant(ValueError):
    """Raised when a dense matrix is not made of circulant blocks."""


# multiplications with a factor lighter than this use rotate-accumulate
_SPARSE_FRACTION = 8


def _mask(p: int) -> int:
    return (1 << p) - 1


def _fold(v: int, p: int) -> int:
    """Reduce an integer polynomial modulo x^p + 1."""
    mask = _mask(p)
    while v >> p:
        v = (v & mask) ^ (v >> p)
    return v


def _support(v: int) -> list[int]:
    if not v:
        return []
    nbytes = (v.bit_length() + 7) // 8
    bits = np.unpackbits(np.frombuffer(v.to_bytes(nbytes, "little"), dtype=np.uint8),
                         bitorder="little")
    return np.flatnonzero(bits).tolist()


def _clmul_sparse(a: int, support: Iterable[int]) -> int:
    acc = 0
    for j in support:
        acc ^= a << j
    return acc


def _clmul_dense(a: int, b: int) -> int:
    # operand scanning, one byte of b at a time against a 256-entry table of a
    table = [0] * 256
    for v in range(1, 256):
        table[v] = (table[v >> 1] << 1) ^ (a if v & 1 else 0)
    nbytes = (b.bit_length() + 7) // 8
    acc = 0
    for byte in reversed(b.to_bytes(nbytes, "little")):
        acc = (acc << 8) ^ table[byte]
    return acc


def _mulmod(a: int, b: int, p: int) -> int:
    if not a or not b:
        return 0
    wa, wb = a.bit_count(), b.bit_count()
    if wa < wb:
        a, b, wa, wb = b, a, wb, wa
    if wb * _SPARSE_FRACTION <= p or wb <= 16:
        return _fold(_clmul_sparse(a, _support(b)), p)
    return _fold(_clmul_dense(a, b), p)


def _invmod(a: int, p: int) -> int:
    """Extended Euclid on (a, x^p + 1); raises NonInvertible."""
    if a == 0 or a.bit_count() % 2 == 0:
        # x + 1 divides both
        raise NonInvertible("element shares the factor x+1 with x^p+1")
    r0, r1 = (1 << p) | 1, a
    s0, s1 = 0, 1
    while r1:
        d1 = r1.bit_length()
        while r0.bit_length() >= d1:
            shift = r0.bit_length() - d1
            r0 ^= r1 << shift
            s0 ^= s1 << shift
        r0, r1 = r1, r0
        s0, s1 = s1, s0
    if r0 != 1:
        raise NonInvertible("gcd with x^p+1 is not 1")
    return _fold(s0, p)


def _pdivmod(a: int, b: int) -> tuple[int, int]:
    """Quotient and remainder of plain GF(2)[x] division."""
    q, db = 0, b.bit_length()
    while a.bit_length() >= db:
        shift = a.bit_length() - db
        a ^= b << shift
        q ^= 1 << shift
    return q, a


def _rotate(v: int, s: int, p: int) -> int:
    s %= p
    if s == 0:
        return v
    return ((v << s) | (v >> (p - s))) & _mask(p)


def _transpose(v: int, p: int) -> int:
    if not v:
        return 0
    coeffs = RingPoly(p, v).coeffs()
    return RingPoly.from_coeffs(coeffs[(-np.arange(p)) % p]).value


@dataclass(frozen=True)
class RingPoly:
    """Element of GF(2)[x]/(x^p + 1), i.e. one p x p binary circulant."""

    p: int
    value: int = 0

    def __post_init__(self):
        if self.p <= 0:
            raise ValueError("p must be positive")
        if self.value < 0:
            raise ValueError("coefficient bits must be a non-negative integer")
        if self.value >> self.p:
            object.__setattr__(self, "value", _fold(self.value, self.p))

    # constructors
    @classmethod
    def zero(cls, p: int) -> "RingPoly":
        return cls(p, 0)

    @classmethod
    def one(cls, p: int) -> "RingPoly":
        return cls(p, 1)

    @classmethod
    def monomial(cls, p: int, exponent: int) -> "RingPoly":
        return cls(p, 1 << (exponent % p))

    @classmethod
    def from_support(cls, p: int, support: Iterable[int]) -> "RingPoly":
        v = 0
        for i in support:
            v ^= 1 << (int(i) % p)
        return cls(p, v)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[int] | np.ndarray) -> "RingPoly":
        bits = np.asarray(coeffs, dtype=np.uint8) & 1
        packed = np.packbits(bits, bitorder="little").tobytes()
        return cls(len(bits), int.from_bytes(packed, "little"))

    @classmethod
    def random(cls, p: int, rng: np.random.Generator) -> "RingPoly":
        """Uniform element: every coefficient an independent fair bit."""
        return cls.from_coeffs(rng.integers(0, 2, size=p, dtype=np.uint8))

    @classmethod
    def random_weight(cls, p: int, weight: int, rng: np.random.Generator) -> "RingPoly":
        return cls.from_support(p, rng.choice(p, size=weight, replace=False))

    # views
    @property
    def weight(self) -> int:
        return self.value.bit_count()

    def support(self) -> list[int]:
        return _support(self.value)

    def coeffs(self) -> np.ndarray:
        nbytes = (self.p + 7) // 8
        raw = np.frombuffer(self.value.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.p].copy()

    def is_zero(self) -> bool:
        return self.value == 0

    # arithmetic
    def _check(self, other: "RingPoly") -> None:
        if other.p != self.p:
            raise ValueError(f"block size mismatch: {self.p} != {other.p}")

    def __add__(self, other: "RingPoly") -> "RingPoly":
        if not isinstance(other, RingPoly):
            return NotImplemented
        self._check(other)
        return RingPoly(self.p, self.value ^ other.value)

    __sub__ = __add__

    def __mul__(self, other: "RingPoly") -> "RingPoly":
        if not isinstance(other, RingPoly):
            return NotImplemented
        self._check(other)
        return RingPoly(self.p, _mulmod(self.value, other.value, self.p))

    def inverse(self) -> "RingPoly":
        return RingPoly(self.p, _invmod(self.value, self.p))

    def is_invertible(self) -> bool:
        try:
            _invmod(self.value, self.p)
        except NonInvertible:
            return False
        return True

    def transpose(self) -> "RingPoly":
        return RingPoly(self.p, _transpose(self.value, self.p))

    def shift(self, s: int) -> "RingPoly":
        """Multiply by x^s."""
        return RingPoly(self.p, _rotate(self.value, s, self.p))

    def hadamard(self, other: "RingPoly") -> "RingPoly":
        """Coefficient-wise AND."""
        self._check(other)
        return RingPoly(self.p, self.value & other.value)

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        sup = self.support()
        if len(sup) > 8:
            return f"RingPoly(p={self.p}, weight={len(sup)})"
        return f"RingPoly(p={self.p}, support={sup})"


def poly_add(a: RingPoly, b: RingPoly) -> RingPoly:
    return a + b


def poly_mul(a: RingPoly, b: RingPoly) -> RingPoly:
    return a * b


def poly_inv(a: RingPoly) -> RingPoly:
    return a.inverse()


def poly_transpose(a: RingPoly) -> RingPoly:
    return a.transpose()


def circulant(a: RingPoly) -> np.ndarray:
    """Dense p x p expansion of one block."""
    p = a.p
    idx = (np.arange(p)[None, :] - np.arange(p)[:, None]) % p
    return a.coeffs()[idx]


class QcBlockMatrix:
    """An r0 x c0 grid of circulant blocks sharing the same block size p.

    Instances are treated as immutable; every operation returns a new matrix.
    """

    __slots__ = ("p", "_rows")

    def __init__(self, p: int, blocks: Sequence[Sequence[RingPoly | int]]):
        rows = []
        for row in blocks:
            out = []
            for b in row:
                if isinstance(b, RingPoly):
                    if b.p != p:
                        raise ValueError("all blocks must share the same p")
                    out.append(b.value)
                else:
                    out.append(_fold(int(b), p))
            rows.append(tuple(out))
        if not rows or any(len(r) != len(rows[0]) for r in rows) or not rows[0]:
            raise ValueError("blocks must form a non-empty rectangular grid")
        self.p = p
        self._rows = tuple(rows)

    @classmethod
    def _raw(cls, p: int, rows) -> "QcBlockMatrix":
        m = cls.__new__(cls)
        m.p = p
        m._rows = tuple(tuple(r) for r in rows)
        return m

    @classmethod
    def identity(cls, size: int, p: int) -> "QcBlockMatrix":
        return cls._raw(p, [[1 if i == j else 0 for j in range(size)] for i in range(size)])

    @classmethod
    def zeros(cls, rows0: int, cols0: int, p: int) -> "QcBlockMatrix":
        return cls._raw(p, [[0] * cols0 for _ in range(rows0)])

    @property
    def rows0(self) -> int:
        return len(self._rows)

    @property
    def cols0(self) -> int:
        return len(self._rows[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows0, self.cols0

    def __getitem__(self, ij: tuple[int, int]) -> RingPoly:
        i, j = ij
        return RingPoly(self.p, self._rows[i][j])

    def raw(self) -> tuple[tuple[int, ...], ...]:
        return self._rows

    def block_row(self, i: int) -> list[RingPoly]:
        return [RingPoly(self.p, v) for v in self._rows[i]]

    def blocks(self) -> list[list[RingPoly]]:
        return [self.block_row(i) for i in range(self.rows0)]

    def weights(self) -> np.ndarray:
        return np.array([[v.bit_count() for v in row] for row in self._rows], dtype=np.int64)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QcBlockMatrix):
            return NotImplemented
        return self.p == other.p and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.p, self._rows))

    def __repr__(self) -> str:
        return f"QcBlockMatrix(p={self.p}, shape={self.shape})"

    def is_zero(self) -> bool:
        return all(v == 0 for row in self._rows for v in row)

    def __add__(self, other: "QcBlockMatrix") -> "QcBlockMatrix":
        if self.shape != other.shape or self.p != other.p:
            raise ValueError("shape mismatch")
        return QcBlockMatrix._raw(self.p, [[a ^ b for a, b in zip(ra, rb)]
                                           for ra, rb in zip(self._rows, other._rows)])

    def __matmul__(self, other: "QcBlockMatrix") -> "QcBlockMatrix":
        return qc_mul(self, other)

    def transpose(self) -> "QcBlockMatrix":
        p = self.p
        return QcBlockMatrix._raw(p, [[_transpose(self._rows[i][j], p) for i in range(self.rows0)]
                                      for j in range(self.cols0)])

    def inverse(self) -> "QcBlockMatrix":
        return qc_inv(self)

    def submatrix(self, rows: slice | Sequence[int], cols: slice | Sequence[int]) -> "QcBlockMatrix":
        ri = range(self.rows0)[rows] if isinstance(rows, slice) else rows
        ci = range(self.cols0)[cols] if isinstance(cols, slice) else cols
        return QcBlockMatrix._raw(self.p, [[self._rows[i][j] for j in ci] for i in ri])

    def to_dense(self) -> np.ndarray:
        return to_dense(self)


def qc_mul(a: QcBlockMatrix, b: QcBlockMatrix) -> QcBlockMatrix:
    if a.p != b.p:
        raise ValueError(f"block size mismatch: {a.p} != {b.p}")
    if a.cols0 != b.rows0:
        raise ValueError(f"shape mismatch: {a.shape} @ {b.shape}")
    p = a.p
    out = []
    for row in a.raw():
        acc_row = []
        for j in range(b.cols0):
            acc = 0
            for k, av in enumerate(row):
                bv = b.raw()[k][j]
                if av and bv:
                    acc ^= _mulmod(av, bv, p)
            acc_row.append(acc)
        out.append(acc_row)
    return QcBlockMatrix._raw(p, out)


def _gcd_pivot(m: list[list[int]], inv: list[list[int]], c: int, p: int) -> tuple[int, int, int]:
    rows = range(c, len(m))
    while True:
        live = [i for i in rows if m[i][c]]
        if not live:
            raise Singular("zero column below the diagonal")
        r = min(live, key=lambda i: m[i][c].bit_length())
        if len(live) == 1:
            break
        for i in live:
            if i == r:
                continue
            q, _ = _pdivmod(m[i][c], m[r][c])
            m[i] = [x ^ _mulmod(y, q, p) if y else x for x, y in zip(m[i], m[r])]
            inv[i] = [x ^ _mulmod(y, q, p) if y else x for x, y in zip(inv[i], inv[r])]
    try:
        return r, c, _invmod(m[r][c], p)
    except NonInvertible:
        raise Singular("column entries share a factor with x^p+1") from None


def qc_inv(a: QcBlockMatrix) -> QcBlockMatrix:
    """Block Gauss-Jordan inversion over the ring.

    Pivots are restricted to invertible blocks and may come from any
    remaining block row or column.  When none is left (possible when
    x^p + 1 has several distinct factors), Euclid's algorithm on the entries
    of the current column, carried out with row operations, leaves their gcd
    in a single row; that gcd is a unit exactly when the matrix is invertible.
    """
    if a.rows0 != a.cols0:
        raise ValueError("block matrix must be square")
    p, size = a.p, a.rows0
    m = [list(r) for r in a.raw()]
    inv = [[1 if i == j else 0 for j in range(size)] for i in range(size)]
    col_swaps = []
    for c in range(size):
        pivot = None
        for j in range(c, size):
            for i in range(c, size):
                v = m[i][j]
                if v and v.bit_count() & 1:
                    try:
                        pivot = (i, j, _invmod(v, p))
                    except NonInvertible:
                        continue
                    break
            if pivot:
                break
        if pivot is None:
            pivot = _gcd_pivot(m, inv, c, p)
        i, j, pinv = pivot
        if i != c:
            m[c], m[i] = m[i], m[c]
            inv[c], inv[i] = inv[i], inv[c]
        if j != c:
            for row in m:
                row[c], row[j] = row[j], row[c]
            col_swaps.append((c, j))
        m[c] = [_mulmod(v, pinv, p) if v else 0 for v in m[c]]
        inv[c] = [_mulmod(v, pinv, p) if v else 0 for v in inv[c]]
        for r in range(size):
            f = m[r][c]
            if r == c or not f:
                continue
            m[r] = [x ^ _mulmod(y, f, p) if y else x for x, y in zip(m[r], m[c])]
            inv[r] = [x ^ _mulmod(y, f, p) if y else x for x, y in zip(inv[r], inv[c])]
    # (A E)^{-1} = E A^{-1}: undo column swaps as row swaps, last first
    for c, j in reversed(col_swaps):
        inv[c], inv[j] = inv[j], inv[c]
    return QcBlockMatrix._raw(p, inv)


def to_dense(a: QcBlockMatrix) -> np.ndarray:
    p = a.p
    out = np.zeros((a.rows0 * p, a.cols0 * p), dtype=np.uint8)
    for i, row in enumerate(a.raw()):
        for j, v in enumerate(row):
            if v:
                out[i * p:(i + 1) * p, j * p:(j + 1) * p] = circulant(RingPoly(p, v))
    return out


def from_dense(dense: np.ndarray, p: int) -> QcBlockMatrix:
    dense = np.asarray(dense, dtype=np.uint8) & 1
    nr, nc = dense.shape
    if nr % p or nc % p:
        raise NotCirculant(f"shape {dense.shape} is not a multiple of p={p}")
    rows = []
    for i in range(nr // p):
        row = []
        for j in range(nc // p):
            block = dense[i * p:(i + 1) * p, j * p:(j + 1) * p]
            poly = RingPoly.from_coeffs(block[0])
            if not np.array_equal(circulant(poly), block):
                raise NotCirculant(f"block ({i}, {j}) is not circulant")
            row.append(poly.value)
        rows.append(row)
    return QcBlockMatrix._raw(p, rows)


# vectors of length n0*p are stored block-contiguous: block i is bits [i*p, (i+1)*p)

def bits_to_polys(v: np.ndarray, p: int) -> list[int]:
    v = np.asarray(v, dtype=np.uint8)
    if v.size % p:
        raise ValueError(f"vector length {v.size} is not a multiple of p={p}")
    out = []
    for i in range(v.size // p):
        packed = np.packbits(v[i * p:(i + 1) * p], bitorder="little").tobytes()
        out.append(int.from_bytes(packed, "little"))
    return out


def polys_to_bits(polys: Sequence[int | RingPoly], p: int) -> np.ndarray:
    nbytes = (p + 7) // 8
    parts = []
    for v in polys:
        if isinstance(v, RingPoly):
            v = v.value
        raw = np.frombuffer(v.to_bytes(nbytes, "little"), dtype=np.uint8)
        parts.append(np.unpackbits(raw, bitorder="little")[:p])
    return np.concatenate(parts).astype(np.uint8)


def vec_mul(v: np.ndarray, a: QcBlockMatrix) -> np.ndarray:
    """Row vector times block matrix, v of length rows0*p."""
    p = a.p
    polys = bits_to_polys(v, p)
    if len(polys) != a.rows0:
        raise ValueError(f"vector has {len(polys)} blocks, matrix has {a.rows0} block rows")
    out = []
    for j in range(a.cols0):
        acc = 0
        for i, vi in enumerate(polys):
            aij = a.raw()[i][j]
            if vi and aij:
                acc ^= _mulmod(vi, aij, p)
        out.append(acc)
    return polys_to_bits(out, p)


def vec_block_shift(v: np.ndarray, s: int, n0: int) -> np.ndarray:
    """Quasi-cyclic shift: multiply every length-p block of v by x^s."""
    v = np.asarray(v, dtype=np.uint8)
    if v.size % n0:
        raise ValueError(f"length {v.size} is not a multiple of n0={n0}")
    p = v.size // n0
    return np.roll(v.reshape(n0, p), s % p, axis=1).reshape(-1)
