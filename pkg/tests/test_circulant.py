import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcmce import gf2
from qcmce.circulant import (NonInvertible, NotCirculant, QcBlockMatrix, RingPoly, Singular, bits_to_polys,
                             circulant, from_dense, poly_add, poly_inv, poly_mul, poly_transpose, polys_to_bits,
                             qc_inv, qc_mul, to_dense, vec_block_shift, vec_mul)


def poly(p, *support):
    return RingPoly.from_support(p, support)


@st.composite
def ring_pairs(draw, max_p=32):
    p = draw(st.integers(1, max_p))
    a = draw(st.integers(0, (1 << p) - 1))
    b = draw(st.integers(0, (1 << p) - 1))
    return RingPoly(p, a), RingPoly(p, b)


def random_block(rng, rows, cols, p):
    return QcBlockMatrix(p, [[RingPoly.random(p, rng) for _ in range(cols)] for _ in range(rows)])


class TestRingPoly:
    def test_add_examples(self):
        a = poly(7, 0, 1, 3)
        assert a + a == RingPoly.zero(7)
        assert a + RingPoly.zero(7) == a
        assert poly_add(poly(7, 0, 1), poly(7, 0, 1, 3)) == poly(7, 3)

    def test_mul_examples(self):
        a = poly(7, 0, 1, 3)
        assert a * RingPoly.one(7) == a
        assert poly_mul(poly(3, 1), poly(3, 2)) == RingPoly.one(3)
        assert poly_mul(poly(7, 0, 1), poly(7, 0, 1, 3)) == poly(7, 0, 2, 3, 4)

    def test_inverse_examples(self, rng):
        assert poly_inv(poly(3, 1)) == poly(3, 2)
        with pytest.raises(NonInvertible):
            poly_inv(poly(3, 0, 1))
        for _ in range(20):
            a = RingPoly.random(7, rng)
            if a.is_invertible():
                assert a * a.inverse() == RingPoly.one(7)

    def test_transpose_examples(self, rng):
        assert poly_transpose(RingPoly.one(5)) == RingPoly.one(5)
        assert poly_transpose(poly(4, 1)) == poly(4, 3)
        a = RingPoly.random(8, rng)
        assert np.array_equal(circulant(a.transpose()), circulant(a).T)

    def test_mismatched_p(self):
        with pytest.raises(ValueError):
            poly(5, 1) + poly(7, 1)
        with pytest.raises(ValueError):
            poly(5, 1) * poly(7, 1)

    def test_reduction_and_weight(self):
        a = RingPoly(4, 0b10011)  # x^4 folds onto 1
        assert a == poly(4, 1)
        assert len(a.coeffs()) == 4
        with pytest.raises(ValueError):
            RingPoly(4, -1)

    def test_shift_and_hadamard(self):
        a = poly(8, 0, 3)
        assert a.shift(6) == poly(8, 6, 1)
        assert a.hadamard(poly(8, 3, 5)) == poly(8, 3)

    def test_dense_expansion_of_x(self):
        d = circulant(poly(4, 1))
        assert np.array_equal(d, np.roll(np.eye(4, dtype=np.uint8), 1, axis=1))

    def test_large_p_dense_path(self, rng):
        p = 4099
        a, b, c = (RingPoly.random(p, rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        s = RingPoly.random_weight(p, 7, rng)
        # sparse and dense paths must agree
        assert s * a == a * s
        if a.is_invertible():
            assert a * a.inverse() == RingPoly.one(p)


@settings(max_examples=1000, deadline=None)
@given(ring_pairs())
def test_ring_isomorphism_dense_oracle(pair):
    a, b = pair
    da, db = circulant(a), circulant(b)
    assert np.array_equal(circulant(a * b), gf2.matmul(da, db))
    assert np.array_equal(circulant(a + b), da ^ db)
    assert np.array_equal(circulant(a.transpose()), da.T)
    assert (a * b).weight <= a.weight * b.weight


@settings(max_examples=1000, deadline=None)
@given(ring_pairs())
def test_inverse_matches_dense_invertibility(pair):
    a, _ = pair
    dense_invertible = gf2.rank(circulant(a)) == a.p
    assert a.is_invertible() == dense_invertible
    if dense_invertible:
        assert np.array_equal(circulant(a.inverse()), gf2.inverse(circulant(a)))
    if a.weight % 2 == 0:
        with pytest.raises(NonInvertible):
            a.inverse()


class TestBlockMatrix:
    def test_identity_and_degenerate(self, rng):
        a = random_block(rng, 2, 3, 8)
        assert a @ QcBlockMatrix.identity(3, 8) == a
        x, y = RingPoly.random(8, rng), RingPoly.random(8, rng)
        prod = qc_mul(QcBlockMatrix(8, [[x]]), QcBlockMatrix(8, [[y]]))
        assert prod[0, 0] == x * y

    def test_product_dense_oracle(self, rng):
        a, b = random_block(rng, 2, 3, 8), random_block(rng, 3, 2, 8)
        assert np.array_equal(to_dense(a @ b), gf2.matmul(to_dense(a), to_dense(b)))

    def test_shape_mismatch(self, rng):
        with pytest.raises(ValueError):
            random_block(rng, 2, 3, 8) @ random_block(rng, 2, 2, 8)

    def test_inverse(self, rng):
        assert qc_inv(QcBlockMatrix.identity(3, 8)) == QcBlockMatrix.identity(3, 8)
        done = 0
        while done < 10:
            a = random_block(rng, 2, 2, 8)
            try:
                ai = qc_inv(a)
            except Singular:
                assert gf2.rank(to_dense(a)) < 16
                continue
            assert a @ ai == QcBlockMatrix.identity(2, 8)
            assert np.array_equal(to_dense(ai), gf2.inverse(to_dense(a)))
            done += 1

    def test_singular_equal_rows(self, rng):
        row = [RingPoly.random(8, rng) for _ in range(2)]
        with pytest.raises(Singular):
            qc_inv(QcBlockMatrix(8, [row, row]))

    def test_dense_round_trip(self, rng):
        a = random_block(rng, 2, 3, 4)
        assert from_dense(to_dense(a), 4) == a
        bad = np.zeros((4, 4), dtype=np.uint8)
        bad[0, 0] = 1
        with pytest.raises(NotCirculant):
            from_dense(bad, 4)

    def test_transpose_dense(self, rng):
        a = random_block(rng, 2, 3, 5)
        assert np.array_equal(to_dense(a.transpose()), to_dense(a).T)

    def test_associative_distributive(self, rng):
        a, b, c = random_block(rng, 2, 2, 6), random_block(rng, 2, 2, 6), random_block(rng, 2, 2, 6)
        assert (a @ b) @ c == a @ (b @ c)
        assert a @ (b + c) == a @ b + a @ c

    def test_vec_mul_dense(self, rng):
        a = random_block(rng, 2, 3, 8)
        v = rng.integers(0, 2, 16, dtype=np.uint8)
        assert np.array_equal(vec_mul(v, a), gf2.matmul(v[None, :], to_dense(a))[0])

    def test_bits_polys_round_trip(self, rng):
        v = rng.integers(0, 2, 30, dtype=np.uint8)
        assert np.array_equal(polys_to_bits(bits_to_polys(v, 10), 10), v)


@settings(max_examples=1000, deadline=None)
@given(st.integers(1, 32), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32))
def test_block_product_dense_oracle(p, r, k, c, seed):
    rng = np.random.default_rng(seed)
    a, b = random_block(rng, r, k, p), random_block(rng, k, c, p)
    assert np.array_equal(to_dense(a @ b), gf2.matmul(to_dense(a), to_dense(b)))


class TestBlockShift:
    def test_identity_shifts(self, rng):
        v = rng.integers(0, 2, 24, dtype=np.uint8)
        assert np.array_equal(vec_block_shift(v, 0, 3), v)
        assert np.array_equal(vec_block_shift(v, 8, 3), v)

    def test_length_check(self):
        with pytest.raises(ValueError):
            vec_block_shift(np.zeros(10, dtype=np.uint8), 1, 3)

    def test_shift_is_monomial_product(self, rng):
        v = rng.integers(0, 2, 24, dtype=np.uint8)
        x3 = QcBlockMatrix(8, [[poly(8, 3) if i == j else 0 for j in range(3)] for i in range(3)])
        assert np.array_equal(vec_block_shift(v, 3, 3), vec_mul(v, x3))


def test_inverse_without_invertible_blocks():
    # x^9 + 1 has several distinct factors, so non-unit blocks can still form an invertible matrix
    rng = np.random.default_rng(82)
    found = 0
    while found < 5:
        a = random_block(rng, 2, 2, 9)
        if any(a[i, j].is_invertible() for i in range(2) for j in range(2)):
            continue
        if gf2.rank(to_dense(a)) < 18:
            with pytest.raises(Singular):
                qc_inv(a)
            continue
        assert a @ qc_inv(a) == QcBlockMatrix.identity(2, 9)
        found += 1
