import itertools

import numpy as np
import pytest

from qcmce import attacks as A
from qcmce.circulant import QcBlockMatrix, RingPoly, to_dense
from qcmce.cryptosystem import encrypt, keygen
from qcmce.gf2 import matmul, nullspace, rank
from qcmce.params import SystemParams, TOY

from conftest import toy_keys

HAMMING = np.array([[1, 0, 0, 0, 1, 1, 0],
                    [0, 1, 0, 0, 1, 0, 1],
                    [0, 0, 1, 0, 0, 1, 1],
                    [0, 0, 0, 1, 1, 1, 1]], dtype=np.uint8)


def min_distance(g):
    k = g.shape[0]
    return min(int(matmul(np.array(u, dtype=np.uint8)[None], g).sum())
               for u in itertools.product([0, 1], repeat=k) if any(u))


def is_shift_of(q, target):
    return any(target.shift(l) == q for l in range(q.p))


class TestStern:
    def test_hamming(self):
        words = A.stern_search(HAMMING, 3, A.SternConfig(seed=1, max_iterations=100))
        assert words and min_distance(HAMMING) == 3
        for w in words:
            assert w.sum() == 3
            assert not matmul(nullspace(HAMMING), w[:, None]).any()

    def test_zero_code(self):
        assert A.stern_search(np.zeros((0, 10), dtype=np.uint8), 3) == []
        assert A.stern_search(np.zeros((3, 10), dtype=np.uint8), 3) == []

    def test_parity_form(self):
        h = nullspace(HAMMING)
        words = A.stern_search(h, 3, A.SternConfig(seed=2), form="parity")
        assert words and all(not matmul(h, w[:, None]).any() for w in words)
        with pytest.raises(ValueError):
            A.stern_search(h, 3, form="other")

    def test_config_validation(self):
        with pytest.raises(ValueError):
            A.SternSearch(HAMMING, A.SternConfig(g=5))
        with pytest.raises(ValueError):
            A.SternSearch(HAMMING, A.SternConfig(l=4))

    def test_random_24_12(self):
        wins = 0
        for trial in range(50):
            rng = np.random.default_rng(1000 + trial)
            g = rng.integers(0, 2, (12, 24), dtype=np.uint8)
            if rank(g) < 12:
                continue
            d = min_distance(g)
            words = A.stern_search(g, d, A.SternConfig(g=1, l=3, max_iterations=200, seed=trial))
            wins += bool(words) and all(w.sum() == d for w in words)
        assert wins >= 0.95 * 50 - 1  # singular draws count as losses


class TestDual:
    def test_permutation_key_broken(self, rng):
        _, pk = toy_keys("permutation", 1)
        rows = A.dual_code_attack(pk, A.SternConfig(max_iterations=200, seed=1))
        assert rows
        gd = to_dense(pk.Gpub)
        for r in rows:
            assert r.sum() <= pk.params.d_c * pk.params.m
            assert not matmul(gd, r[:, None]).any()
        u = rng.integers(0, 2, pk.params.k, dtype=np.uint8)
        brk = A.break_with_dual_rows(pk, rows, encrypt(pk, u, rng))
        assert np.array_equal(brk.message, u)

    def test_hardened_heavy_rows_not_found(self):
        params = SystemParams(4, 3, 64, 5, 2)  # d_c*m = 60, about n/4
        _, pk = keygen(params, "hardened", 3)
        assert A.dual_code_attack(pk, A.SternConfig(max_iterations=30, seed=0)) == []


class TestDecodingAttack:
    def test_extended_code(self, rng):
        _, pk = toy_keys("hardened", 4)
        u = rng.integers(0, 2, TOY.k, dtype=np.uint8)
        x = encrypt(pk, u, rng)
        e = x.bits ^ (matmul(u[None], to_dense(pk.Gpub))[0])
        ext1 = A.build_extended_code(pk, x, 1)
        assert ext1.rows == TOY.k + 1
        assert rank(np.vstack([ext1.generator, e])) == rank(ext1.generator)
        ext4 = A.build_extended_code(pk, x, 4)
        h = nullspace(ext4.generator)
        for s in range(4):
            es = np.roll(e.reshape(TOY.n0, TOY.p), s, axis=1).reshape(-1)
            assert not matmul(h, es[:, None]).any()
        with pytest.raises(ValueError):
            A.build_extended_code(pk, x, TOY.p + 1)

    def test_recovers_error_and_message(self, rng):
        _, pk = toy_keys("hardened", 5)
        u = rng.integers(0, 2, TOY.k, dtype=np.uint8)
        x = encrypt(pk, u, rng)
        res = A.decoding_attack(pk, x, 8, A.SternConfig(max_iterations=500, seed=1))
        assert res.error.sum() == TOY.t_prime
        assert np.array_equal(res.message, u)
        assert np.array_equal(matmul(u[None], to_dense(pk.Gpub))[0] ^ res.error, x.bits)

    def test_no_errors(self, rng):
        params = SystemParams(4, 3, 64, 3, 0)
        _, pk = keygen(params, "hardened", 1)
        u = rng.integers(0, 2, params.k, dtype=np.uint8)
        res = A.decoding_attack(pk, encrypt(pk, u, rng), 1)
        assert not res.error.any() and np.array_equal(res.message, u)

    def test_random_vector(self, rng):
        _, pk = toy_keys("hardened", 5)
        with pytest.raises(A.NotFound):
            A.decoding_attack(pk, rng.integers(0, 2, TOY.n, dtype=np.uint8), 8,
                              A.SternConfig(max_iterations=40, seed=2))


def _check_recovery(sk, res):
    for i, q in res.q.items():
        nz = [b for b in sk.S.block_row(i) if b]
        # with a single non-null S block, q_i and S_ij play symmetric roles
        assert is_shift_of(q, sk.Q[i, i]) or (len(nz) == 1 and is_shift_of(q, nz[0]))


class TestOtd:
    @pytest.mark.parametrize("seed", range(3))
    def test_strategies_on_weak_keys(self, seed):
        sk, pk = toy_keys("weak_otd", seed)
        r1, r2 = A.otd_strategy1(pk), A.otd_strategy2(pk)
        r3 = A.otd_strategy3(pk, A.SternConfig(max_iterations=50, seed=seed))
        for r in (r1, r2, r3):
            assert A.verify_otd_recovery(pk, r)
            _check_recovery(sk, r)
        common = [set(r1.candidates[i]) & set(r2.candidates.get(i, [])) for i in r1.candidates]
        assert any(common)

    def test_strategy3_rows_match_s(self):
        sk, pk = toy_keys("weak_otd", 7)
        r3 = A.otd_strategy3(pk, A.SternConfig(max_iterations=50, seed=0))
        for i, row in r3.s_rows.items():
            true = sk.S.block_row(i)
            if sum(1 for b in true if b) > 1:
                assert any(all(t.shift(l) == s for t, s in zip(true, row)) for l in range(TOY.p))

    @pytest.mark.parametrize("seed", range(3))
    def test_hardened_resists(self, seed):
        _, pk = toy_keys("hardened", seed)
        with pytest.raises(A.NoCandidate):
            A.otd_strategy1(pk)
        with pytest.raises(A.NoCandidate):
            A.otd_strategy1(pk, max_support=None, max_tuples=10_000)
        with pytest.raises(A.NoCandidate):
            A.otd_strategy2(pk)
        with pytest.raises(A.NotFound):
            A.otd_strategy3(pk, A.SternConfig(max_iterations=10, seed=seed))

    def test_m1_weak_key(self):
        params = SystemParams(4, 3, 64, 1, 2)
        sk, pk = keygen(params, "weak_otd", 0)
        res = A.otd_strategy1(pk)
        assert A.verify_otd_recovery(pk, res)

    def test_full_support_defeats_intersection(self):
        g = RingPoly(16, (1 << 16) - 1)
        assert all(g.hadamard(g.shift(d)).weight == 16 for d in range(1, 16))
        assert g.hadamard(g) == g

    def test_two_block_normalisation(self):
        params = SystemParams(2, 3, 64, 3, 2)
        _, pk = keygen(params, "weak_otd", 0)
        gen, j0 = A.otd3_generator(A.otd_inverse_blocks(pk), 0)
        assert gen == QcBlockMatrix.identity(1, 64)
