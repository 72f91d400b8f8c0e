import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcmce.circulant import QcBlockMatrix, RingPoly, to_dense, vec_block_shift, vec_mul
from qcmce.construction import (DifferenceFamily, ExhaustedRetries, LastBlockSingular, build_parity_check,
                                check_disjoint_differences, derive_generator, has_no_length4_cycles,
                                sample_code, sample_difference_family)
from qcmce.decoder import syndrome
from qcmce.params import PRESETS, TOY


def test_singleton_family(rng):
    df = sample_difference_family(1, 1, 5, rng)
    assert df.n0 == 1 and df.d_v == 1
    assert check_disjoint_differences(df)


def test_small_family(rng):
    df = sample_difference_family(2, 2, 7, rng)
    assert check_disjoint_differences(df)
    assert sorted(df.differences()) == sorted(set(df.differences()))


def test_check_examples():
    assert check_disjoint_differences(DifferenceFamily(7, ((0, 1), (0, 3))))
    assert not check_disjoint_differences(DifferenceFamily(4, ((0, 2),)))
    assert check_disjoint_differences(DifferenceFamily(11, ((0,),)))


def test_no_room():
    with pytest.raises(ValueError):
        sample_difference_family(4, 13, 500, np.random.default_rng(0))


def test_exhausted_retries():
    # 6 differences needed out of 6 non-zero residues: very tight, tiny budget
    with pytest.raises(ExhaustedRetries):
        sample_difference_family(1, 3, 7, np.random.default_rng(1), max_rejections=1, max_restarts=0)


def test_parity_check_examples():
    assert build_parity_check(DifferenceFamily(3, ((0,),))) == QcBlockMatrix(3, [[RingPoly.one(3)]])
    h = build_parity_check(DifferenceFamily(7, ((0, 1), (0, 3))))
    assert h[0, 0] == RingPoly.from_support(7, [0, 1])
    assert h[0, 1] == RingPoly.from_support(7, [0, 3])


def test_generator_examples():
    p = 5
    h = QcBlockMatrix(p, [[RingPoly.monomial(p, 2), RingPoly.one(p)]])
    g = derive_generator(h)
    assert g[0, 0] == RingPoly.one(p)
    assert g[0, 1] == RingPoly.monomial(p, 2).transpose()
    h = QcBlockMatrix(3, [[RingPoly.from_support(3, [0, 1]), RingPoly.monomial(3, 1)]])
    g = derive_generator(h)
    assert (g @ h.transpose()).is_zero()
    with pytest.raises(LastBlockSingular):
        derive_generator(QcBlockMatrix(4, [[RingPoly.one(4), RingPoly.from_support(4, [0, 1])]]))


def test_four_cycle_examples():
    p, q = 9, 3
    assert not has_no_length4_cycles(QcBlockMatrix(p, [[RingPoly.from_support(p, [0, q, 2 * q])]]))
    assert has_no_length4_cycles(QcBlockMatrix(5, [[RingPoly.monomial(5, 2)]]))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32), st.booleans())
def test_difference_check_matches_cycle_check(seed, corrupt):
    rng = np.random.default_rng(seed)
    p = int(rng.integers(20, 65))
    n0 = int(rng.integers(1, 4))
    d_v = 3
    if 2 * n0 * d_v * (d_v - 1) > p:
        n0 = 1
    if corrupt:
        sets = tuple(tuple(int(x) for x in rng.choice(p, d_v, replace=False)) for _ in range(n0))
        df = DifferenceFamily(p, sets)
    else:
        df = sample_difference_family(n0, d_v, p, rng)
        assert check_disjoint_differences(df)
    assert check_disjoint_differences(df) == has_no_length4_cycles(build_parity_check(df))


@pytest.mark.parametrize("system", [1, 2, 3])
def test_presets(system):
    params = PRESETS[system]
    code = sample_code(params, np.random.default_rng(system))
    assert check_disjoint_differences(code.family)
    assert has_no_length4_cycles(code.H)
    assert all(w == params.d_v for w in code.H.weights().ravel())
    assert sum(code.H.weights().ravel()) == params.d_c
    assert code.k == params.k
    assert (code.G @ code.H.transpose()).is_zero()


def test_codewords_and_shifts(rng):
    code = sample_code(TOY, rng)
    for _ in range(10):
        u = rng.integers(0, 2, code.k, dtype=np.uint8)
        c = code.encode(u)
        assert np.array_equal(c[:code.k], u)
        assert not syndrome(code.H, c).any()
        s = int(rng.integers(TOY.p))
        assert not syndrome(code.H, vec_block_shift(c, s, TOY.n0)).any()
