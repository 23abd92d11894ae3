import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmwiretap.binmat import (
    BinMatrix,
    ShapeError,
    SingularMatrixError,
    gf2_invert,
    gf2_mul,
    gf2_nullspace,
    gf2_rank,
)

from conftest import random_full_rank


def naive_mul(a, b):
    a, b = np.asarray(a), np.asarray(b)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=int)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            s = 0
            for t in range(a.shape[1]):
                s ^= int(a[i, t]) & int(b[t, j])
            out[i, j] = s
    return out


def matrices(max_rows=8, max_cols=8):
    return st.tuples(st.integers(1, max_rows), st.integers(1, max_cols)).flatmap(
        lambda rc: st.lists(
            st.lists(st.integers(0, 1), min_size=rc[1], max_size=rc[1]),
            min_size=rc[0],
            max_size=rc[0],
        ).map(BinMatrix)
    )


def test_entries_must_be_binary():
    with pytest.raises(ValueError):
        BinMatrix([[0, 2]])


def test_text_round_trip(rm33_reference):
    assert BinMatrix.from_text(rm33_reference.to_text()) == rm33_reference
    assert rm33_reference.bits[:8] == (1,) * 8
    assert len(rm33_reference.bits) == rm33_reference.rows * rm33_reference.cols


def test_mul_identity():
    m = BinMatrix([[1, 0], [1, 1]])
    assert gf2_mul(BinMatrix.identity(2), m) == m


def test_mul_table1_row():
    g = BinMatrix.from_rows(["0011", "1101"])
    assert gf2_mul(BinMatrix([[1, 1]]), g) == BinMatrix.from_rows(["1110"])


def test_mul_matches_triple_loop():
    rng = np.random.default_rng(3)
    a = BinMatrix(rng.integers(0, 2, (5, 6)))
    b = BinMatrix(rng.integers(0, 2, (6, 4)))
    np.testing.assert_array_equal(gf2_mul(a, b).array, naive_mul(a.array, b.array))


def test_mul_shape_error():
    with pytest.raises(ShapeError):
        gf2_mul(BinMatrix.identity(2), BinMatrix.identity(3))


def test_rank_examples(rm33_reference):
    assert gf2_rank(BinMatrix.zeros(3, 3)) == 0
    assert gf2_rank(rm33_reference) == 8
    assert gf2_rank(BinMatrix([[1, 0, 1], [1, 0, 1]])) == 1


def test_invert_examples(rm33_reference):
    assert gf2_invert(BinMatrix.identity(4)) == BinMatrix.identity(4)
    assert gf2_mul(rm33_reference, gf2_invert(rm33_reference)) == BinMatrix.identity(8)
    a = random_full_rank(np.random.default_rng(0), 6)
    assert gf2_mul(a, gf2_invert(a)) == BinMatrix.identity(6)


def test_invert_singular():
    with pytest.raises(SingularMatrixError):
        gf2_invert(BinMatrix([[1, 1], [1, 1]]))
    with pytest.raises(ShapeError):
        gf2_invert(BinMatrix([[1, 1, 0]]))


def test_nullspace_table1_code():
    g = BinMatrix.from_rows(["0011", "1101"])
    h = gf2_nullspace(g)
    assert h.shape == (2, 4)
    assert gf2_mul(g, h.T) == BinMatrix.zeros(2, 2)
    assert gf2_rank(h) == 2


def test_nullspace_identity_is_empty():
    h = gf2_nullspace(BinMatrix.identity(5))
    assert h.shape == (0, 5)


def test_nullspace_exhaustive_check():
    rng = np.random.default_rng(11)
    a = BinMatrix(rng.integers(0, 2, (3, 8)))
    h = gf2_nullspace(a)
    assert h.rows == 8 - gf2_rank(a)
    # brute force: the kernel has exactly 2**rows(h) elements and h spans it
    kernel = {v for v in itertools.product((0, 1), repeat=8)
              if not (a.array @ np.array(v) % 2).any()}
    spanned = {tuple((np.array(c) @ h.array) % 2) for c in itertools.product((0, 1), repeat=h.rows)}
    assert spanned == kernel


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_inverse_property(n, seed):
    a = random_full_rank(np.random.default_rng(seed), n)
    assert gf2_mul(gf2_invert(a), a) == BinMatrix.identity(n)


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_rank_nullity(a):
    h = gf2_nullspace(a)
    assert gf2_rank(a) + h.rows == a.cols
    if h.rows:
        assert not gf2_mul(a, h.T).array.any()


def test_mul_associative_exhaustive_2x2():
    mats = [BinMatrix(np.array(bits).reshape(2, 2)) for bits in itertools.product((0, 1), repeat=4)]
    for a in mats:
        for b in mats:
            for c in mats:
                assert gf2_mul(gf2_mul(a, b), c) == gf2_mul(a, gf2_mul(b, c))
