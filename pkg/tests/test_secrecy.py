import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmwiretap.binmat import BinMatrix, ShapeError, gf2_mul, gf2_rank
from rmwiretap.secrecy import (
    CodeConstructionError,
    EnumerationLimitError,
    all_vectors,
    build_secrecy_code,
    codebook,
    codebook_csv,
    codebook_table,
    decode,
    encode,
    pack,
    random_aux,
    rm_secrecy_code,
    syndrome,
    table1_code,
    uncoded,
)

from conftest import TABLE1


def word(bits):
    return "".join(map(str, bits))


def test_table1_codebook_exact():
    book = codebook(table1_code())
    for mi, msg in enumerate(["00", "01", "10", "11"]):
        assert sorted(word(w) for w in book[mi]) == sorted(TABLE1[msg])
        # same order as the reference table, not just the same set
        assert [word(w) for w in book[mi]] == TABLE1[msg]


def test_table1_decode_every_word():
    code = table1_code()
    for msg, words in TABLE1.items():
        for w in words:
            assert word(decode(code, [int(c) for c in w])) == msg


def test_table1_cosets_partition_space():
    book = codebook(table1_code()).reshape(-1, 4)
    assert sorted(pack(book)) == list(range(16))


@pytest.mark.parametrize("code", [table1_code(), rm_secrecy_code(2), rm_secrecy_code(3),
                                  rm_secrecy_code(3, "upper"), uncoded(3)])
def test_roundtrip_exhaustive(code):
    book = codebook(code)
    msgs = all_vectors(code.k)
    for mi in range(2**code.k):
        np.testing.assert_array_equal(decode(code, book[mi]), np.broadcast_to(msgs[mi], (book.shape[1], code.k)))


def test_rm4_roundtrip_random():
    code = rm_secrecy_code(4)
    rng = np.random.default_rng(5)
    m = rng.integers(0, 2, (500, 8))
    np.testing.assert_array_equal(decode(code, encode(code, m, random_aux(code, rng, 500))), m)


def test_code_rows_have_zero_syndrome():
    for code in (table1_code(), rm_secrecy_code(3), rm_secrecy_code(4)):
        assert not gf2_mul(code.code_rows, code.parity.T).array.any()
        assert gf2_rank(code.parity) == code.k


def test_rm_default_wiring():
    code = rm_secrecy_code(3)
    assert code.name == "rm33" and (code.n, code.k) == (8, 4)
    # auxiliary code contains the all-ones word (the constant monomial)
    assert code.code_rows.array[0].all()
    assert rm_secrecy_code(3, "upper").name == "rm33-upper"
    with pytest.raises(ValueError):
        rm_secrecy_code(3, "middle")


def test_uncoded_is_identity():
    code = uncoded(4)
    m = np.array([1, 0, 1, 1])
    np.testing.assert_array_equal(encode(code, m, np.zeros(0, dtype=int)), m)
    assert codebook(code).shape == (16, 1, 4)


def test_rank_deficient_rejected():
    with pytest.raises(CodeConstructionError):
        build_secrecy_code(BinMatrix.from_rows(["0011", "1100"]), BinMatrix.from_rows(["1111", "0011"]))
    with pytest.raises(CodeConstructionError):
        build_secrecy_code(BinMatrix.from_rows(["0011"]), BinMatrix.from_rows(["1111", "0011"]))


def test_input_validation():
    code = table1_code()
    with pytest.raises(ShapeError):
        encode(code, [1, 0, 1], [0, 0])
    with pytest.raises(ValueError):
        encode(code, [2, 0], [0, 0])
    with pytest.raises(ShapeError):
        decode(code, [1, 0, 1])


def test_enumeration_limit():
    with pytest.raises(EnumerationLimitError):
        codebook(rm_secrecy_code(5))


def test_codebook_csv_and_table():
    text = codebook_csv(table1_code())
    lines = text.splitlines()
    assert lines[0] == "coset_index,aux_index,codeword_bits"
    assert len(lines) == 17
    assert lines[1] == "0,0,0000"
    table = codebook_table(table1_code())
    assert "1101" in table.splitlines()[1]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_full_rank_split_roundtrip(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    k = int(rng.integers(1, n + 1))
    while True:
        g = rng.integers(0, 2, (n, n))
        if gf2_rank(BinMatrix(g)) == n:
            break
    code = build_secrecy_code(BinMatrix(g[:k]), BinMatrix(g[k:]))
    m = rng.integers(0, 2, (20, k))
    y = encode(code, m, random_aux(code, rng, 20))
    np.testing.assert_array_equal(decode(code, y), m)
    # syndrome depends only on the coset
    y2 = encode(code, m, random_aux(code, rng, 20))
    np.testing.assert_array_equal(syndrome(code, y), syndrome(code, y2))


def test_table1_encode_examples():
    code = table1_code()
    assert word(encode(code, [0, 1], [0, 0])) == "1100"
    assert word(encode(code, [1, 1], [0, 1])) == "0110"
    assert word(encode(code, [0, 0], [0, 0])) == "0000"
    assert word(decode(code, [0, 0, 0, 0])) == "00"
    assert word(decode(code, [1, 1, 0, 1])) == "00"


def test_rm2_codebook_partitions_space():
    book = codebook(rm_secrecy_code(2))
    assert book.shape == (4, 4, 4)
    assert sorted(pack(book.reshape(-1, 4))) == list(range(16))
    for code in (table1_code(), rm_secrecy_code(3), uncoded(2)):
        assert not codebook(code)[0, 0].any()


def _in_span(rows, v):
    span = {tuple(x) for x in (all_vectors(rows.shape[0]) @ rows) % 2}
    return tuple(v) in span


def test_coset_structure_and_linearity():
    code = rm_secrecy_code(3)
    rows = code.code_rows.array.astype(int)
    rng = np.random.default_rng(8)
    for _ in range(50):
        m1, m2 = rng.integers(0, 2, (2, code.k))
        a1, a2 = rng.integers(0, 2, (2, code.n - code.k))
        assert _in_span(rows, encode(code, m1, a1) ^ encode(code, m1, a2))
        if not np.array_equal(m1, m2):
            assert not _in_span(rows, encode(code, m1, a1) ^ encode(code, m2, a1))
        y1, y2 = rng.integers(0, 2, (2, code.n))
        np.testing.assert_array_equal(decode(code, y1 ^ y2), decode(code, y1) ^ decode(code, y2))
        c = encode(code, np.zeros(code.k, dtype=int), a1)
        np.testing.assert_array_equal(decode(code, y1 ^ c), decode(code, y1))
