"""Coset-style secrecy codes: encoding, syndrome decoding, codebooks.

A code is defined by two row blocks of a full-rank ``n x n`` matrix. The
``k`` coset rows are multiplied by the secret message and select a coset;
the ``n - k`` code rows span the linear code ``C`` and are multiplied by
uniform auxiliary bits that pick a word inside the coset. Decoding computes
the syndrome ``y @ H.T`` and maps it back to the message with a ``k x k``
correction matrix, so any full-rank split works, not only ones where the
syndrome equals the message directly.

Bit vectors are numpy arrays of 0/1 integers. ``encode``/``decode`` accept a
single vector or a 2-D batch (one word per row).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .binmat import (
    BinMatrix,
    ShapeError,
    gf2_invert,
    gf2_mul,
    gf2_nullspace,
    gf2_rank,
    vstack,
)
from .rmcode import wiretap_generator

ENUMERATION_LIMIT = 16

TABLE1_CODE_ROWS = ("0011", "1101")
TABLE1_COSET_ROWS = ("0111", "1100")


class CodeConstructionError(ValueError):
    """The supplied row blocks do not define a valid secrecy code."""


class EnumerationLimitError(ValueError):
    """Blocklength too large for exhaustive enumeration."""


@dataclass(frozen=True, eq=False)
class SecrecyCode:
    coset_rows: BinMatrix
    code_rows: BinMatrix
    parity: BinMatrix
    correction: BinMatrix
    name: str = ""

    @property
    def n(self) -> int:
        return self.coset_rows.cols

    @property
    def k(self) -> int:
        return self.coset_rows.rows

    @property
    def generator(self) -> BinMatrix:
        """``[coset_rows; code_rows]``, the matrix applied to ``[m, aux]``."""
        return vstack([self.coset_rows, self.code_rows])


def build_secrecy_code(
    coset_rows: BinMatrix, code_rows: BinMatrix, name: str = ""
) -> SecrecyCode:
    if coset_rows.cols != code_rows.cols:
        raise CodeConstructionError(
            f"coset rows have {coset_rows.cols} columns, code rows {code_rows.cols}"
        )
    n = coset_rows.cols
    if coset_rows.rows + code_rows.rows != n:
        raise CodeConstructionError(
            f"{coset_rows.rows} + {code_rows.rows} rows do not make a square {n}x{n} matrix"
        )
    rank = gf2_rank(vstack([coset_rows, code_rows]))
    if rank != n:
        raise CodeConstructionError(
            f"stacked generator has rank {rank} < {n}: cosets are not unique per message"
        )
    parity = gf2_nullspace(code_rows)
    if parity.rows != coset_rows.rows:
        raise CodeConstructionError(
            f"code rows are dependent: parity check has {parity.rows} rows, expected {coset_rows.rows}"
        )
    # full stacked rank already guarantees this product is invertible
    correction = gf2_invert(gf2_mul(coset_rows, parity.T))
    return SecrecyCode(coset_rows, code_rows, parity, correction, name)


def table1_code() -> SecrecyCode:
    """The (n=4, k=2) code whose codebook is the classic 4x4 coset table."""
    return build_secrecy_code(
        BinMatrix.from_rows(TABLE1_COSET_ROWS),
        BinMatrix.from_rows(TABLE1_CODE_ROWS),
        name="table1",
    )


def rm_secrecy_code(
    m: int,
    message_block: Literal["lower", "upper"] = "lower",
    split: int | None = None,
) -> SecrecyCode:
    """Secrecy code from the full-order RM(m, m) generator.

    ``message_block="lower"`` puts the message on the high-degree rows below
    the split and uses the low-degree rows (which contain RM(1, m) for the
    default split) as the auxiliary code. This is the wiring that matches
    the 4x4 coset table. ``"upper"`` swaps the roles; for the default split
    it leaks exactly as much as sending the message uncoded, because the
    message is readable off the low-weight evaluation points.
    """
    upper, lower = wiretap_generator(m, split)
    if message_block == "lower":
        return build_secrecy_code(lower, upper, name=f"rm{m}{m}")
    if message_block == "upper":
        return build_secrecy_code(upper, lower, name=f"rm{m}{m}-upper")
    raise ValueError(f"message_block must be 'lower' or 'upper', not {message_block!r}")


def uncoded(k: int) -> SecrecyCode:
    """Identity code: the message is sent as is, no auxiliary bits."""
    return build_secrecy_code(
        BinMatrix.identity(k), BinMatrix.zeros(0, k), name=f"uncoded{k}"
    )


def _bits(x, width: int, what: str) -> np.ndarray:
    a = np.asarray(x, dtype=np.int64)
    if a.shape[-1:] != (width,):
        raise ShapeError(f"{what} must have length {width}, got shape {a.shape}")
    if np.any((a != 0) & (a != 1)):
        raise ValueError(f"{what} must contain only 0/1")
    return a


def encode(code: SecrecyCode, m, aux) -> np.ndarray:
    m = _bits(m, code.k, "message")
    aux = _bits(aux, code.n - code.k, "auxiliary message")
    word = m @ code.coset_rows.array.astype(np.int64)
    if code.n > code.k:
        word = word + aux @ code.code_rows.array.astype(np.int64)
    return (word & 1).astype(np.uint8)


def syndrome(code: SecrecyCode, y) -> np.ndarray:
    y = _bits(y, code.n, "received word")
    return ((y @ code.parity.array.T.astype(np.int64)) & 1).astype(np.uint8)


def decode(code: SecrecyCode, y) -> np.ndarray:
    s = syndrome(code, y).astype(np.int64)
    return ((s @ code.correction.array.astype(np.int64)) & 1).astype(np.uint8)


def random_aux(code: SecrecyCode, rng: np.random.Generator, count: int | None = None):
    shape = (code.n - code.k,) if count is None else (count, code.n - code.k)
    return rng.integers(0, 2, size=shape, dtype=np.uint8)


def all_vectors(width: int) -> np.ndarray:
    """Every ``width``-bit vector, row ``i`` being ``i`` in binary (MSB first)."""
    idx = np.arange(2**width)
    return ((idx[:, None] >> np.arange(width - 1, -1, -1)) & 1).astype(np.uint8)


def pack(bits) -> np.ndarray:
    """Pack 0/1 rows into integers, first column most significant."""
    bits = np.asarray(bits, dtype=np.int64)
    weights = 1 << np.arange(bits.shape[-1] - 1, -1, -1, dtype=np.int64)
    return bits @ weights


def codebook(code: SecrecyCode) -> np.ndarray:
    """All codewords, shape ``(2**k, 2**(n-k), n)``, indexed by (m, aux)."""
    if code.n > ENUMERATION_LIMIT:
        raise EnumerationLimitError(
            f"n={code.n} exceeds the enumeration limit of {ENUMERATION_LIMIT}"
        )
    msgs = all_vectors(code.k)
    auxs = all_vectors(code.n - code.k)
    g = code.generator.array.astype(np.int64)
    stacked = np.concatenate(
        [
            np.repeat(msgs, len(auxs), axis=0),
            np.tile(auxs, (len(msgs), 1)),
        ],
        axis=1,
    ).astype(np.int64)
    words = (stacked @ g) & 1
    return words.reshape(len(msgs), len(auxs), code.n).astype(np.uint8)


def codebook_csv(code: SecrecyCode) -> str:
    """Codebook as CSV with columns coset_index, aux_index, codeword_bits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["coset_index", "aux_index", "codeword_bits"])
    for mi, row in enumerate(codebook(code)):
        for ai, word in enumerate(row):
            w.writerow([mi, ai, "".join(map(str, word))])
    return buf.getvalue()


def codebook_table(code: SecrecyCode) -> str:
    """Human-readable table, one coset per line."""
    book = codebook(code)
    k, r = code.k, code.n - code.k
    header = ["Coset"] + [f"aux={''.join(map(str, a))}" for a in all_vectors(r)]
    lines = ["  ".join(header)]
    for mi, (msg, row) in enumerate(zip(all_vectors(k), book)):
        label = f"C{mi} (m={''.join(map(str, msg))})"
        lines.append("  ".join([label] + ["".join(map(str, w)) for w in row]))
    return "\n".join(lines) + "\n"
