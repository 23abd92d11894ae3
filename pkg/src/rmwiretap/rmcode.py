"""Reed-Muller generator matrices built from monomial evaluations.

Column ``j`` of a length-``2**m`` row is the evaluation point whose binary
expansion is ``j`` with ``x_1`` as the most significant bit, so the constant
monomial gives ``11..1`` and ``x_m`` gives ``0101..``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .binmat import BinMatrix, vstack


@dataclass(frozen=True, order=True)
class Monomial:
    """Product of distinct variables ``x_i``; the empty product is 1."""

    variables: tuple[int, ...] = ()

    def __post_init__(self):
        vs = tuple(sorted(self.variables))
        if len(set(vs)) != len(vs):
            raise ValueError(f"repeated variable in {self.variables}")
        if any(v < 1 for v in vs):
            raise ValueError("variable indices start at 1")
        object.__setattr__(self, "variables", vs)

    @property
    def degree(self) -> int:
        return len(self.variables)

    def __str__(self) -> str:
        return "".join(f"x{v}" for v in self.variables) or "1"


@dataclass(frozen=True)
class RmSpec:
    r: int
    m: int

    def __post_init__(self):
        if self.m < 0 or not 0 <= self.r <= self.m:
            raise ValueError(f"need 0 <= r <= m, got r={self.r}, m={self.m}")

    @property
    def n(self) -> int:
        return 2**self.m

    @property
    def k(self) -> int:
        return sum(comb(self.m, i) for i in range(self.r + 1))


def monomials(r: int, m: int) -> list[Monomial]:
    """All monomials of degree <= r, by degree then lexicographically."""
    return [
        Monomial(vs)
        for d in range(r + 1)
        for vs in combinations(range(1, m + 1), d)
    ]


def monomial_row(mono: Monomial, m: int) -> np.ndarray:
    if any(v > m for v in mono.variables):
        raise ValueError(f"{mono} uses a variable outside x1..x{m}")
    cols = np.arange(2**m)
    row = np.ones(2**m, dtype=np.uint8)
    for v in mono.variables:
        row &= ((cols >> (m - v)) & 1).astype(np.uint8)
    return row


def rm_generator(spec: RmSpec) -> BinMatrix:
    rows = [monomial_row(mono, spec.m) for mono in monomials(spec.r, spec.m)]
    return BinMatrix(np.vstack(rows))


def wiretap_generator(m: int, split: int | None = None) -> tuple[BinMatrix, BinMatrix]:
    """Split the full-order RM(m, m) generator into two row blocks.

    The upper block holds the first ``split`` rows (default ``n // 2``) and
    the lower block the rest. For ``m = 3`` the two blocks stacked give the
    familiar 8x8 matrix with the dashed line after row 4. Which block carries
    the message is decided by :func:`rmwiretap.secrecy.rm_secrecy_code`.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    full = rm_generator(RmSpec(m, m)).array
    n = full.shape[0]
    split = n // 2 if split is None else split
    if not 0 < split < n:
        raise ValueError(f"split must lie strictly between 0 and {n}")
    return BinMatrix(full[:split]), BinMatrix(full[split:])


def stacked(m: int, split: int | None = None) -> BinMatrix:
    return vstack(wiretap_generator(m, split))
