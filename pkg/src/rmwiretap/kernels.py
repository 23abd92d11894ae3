"""Inner loops of the mutual-information oracles.

Each kernel exists twice: a ``*_numba`` version written as explicit loops
and compiled with numba, and a ``*_numpy`` version built from vectorised
array operations. The public name is bound to one of them according to
:data:`rmwiretap._accel.USE_NUMBA`. Both must agree to rounding error;
``tests/test_kernels.py`` checks this and ``benchmarks/bench_kernels.py``
times them.
"""

from __future__ import annotations

import numpy as np

from ._accel import USE_NUMBA, njit

# Samples per chunk for the numpy path; bounds the (chunk, words) temporary.
_CHUNK = 4096


@njit
def _grouped_logsumexp_numba(z, signs, group, scale):
    n_samples, n = z.shape
    n_words = signs.shape[1]
    out = np.empty(n_samples)
    acc = np.empty(n_words)
    for i in range(n_samples):
        g = group[i]
        best = -np.inf
        for a in range(n_words):
            s = 0.0
            for j in range(n):
                s += z[i, j] * signs[g, a, j]
            s *= scale
            acc[a] = s
            if s > best:
                best = s
        tot = 0.0
        for a in range(n_words):
            tot += np.exp(acc[a] - best)
        out[i] = best + np.log(tot)
    return out


def _grouped_logsumexp_numpy(z, signs, group, scale):
    out = np.empty(z.shape[0])
    for g in np.unique(group):
        idx = np.flatnonzero(group == g)
        for start in range(0, idx.size, _CHUNK):
            sel = idx[start : start + _CHUNK]
            corr = (z[sel] @ signs[g].T) * scale
            best = corr.max(axis=1)
            out[sel] = best + np.log(np.exp(corr - best[:, None]).sum(axis=1))
    return out


@njit
def _bsc_coset_likelihood_numba(words, n, p):
    n_groups, n_words = words.shape
    n_out = 1 << n
    table = np.empty(n + 1)
    for d in range(n + 1):
        table[d] = p**d * (1.0 - p) ** (n - d)
    out = np.zeros((n_groups, n_out))
    for g in range(n_groups):
        for a in range(n_words):
            w = words[g, a]
            for z in range(n_out):
                x = w ^ z
                d = 0
                while x:
                    x &= x - 1
                    d += 1
                out[g, z] += table[d]
        for z in range(n_out):
            out[g, z] /= n_words
    return out


def _bsc_coset_likelihood_numpy(words, n, p):
    d = np.arange(n + 1)
    table = p**d * (1.0 - p) ** (n - d)
    zs = np.arange(1 << n, dtype=np.int64)
    out = np.empty((words.shape[0], zs.size))
    for g in range(words.shape[0]):
        dist = np.bitwise_count(words[g][:, None] ^ zs[None, :])
        out[g] = table[dist].mean(axis=0)
    return out


if USE_NUMBA:
    _grouped_logsumexp = _grouped_logsumexp_numba
    _bsc_coset_likelihood = _bsc_coset_likelihood_numba
else:
    _grouped_logsumexp = _grouped_logsumexp_numpy
    _bsc_coset_likelihood = _bsc_coset_likelihood_numpy


def grouped_logsumexp(z, signs, group, scale: float) -> np.ndarray:
    """Per-sample ``log sum_a exp(scale * <z_i, signs[group_i, a]>)``.

    Parameters
    ----------
    z : ndarray, shape (N, n)
        Received samples (soft values, or +/-1 hard decisions).
    signs : ndarray, shape (G, A, n)
        BPSK images of ``A`` codewords in each of ``G`` groups (cosets).
    group : ndarray of int, shape (N,)
        Coset index for each sample.
    scale : float
        ``1/sigma**2`` for soft AWGN, ``0.5*log((1-p)/p)`` for a BSC.
    """
    z = np.ascontiguousarray(z, dtype=np.float64)
    signs = np.ascontiguousarray(signs, dtype=np.float64)
    group = np.ascontiguousarray(group, dtype=np.int64)
    return _grouped_logsumexp(z, signs, group, float(scale))


def bsc_coset_likelihood(words, n: int, p: float) -> np.ndarray:
    """``P(z | group)`` for every ``n``-bit output ``z`` of a BSC(p).

    ``words[g, a]`` is the ``a``-th codeword of group ``g`` packed as an
    integer (bit ``n-1-j`` holds position ``j``); the group's words are
    equiprobable. Returns shape ``(G, 2**n)`` indexed by packed ``z``.
    """
    words = np.ascontiguousarray(words, dtype=np.int64)
    return _bsc_coset_likelihood(words, int(n), float(p))
