"""Time the numba and pure-numpy kernels on oracle-sized inputs.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5]

Compilation is triggered once before timing, so numba figures exclude JIT
cost. Both paths are also checked to agree before anything is timed.
"""

import argparse
import timeit

import numpy as np

from rmwiretap import kernels
from rmwiretap.phy import bpsk_modulate
from rmwiretap.secrecy import codebook, pack, rm_secrecy_code, table1_code


def logsumexp_case(m, samples):
    code = rm_secrecy_code(m)
    rng = np.random.default_rng(0)
    signs = np.ascontiguousarray(bpsk_modulate(codebook(code)))
    group = rng.integers(0, signs.shape[0], size=samples).astype(np.int64)
    z = rng.normal(size=(samples, code.n))
    return f"grouped_logsumexp RM({m},{m}) N={samples}", (z, signs, group, 2.0), (
        kernels._grouped_logsumexp_numba,
        kernels._grouped_logsumexp_numpy,
    )


def bsc_case(code, label):
    words = np.ascontiguousarray(pack(codebook(code)), dtype=np.int64)
    return f"bsc_coset_likelihood {label}", (words, code.n, 0.1), (
        kernels._bsc_coset_likelihood_numba,
        kernels._bsc_coset_likelihood_numpy,
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    cases = [
        logsumexp_case(2, 20_000),
        logsumexp_case(3, 20_000),
        logsumexp_case(4, 2_000),
        bsc_case(table1_code(), "n=4"),
        bsc_case(rm_secrecy_code(3), "n=8"),
    ]
    print(f"{'kernel':45s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for label, inputs, (fast, slow) in cases:
        np.testing.assert_allclose(fast(*inputs), slow(*inputs), rtol=1e-10, atol=1e-15)
        t_fast = min(timeit.repeat(lambda: fast(*inputs), number=1, repeat=args.repeat))
        t_slow = min(timeit.repeat(lambda: slow(*inputs), number=1, repeat=args.repeat))
        print(f"{label:45s} {1e3 * t_fast:10.2f} {1e3 * t_slow:10.2f} {t_slow / t_fast:8.1f}x")


if __name__ == "__main__":
    main()
