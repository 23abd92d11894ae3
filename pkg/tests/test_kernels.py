import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.special import logsumexp

from rmwiretap import kernels
from rmwiretap._accel import HAVE_NUMBA
from rmwiretap.phy import bpsk_modulate
from rmwiretap.secrecy import codebook, pack, rm_secrecy_code, table1_code


def _inputs(code, count, seed):
    rng = np.random.default_rng(seed)
    signs = bpsk_modulate(codebook(code))
    group = rng.integers(0, signs.shape[0], size=count)
    z = rng.normal(size=(count, code.n))
    return z, signs, group


def _reference_logsumexp(z, signs, group, scale):
    return np.array([logsumexp(scale * signs[g] @ zi) for zi, g in zip(z, group)])


@pytest.mark.parametrize("impl", ["_grouped_logsumexp_numpy", "_grouped_logsumexp_numba"])
def test_grouped_logsumexp_matches_scipy(impl):
    z, signs, group = _inputs(rm_secrecy_code(3), 300, 0)
    out = getattr(kernels, impl)(z, signs, group, 2.5)
    np.testing.assert_allclose(out, _reference_logsumexp(z, signs, group, 2.5), rtol=1e-12)


def test_grouped_logsumexp_large_scale_is_stable():
    z, signs, group = _inputs(table1_code(), 50, 1)
    out = kernels._grouped_logsumexp_numpy(z, signs, group, 1e4)
    assert np.isfinite(out).all()
    np.testing.assert_allclose(out, kernels._grouped_logsumexp_numba(z, signs, group, 1e4), rtol=1e-12)


def _reference_bsc(words, n, p):
    out = np.zeros((words.shape[0], 2**n))
    for g, row in enumerate(words):
        for z in range(2**n):
            for w in row:
                d = bin(int(w) ^ z).count("1")
                out[g, z] += p**d * (1 - p) ** (n - d)
    return out / words.shape[1]


@pytest.mark.parametrize("impl", ["_bsc_coset_likelihood_numpy", "_bsc_coset_likelihood_numba"])
@pytest.mark.parametrize("p", [0.0, 0.1, 0.5])
def test_bsc_likelihood_matches_loops(impl, p):
    words = pack(codebook(table1_code()))
    out = getattr(kernels, impl)(words, 4, p)
    np.testing.assert_allclose(out, _reference_bsc(words, 4, p), atol=1e-15)
    np.testing.assert_allclose(out.sum(axis=1), 1.0)


def test_bsc_likelihood_paths_agree_rm4():
    words = pack(codebook(rm_secrecy_code(3)))
    np.testing.assert_allclose(
        kernels._bsc_coset_likelihood_numpy(words, 8, 0.07),
        kernels._bsc_coset_likelihood_numba(words, 8, 0.07),
        rtol=1e-12,
    )


def _use_numba_in_subprocess(flag):
    env = dict(os.environ)
    if flag is None:
        env.pop("RMWIRETAP_DISABLE_NUMBA", None)
    else:
        env["RMWIRETAP_DISABLE_NUMBA"] = flag
    out = subprocess.run(
        [sys.executable, "-c", "from rmwiretap import kernels; print(kernels._grouped_logsumexp.__name__)"],
        env=env, capture_output=True, text=True, check=True,
    )
    return out.stdout.strip()


def test_env_flag_selects_numpy_path():
    assert _use_numba_in_subprocess("1") == "_grouped_logsumexp_numpy"


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
def test_default_selects_numba_path():
    assert _use_numba_in_subprocess(None) == "_grouped_logsumexp_numba"
