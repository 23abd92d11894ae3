import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmwiretap.phy import (
    ChannelSpec,
    IndoorParams,
    awgn,
    bpsk_modulate,
    bsc,
    derive_rng,
    diff_decode,
    diff_encode,
    hard_bsc_p,
    hard_decision,
    indoor_snr,
    noise_variance,
    q_function,
    receive_bits,
    transmit,
)


def test_bpsk_mapping():
    np.testing.assert_array_equal(bpsk_modulate([0, 1, 1, 0]), [1.0, -1.0, -1.0, 1.0])
    np.testing.assert_array_equal(hard_decision([0.3, -0.1, -2.0, 5.0]), [0, 1, 1, 0])


def test_noise_variance_points():
    assert noise_variance(0.0) == 1.0
    assert noise_variance(10.0) == pytest.approx(0.1)
    assert noise_variance(-10.0) == pytest.approx(10.0)


def test_q_function_values():
    assert q_function(0.0) == pytest.approx(0.5)
    assert q_function(1.0) == pytest.approx(0.5 * math.erfc(1 / math.sqrt(2)))
    assert hard_bsc_p(0.0) == pytest.approx(0.158655, abs=1e-6)


def test_awgn_empirical_variance():
    rng = derive_rng(1)
    x = np.zeros(200_000)
    y = awgn(x, 3.0, rng)
    assert y.var() == pytest.approx(noise_variance(3.0), rel=0.02)


def test_awgn_noiseless():
    x = np.array([1.0, -1.0])
    np.testing.assert_array_equal(awgn(x, math.inf, derive_rng(0)), x)
    with pytest.raises(ValueError):
        awgn(x, math.nan, derive_rng(0))


def test_hard_awgn_ber_matches_q():
    rng = derive_rng(2)
    bits = np.zeros(200_000, dtype=np.uint8)
    ch = ChannelSpec("awgn", snr_db=0.0)
    ber = receive_bits(bits, ch, rng).mean()
    assert abs(ber - hard_bsc_p(0.0)) < 4 * math.sqrt(0.16 * 0.84 / 200_000)


def test_bsc_flip_rate():
    rng = derive_rng(3)
    out = bsc(np.zeros(100_000, dtype=np.uint8), 0.1, rng)
    assert abs(out.mean() - 0.1) < 0.005
    np.testing.assert_array_equal(bsc([0, 1, 1], 0.0, rng), [0, 1, 1])
    np.testing.assert_array_equal(bsc([0, 1, 1], 1.0, rng), [1, 0, 0])
    with pytest.raises(ValueError):
        bsc([0], 1.5, rng)


def test_differential_examples():
    np.testing.assert_array_equal(diff_encode([1, 0, 1, 1]), [1, 1, 0, 1])
    np.testing.assert_array_equal(diff_decode([1, 1, 0, 1]), [1, 0, 1, 1])
    with pytest.raises(ValueError):
        diff_encode([])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=64))
def test_differential_roundtrip(bits):
    np.testing.assert_array_equal(diff_decode(diff_encode(bits)), bits)
    # inverting every channel bit only corrupts the first decoded bit
    flipped = diff_decode(1 - diff_encode(bits))
    np.testing.assert_array_equal(flipped[1:], np.asarray(bits)[1:])


def test_derive_rng_is_order_independent():
    a = derive_rng(7, 3, 1).random(4)
    _ = derive_rng(7, 0, 0).random(100)
    b = derive_rng(7, 3, 1).random(4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, derive_rng(7, 1, 3).random(4))


def test_indoor_path_loss_without_shadowing():
    p = IndoorParams(tx_snr_ref_db=20.0, d0=3.0, path_loss_exponent=2.0, shadowing_sigma_db=0.0)
    rng = derive_rng(0)
    assert indoor_snr((0.0, 0.0), p, rng) == pytest.approx(20.0)
    assert indoor_snr((30.0, 0.0), p, rng) == pytest.approx(0.0)
    assert indoor_snr((0.0, 3.0), p, rng) == pytest.approx(20.0)


def test_indoor_monotone_in_distance():
    p = IndoorParams(shadowing_sigma_db=0.0)
    snrs = [indoor_snr((d, 0.0), p, derive_rng(0)) for d in range(3, 40)]
    assert all(a > b for a, b in zip(snrs, snrs[1:]))


def test_indoor_shadowing_spread():
    p = IndoorParams(tx_snr_ref_db=0.0, shadowing_sigma_db=4.0)
    rng = derive_rng(4)
    vals = np.array([indoor_snr((3.0, 0.0), p, rng) for _ in range(4000)])
    assert vals.std() == pytest.approx(4.0, rel=0.05)


def test_channel_spec_validation():
    with pytest.raises(ValueError):
        ChannelSpec("awgn")
    with pytest.raises(ValueError):
        ChannelSpec("bsc", p=2.0)
    with pytest.raises(ValueError):
        ChannelSpec("indoor")
    with pytest.raises(ValueError):
        ChannelSpec("fiber")
    with pytest.raises(ValueError):
        IndoorParams(fading="rician")


def test_transmit_outputs():
    rng = derive_rng(0)
    bits = np.array([0, 1, 0])
    np.testing.assert_array_equal(transmit(bits, ChannelSpec("noiseless"), rng), [1.0, -1.0, 1.0])
    assert transmit(bits, ChannelSpec("bsc", p=0.0), rng).dtype == np.uint8
    ind = ChannelSpec("indoor", position=(6.0, 0.0), seed=3)
    assert ind.effective_snr_db() == ind.effective_snr_db()


def test_more_mapping_examples():
    np.testing.assert_array_equal(bpsk_modulate([0, 1, 0, 1]), [1, -1, 1, -1])
    for b in (0, 1):
        assert hard_decision(bpsk_modulate([b]))[0] == b
    assert hard_decision([-0.3])[0] == 1 and hard_decision([0.0])[0] == 0
    np.testing.assert_array_equal(diff_encode([1, 1, 1]), [1, 0, 1])
    np.testing.assert_array_equal(diff_encode([0, 0, 0, 0]), [0, 0, 0, 0])


def test_awgn_variance_million_draws():
    x = bpsk_modulate(np.zeros(1_000_000))
    noise = awgn(x, 0.0, derive_rng(20)) - x
    assert abs(noise.var() - 1.0) < 0.01


def test_awgn_noise_independent_of_symbol():
    rng = derive_rng(21)
    bits = rng.integers(0, 2, 200_000)
    x = bpsk_modulate(bits)
    noise = awgn(x, 0.0, rng) - x
    m0, m1 = noise[bits == 0], noise[bits == 1]
    se = math.sqrt(m0.var() / m0.size + m1.var() / m1.size)
    assert abs(m0.mean() - m1.mean()) < 3 * se


@pytest.mark.parametrize("snr_db", [-3.0, 2.0, 6.0])
def test_uncoded_ber_matches_closed_form(snr_db):
    n = 400_000
    ber = receive_bits(np.zeros(n, dtype=np.uint8), ChannelSpec("awgn", snr_db=snr_db), derive_rng(22)).mean()
    p = float(q_function(10 ** (snr_db / 20)))
    assert abs(ber - p) < 3 * math.sqrt(p * (1 - p) / n)


def test_bsc_million_bits():
    n = 1_000_000
    rate = bsc(np.zeros(n, dtype=np.uint8), 0.1, derive_rng(23)).mean()
    assert abs(rate - 0.1) < 3 * math.sqrt(0.09 / n)


def test_indoor_doubling_distance_and_shadowing_mean():
    p = IndoorParams(tx_snr_ref_db=10.0, path_loss_exponent=2.0, shadowing_sigma_db=0.0)
    drop = indoor_snr((6.0, 0.0), p, derive_rng(0)) - indoor_snr((12.0, 0.0), p, derive_rng(0))
    assert drop == pytest.approx(20 * math.log10(2))
    p = IndoorParams(tx_snr_ref_db=10.0, shadowing_sigma_db=4.0)
    rng = derive_rng(24)
    vals = np.array([indoor_snr((9.0, 0.0), p, rng) for _ in range(100_000)])
    expected = 10.0 - 25 * math.log10(3.0)
    assert abs(vals.mean() - expected) < 3 * 4.0 / math.sqrt(vals.size)


def test_rayleigh_fading_lowers_mean_snr():
    p = IndoorParams(shadowing_sigma_db=0.0, fading="rayleigh")
    rng = derive_rng(25)
    vals = np.array([indoor_snr((3.0, 0.0), p, rng) for _ in range(20_000)])
    # E[10 log10 X] for X ~ Exp(1) is -2.507 dB
    assert vals.mean() - 10.0 == pytest.approx(-2.507, abs=0.05)


def test_same_seed_same_channel_output():
    x = np.random.default_rng(0).integers(0, 2, 100)
    ch = ChannelSpec("awgn", snr_db=1.0)
    np.testing.assert_array_equal(transmit(x, ch, derive_rng(5)), transmit(x, ch, derive_rng(5)))
