"""BPSK modulation and simulated channels.

SNR convention: per-symbol ``Es / sigma**2`` in dB on a real baseband with
``Es = 1``, so the noise variance is ``10 ** (-snr_db / 10)``. Bit 0 maps to
+1 and bit 1 to -1.

Randomness always comes from an explicit ``numpy.random.Generator``. Use
:func:`derive_rng` to get independent, order-free streams for parallel work
items from one master seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.special import ndtr


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Generator determined by ``(seed, *keys)`` only."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))


def noise_variance(snr_db: float) -> float:
    return 10.0 ** (-snr_db / 10.0)


def q_function(x):
    """Gaussian tail probability ``P(N(0,1) > x)``."""
    return ndtr(-np.asarray(x, dtype=np.float64))


def hard_bsc_p(snr_db: float) -> float:
    """Crossover probability of hard-decided BPSK over AWGN at ``snr_db``."""
    return float(q_function(1.0 / math.sqrt(noise_variance(snr_db))))


def bpsk_modulate(bits) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def hard_decision(samples) -> np.ndarray:
    return (np.asarray(samples) < 0).astype(np.uint8)


def diff_encode(bits) -> np.ndarray:
    """``d[0] = b[0]``, ``d[i] = d[i-1] ^ b[i]`` along the last axis."""
    b = np.asarray(bits, dtype=np.uint8)
    if b.shape[-1] == 0:
        raise ValueError("empty bit sequence")
    return (np.cumsum(b, axis=-1, dtype=np.int64) & 1).astype(np.uint8)


def diff_decode(bits) -> np.ndarray:
    d = np.asarray(bits, dtype=np.uint8)
    if d.shape[-1] == 0:
        raise ValueError("empty bit sequence")
    out = d.copy()
    out[..., 1:] ^= d[..., :-1]
    return out


def awgn(samples, snr_db: float, rng: np.random.Generator) -> np.ndarray:
    x = np.asarray(samples, dtype=np.float64)
    if math.isinf(snr_db) and snr_db > 0:
        return x.copy()
    if not math.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite or +inf, got {snr_db}")
    sigma = math.sqrt(noise_variance(snr_db))
    return x + sigma * rng.standard_normal(x.shape)


def bsc(bits, p: float, rng: np.random.Generator) -> np.ndarray:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"crossover probability {p} outside [0, 1]")
    b = np.asarray(bits, dtype=np.uint8)
    flips = rng.random(b.shape) < p
    return b ^ flips.astype(np.uint8)


@dataclass(frozen=True)
class IndoorParams:
    """Log-distance path loss with log-normal shadowing.

    Distances are in feet. ``tx_snr_ref_db`` is the SNR seen at the
    reference distance ``d0``.
    """

    tx_snr_ref_db: float = 10.0
    d0: float = 3.0
    path_loss_exponent: float = 2.5
    shadowing_sigma_db: float = 4.0
    fading: Literal["none", "rayleigh"] = "none"

    def __post_init__(self):
        if self.d0 <= 0:
            raise ValueError("d0 must be positive")
        if self.path_loss_exponent < 0:
            raise ValueError("path loss exponent must be non-negative")
        if self.shadowing_sigma_db < 0:
            raise ValueError("shadowing sigma must be non-negative")
        if self.fading not in ("none", "rayleigh"):
            raise ValueError(f"unknown fading model {self.fading!r}")


def indoor_snr(
    position: tuple[float, float], params: IndoorParams, rng: np.random.Generator
) -> float:
    """Received SNR in dB at ``position`` (feet) from a transmitter at the origin."""
    d = max(math.hypot(*position), params.d0)
    snr = params.tx_snr_ref_db - 10.0 * params.path_loss_exponent * math.log10(d / params.d0)
    if params.shadowing_sigma_db > 0:
        snr += params.shadowing_sigma_db * float(rng.standard_normal())
    if params.fading == "rayleigh":
        snr += 10.0 * math.log10(max(float(rng.exponential(1.0)), 1e-300))
    return snr


@dataclass(frozen=True)
class ChannelSpec:
    """One channel instance.

    ``kind`` is ``"awgn"`` (uses ``snr_db``), ``"bsc"`` (uses ``p``),
    ``"indoor"`` (uses ``position`` and ``indoor``; the SNR is drawn once
    per instance and the link is then AWGN) or ``"noiseless"``.
    """

    kind: Literal["awgn", "bsc", "indoor", "noiseless"]
    snr_db: float | None = None
    p: float | None = None
    position: tuple[float, float] | None = None
    indoor: IndoorParams = field(default_factory=IndoorParams)
    seed: int = 0

    def __post_init__(self):
        if self.kind == "awgn":
            if self.snr_db is None or not math.isfinite(self.snr_db):
                raise ValueError("awgn channel needs a finite snr_db")
        elif self.kind == "bsc":
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError("bsc channel needs 0 <= p <= 1")
        elif self.kind == "indoor":
            if self.position is None:
                raise ValueError("indoor channel needs a position")
        elif self.kind != "noiseless":
            raise ValueError(f"unknown channel kind {self.kind!r}")

    @property
    def soft(self) -> bool:
        """Whether the channel produces real-valued samples."""
        return self.kind in ("awgn", "indoor", "noiseless")

    def effective_snr_db(self, rng: np.random.Generator | None = None) -> float:
        if self.kind == "awgn":
            return float(self.snr_db)
        if self.kind == "noiseless":
            return math.inf
        if self.kind == "indoor":
            return indoor_snr(self.position, self.indoor, rng or derive_rng(self.seed))
        raise ValueError("a BSC has no SNR")


def transmit(
    bits,
    channel: ChannelSpec,
    rng: np.random.Generator,
    snr_db: float | None = None,
) -> np.ndarray:
    """Send bits through ``channel``.

    Returns real samples for AWGN-type channels and bits for a BSC. For an
    indoor channel pass the already drawn ``snr_db`` so every block of a
    position shares the same large-scale SNR.
    """
    if channel.kind == "bsc":
        return bsc(bits, channel.p, rng)
    if snr_db is None:
        snr_db = channel.effective_snr_db(rng)
    return awgn(bpsk_modulate(bits), snr_db, rng)


def receive_bits(
    bits,
    channel: ChannelSpec,
    rng: np.random.Generator,
    snr_db: float | None = None,
) -> np.ndarray:
    """Transmit and hard-decide; always returns bits."""
    out = transmit(bits, channel, rng, snr_db)
    return out if channel.kind == "bsc" else hard_decision(out)
