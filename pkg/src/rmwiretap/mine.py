"""Leakage ``I(M; Z^n)`` to the eavesdropper: neural estimate and exact oracles.

The neural estimator maximises the Donsker-Varadhan bound

    mean(T(m_i, z_i)) - log mean(exp(T(m_i, z_perm(i))))

over the network ``T``. Estimates are computed in nats and reported in bits.

Two oracles check it. :func:`mi_exact_bsc` enumerates every output of a
BSC. :func:`mi_mc_awgn` averages the exact log-likelihood ratio over
simulated AWGN samples. Both use the fact that every secrecy code here has
a full-rank generator: the union of all cosets is the whole space, so the
output marginal ``P(z)`` factorises over positions.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .kernels import bsc_coset_likelihood, grouped_logsumexp
from .neural import AdamConfig, _activations, adam_step, backward, mlp_new
from .phy import (
    ChannelSpec,
    bpsk_modulate,
    derive_rng,
    hard_bsc_p,
    hard_decision,
    noise_variance,
    transmit,
)
from .secrecy import SecrecyCode, codebook, encode, pack, random_aux

LN2 = math.log(2.0)
EXACT_LIMIT = 12


class MineError(RuntimeError):
    """Training produced a non-finite objective."""


@dataclass(frozen=True)
class MineConfig:
    hidden_layers: int = 3
    neurons_per_layer: int = 50
    epochs: int = 20_000
    batch_size: int = 100
    ma_window: int = 100
    adam: AdamConfig = field(default_factory=AdamConfig)
    input_encoding: Literal["binary", "bipolar"] = "binary"
    standardize_soft: bool = False
    bias_correction: bool = False
    ema_rate: float = 0.01
    pool_size: int | None = None

    def __post_init__(self):
        for name in ("hidden_layers", "neurons_per_layer", "epochs", "batch_size", "ma_window"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.ma_window > self.epochs:
            raise ValueError("moving-average window longer than the run")
        if self.batch_size < 2:
            raise ValueError("batch size must be at least 2")
        if self.input_encoding not in ("binary", "bipolar"):
            raise ValueError(f"unknown input encoding {self.input_encoding!r}")
        if self.pool_size is not None and self.pool_size < self.batch_size:
            raise ValueError("sample pool smaller than one batch")

    def layer_sizes(self, input_width: int) -> list[int]:
        return [input_width] + [self.neurons_per_layer] * self.hidden_layers + [1]


# Full-length schedules with the original architectures and learning rate 1e-7.
_FULL_LR = AdamConfig(learning_rate=1e-7)
PRESETS: dict[str, MineConfig] = {
    "full-rm22": MineConfig(3, 50, 200_000, 100, 100, _FULL_LR),
    "full-rm33": MineConfig(4, 200, 500_000, 400, 300, _FULL_LR),
    "full-rm44": MineConfig(6, 500, 4_000_000, 1000, 1000, _FULL_LR),
    # one shared architecture trained on a fixed pool of samples
    "full-pooled": MineConfig(5, 500, 250_000, 1000, 1000, _FULL_LR, pool_size=10_000),
    # same architectures, schedules cut to desk scale
    "desk-rm22": MineConfig(3, 50, 20_000, 100, 100, AdamConfig(1e-4)),
    "desk-rm33": MineConfig(4, 200, 20_000, 400, 300, AdamConfig(1e-4)),
    "desk-rm44": MineConfig(6, 500, 3_000, 1000, 500, AdamConfig(1e-3), input_encoding="bipolar"),
}


@dataclass
class MiTrace:
    per_epoch_estimate_bits: np.ndarray
    smoothed_bits: np.ndarray
    final_bits: float
    window: int

    def to_csv(self) -> str:
        """Columns epoch, raw_bits, smoothed_bits (blank until the window fills)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epoch", "raw_bits", "smoothed_bits"])
        offset = self.window - 1
        for i, raw in enumerate(self.per_epoch_estimate_bits):
            sm = self.smoothed_bits[i - offset] if i >= offset else None
            w.writerow([i, repr(float(raw)), "" if sm is None else repr(float(sm))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, window: int) -> "MiTrace":
        rows = list(csv.DictReader(io.StringIO(text)))
        raw = np.array([float(r["raw_bits"]) for r in rows])
        return from_raw(raw, window)


def from_raw(raw_bits, window: int) -> MiTrace:
    raw = np.asarray(raw_bits, dtype=np.float64)
    smoothed = moving_average(raw, window)
    return MiTrace(raw, smoothed, float(smoothed[-window:].mean()), window)


def moving_average(trace, window: int) -> np.ndarray:
    x = np.asarray(trace, dtype=np.float64)
    if not 1 <= window <= x.size:
        raise ValueError(f"window {window} invalid for a trace of length {x.size}")
    c = np.cumsum(np.concatenate([[0.0], x]))
    return (c[window:] - c[:-window]) / window


def dv_estimate(t_joint, t_marginal) -> float:
    """Donsker-Varadhan value in nats, with a max-shifted log-mean-exp."""
    tj = np.asarray(t_joint, dtype=np.float64)
    tm = np.asarray(t_marginal, dtype=np.float64)
    if tj.size == 0 or tm.size == 0:
        raise ValueError("empty sample")
    if tj.size != tm.size:
        raise ValueError("joint and marginal samples differ in size")
    shift = tm.max()
    return float(tj.mean() - (shift + math.log(np.exp(tm - shift).mean())))


def marginal_resample(m, z, rng: np.random.Generator):
    """Pair each ``m`` with a uniformly permuted ``z``."""
    m, z = np.asarray(m), np.asarray(z)
    if len(m) < 2 or len(m) != len(z):
        raise ValueError("need at least two (m, z) pairs of matching length")
    return m, z[rng.permutation(len(z))]


@dataclass(frozen=True)
class JointSampler:
    """Draws ``(m, z)`` with uniform ``m`` and Eve's view of ``encode(m, aux)``."""

    code: SecrecyCode
    channel: ChannelSpec
    representation: Literal["soft", "hard"] = "soft"

    @property
    def input_width(self) -> int:
        return self.code.k + self.code.n

    @property
    def soft(self) -> bool:
        return self.representation == "soft" and self.channel.soft

    @property
    def noise_var(self) -> float:
        if self.channel.kind == "awgn":
            return noise_variance(self.channel.snr_db)
        if self.channel.kind == "indoor":
            return noise_variance(self.channel.effective_snr_db(derive_rng(self.channel.seed)))
        return 0.0

    def draw(self, count: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Message bits ``(count, k)`` and channel output ``(count, n)``."""
        code = self.code
        m = rng.integers(0, 2, size=(count, code.k), dtype=np.uint8)
        x = encode(code, m, random_aux(code, rng, count))
        snr = None
        if self.channel.kind == "indoor":
            snr = self.channel.effective_snr_db(derive_rng(self.channel.seed))
        z = transmit(x, self.channel, rng, snr)
        if self.channel.kind != "bsc" and self.representation == "hard":
            z = hard_decision(z)
        return m, np.asarray(z, dtype=np.float64)


def _features(m, z, soft: bool, cfg: MineConfig, noise_var: float) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if cfg.input_encoding == "bipolar":
        m = 1.0 - 2.0 * m
        if not soft:
            z = 1.0 - 2.0 * z
    if soft and cfg.standardize_soft:
        z = z / math.sqrt(1.0 + noise_var)
    return np.concatenate([m, z], axis=1)


def train_mine(
    sampler,
    cfg: MineConfig,
    seed: int,
    return_net: bool = False,
    progress=None,
):
    """Fit the statistics network and record the estimate at every epoch.

    ``sampler`` needs ``input_width`` and ``draw(count, rng) -> (m, z)``;
    optional ``soft`` and ``noise_var`` attributes control feature scaling.
    Returns a :class:`MiTrace`, or ``(trace, net)`` with ``return_net``.
    ``progress``, if given, is called as ``progress(epoch, estimate_bits)``.
    """
    net = mlp_new(cfg.layer_sizes(sampler.input_width), seed)
    data_rng = derive_rng(seed, 1)
    l = cfg.batch_size
    soft = bool(getattr(sampler, "soft", False))
    noise_var = float(getattr(sampler, "noise_var", 0.0))

    pool = None
    if cfg.pool_size is not None:
        pool = sampler.draw(cfg.pool_size, data_rng)

    upstream = np.empty(2 * l)
    upstream[:l] = -1.0 / l
    ema = None
    raw = np.empty(cfg.epochs)
    for epoch in range(cfg.epochs):
        if pool is None:
            m, z = sampler.draw(l, data_rng)
        else:
            idx = data_rng.integers(0, cfg.pool_size, size=l)
            m, z = pool[0][idx], pool[1][idx]
        _, z_bar = marginal_resample(m, z, data_rng)
        x = np.concatenate(
            [_features(m, z, soft, cfg, noise_var), _features(m, z_bar, soft, cfg, noise_var)]
        )
        acts = _activations(net, x)
        t = acts[-1][:, 0]
        tj, tm = t[:l], t[l:]
        est = dv_estimate(tj, tm)
        if not math.isfinite(est):
            raise MineError(f"non-finite Donsker-Varadhan objective at epoch {epoch}")
        raw[epoch] = est / LN2
        shift = tm.max()
        e = np.exp(tm - shift)
        if cfg.bias_correction:
            batch_mean = e.mean() * math.exp(shift)
            ema = batch_mean if ema is None else (1 - cfg.ema_rate) * ema + cfg.ema_rate * batch_mean
            upstream[l:] = np.exp(tm) / (l * ema)
        else:
            upstream[l:] = e / e.sum()
        grads = backward(net, x, upstream, cache=acts)
        adam_step(net, grads, cfg.adam)
        if progress is not None:
            progress(epoch, raw[epoch])
    trace = from_raw(raw, cfg.ma_window)
    return (trace, net) if return_net else trace


def mi_exact_bsc(code: SecrecyCode, p: float) -> float:
    """Exact ``I(M; Z^n)`` in bits for uniform messages over a BSC(p)."""
    if code.n > EXACT_LIMIT:
        raise ValueError(f"n={code.n} too large for exact enumeration (limit {EXACT_LIMIT})")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"crossover probability {p} outside [0, 1]")
    words = pack(codebook(code))
    pzm = bsc_coset_likelihood(words, code.n, p)
    pz = pzm.mean(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(pzm > 0, pzm * np.log2(pzm / pz), 0.0)
    return float(max(terms.sum() / pzm.shape[0], 0.0))


def mi_mc_awgn(
    code: SecrecyCode,
    snr_db: float,
    sample_count: int,
    rng: np.random.Generator,
    representation: Literal["soft", "hard"] = "soft",
) -> tuple[float, float]:
    """Monte-Carlo ``I(M; Z^n)`` in bits for BPSK over AWGN, with its standard error.

    ``representation="hard"`` gives Eve only hard decisions, which makes her
    channel a BSC with ``p = Q(1/sigma)``.
    """
    if sample_count < 1000:
        raise ValueError("use at least 1000 samples")
    book = codebook(code)
    n, k = code.n, code.k
    n_aux = book.shape[1]
    m = rng.integers(0, 2, size=(sample_count, k), dtype=np.uint8)
    x = encode(code, m, random_aux(code, rng, sample_count))
    signs = bpsk_modulate(book)
    group = pack(m)
    y = bpsk_modulate(x) + math.sqrt(noise_variance(snr_db)) * rng.standard_normal(x.shape)
    if representation == "soft":
        z = y
        scale = 1.0 / noise_variance(snr_db)
        log_pz = np.logaddexp(scale * z, -scale * z).sum(axis=1)
    elif representation == "hard":
        z = bpsk_modulate(hard_decision(y))
        p = min(max(hard_bsc_p(snr_db), 1e-300), 0.5)
        scale = 0.5 * math.log((1.0 - p) / p)
        log_pz = np.full(sample_count, n * np.logaddexp(scale, -scale))
    else:
        raise ValueError(f"unknown representation {representation!r}")
    log_pzm = grouped_logsumexp(z, signs, group, scale) - math.log(n_aux)
    log_pz = log_pz - n * LN2
    ratio = (log_pzm - log_pz) / LN2
    return float(ratio.mean()), float(ratio.std(ddof=1) / math.sqrt(sample_count))


__all__ = [
    "JointSampler",
    "MiTrace",
    "MineConfig",
    "MineError",
    "PRESETS",
    "dv_estimate",
    "from_raw",
    "marginal_resample",
    "mi_exact_bsc",
    "mi_mc_awgn",
    "moving_average",
    "train_mine",
]
