"""Reproducible studies built on the codes, channels and estimators.

Every randomized step draws from ``derive_rng(seed, ...)`` keyed by the
work item (SNR index, grid cell), so results do not depend on execution
order and identical seeds give bit-identical output files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, is_dataclass
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from . import __version__
from .mine import MineConfig, JointSampler, mi_exact_bsc, mi_mc_awgn, train_mine
from .phy import (
    ChannelSpec,
    IndoorParams,
    derive_rng,
    diff_decode,
    diff_encode,
    hard_bsc_p,
    indoor_snr,
    receive_bits,
)
from .secrecy import SecrecyCode, decode, encode, random_aux, rm_secrecy_code, uncoded

Estimator = Literal["oracle-mc", "oracle-exact", "mine"]
ESTIMATORS = ("oracle-mc", "oracle-exact", "mine")
MI_TOLERANCE = 0.1
GRID_SPACING_FEET = 3.0

SWEEP_COLUMNS = ["snr_db", "coded_mi_bits", "uncoded_mi_bits", "estimator", "std_error"]
GRID_COLUMNS = [
    "x_feet",
    "y_feet",
    "snr_db",
    "ber_coded",
    "ber_uncoded",
    "mi_bits",
    "equivocation_bits",
]


class GridFormatError(ValueError):
    """Grid CSV does not follow the schema."""


class GridValidationError(ValueError):
    """Grid values violate a physical or information-theoretic bound."""


def equivocation(k: int, mi_bits: float, tol: float = MI_TOLERANCE) -> float:
    """Eve's remaining uncertainty ``H(M) - I(M; Z^n)`` for uniform k-bit messages."""
    if not -tol <= mi_bits <= k + tol:
        raise ValueError(f"mutual information {mi_bits} bits outside [0, {k}]")
    return min(max(k - mi_bits, 0.0), float(k))


def clamp_mi(k: int, mi_bits: float) -> float:
    return min(max(mi_bits, 0.0), float(k))


# --------------------------------------------------------------------------
# MI versus SNR


@dataclass(frozen=True)
class SweepRow:
    snr_db: float
    coded_mi_bits: float
    uncoded_mi_bits: float
    estimator: str
    std_error: float | None = None


@dataclass
class SweepResult:
    rows: list[SweepRow]
    k: int
    code: str = ""

    def __post_init__(self):
        snrs = [r.snr_db for r in self.rows]
        if any(b <= a for a, b in zip(snrs, snrs[1:])):
            raise ValueError("SNR grid must be strictly increasing")

    @property
    def snr_db(self) -> np.ndarray:
        return np.array([r.snr_db for r in self.rows])

    @property
    def coded(self) -> np.ndarray:
        return np.array([r.coded_mi_bits for r in self.rows])

    @property
    def uncoded(self) -> np.ndarray:
        return np.array([r.uncoded_mi_bits for r in self.rows])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in self.rows:
            se = "" if r.std_error is None else repr(r.std_error)
            w.writerow([repr(r.snr_db), repr(r.coded_mi_bits), repr(r.uncoded_mi_bits), r.estimator, se])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, k: int, code: str = "") -> "SweepResult":
        rows = []
        for rec in csv.DictReader(io.StringIO(text)):
            se = rec["std_error"]
            rows.append(
                SweepRow(
                    float(rec["snr_db"]),
                    float(rec["coded_mi_bits"]),
                    float(rec["uncoded_mi_bits"]),
                    rec["estimator"],
                    float(se) if se else None,
                )
            )
        return cls(rows, k, code)


def _mi_point(code, snr_db, estimator, rng_seed, sample_count, cfg, representation):
    if estimator == "oracle-exact":
        return mi_exact_bsc(code, hard_bsc_p(snr_db)), 0.0
    if estimator == "oracle-mc":
        return mi_mc_awgn(code, snr_db, sample_count, derive_rng(*rng_seed), representation)
    if estimator == "mine":
        sampler = JointSampler(code, ChannelSpec("awgn", snr_db=snr_db), representation)
        trace = train_mine(sampler, cfg or MineConfig(), seed=int(derive_rng(*rng_seed).integers(2**31)))
        return trace.final_bits, None
    raise ValueError(f"unknown estimator {estimator!r}; choose from {ESTIMATORS}")


def sweep_mi_vs_snr(
    code: SecrecyCode,
    snr_grid: Sequence[float],
    estimator: Estimator = "oracle-mc",
    cfg: MineConfig | None = None,
    seed: int = 0,
    sample_count: int = 20_000,
    representation: Literal["soft", "hard"] = "soft",
) -> SweepResult:
    """Leakage of ``code`` and of the same k bits sent uncoded, per SNR.

    ``oracle-exact`` views Eve's channel through hard decisions (a BSC with
    ``p = Q(1/sigma)``) and needs ``n <= 12``; the other estimators use
    ``representation``.
    """
    plain = uncoded(code.k)
    rows = []
    for i, snr in enumerate(snr_grid):
        c, c_se = _mi_point(code, snr, estimator, (seed, i, 0), sample_count, cfg, representation)
        u, u_se = _mi_point(plain, snr, estimator, (seed, i, 1), sample_count, cfg, representation)
        se = None if c_se is None else max(c_se, u_se)
        rows.append(SweepRow(float(snr), c, u, estimator, se))
    return SweepResult(rows, code.k, code.name)


def secrecy_advantage_range(
    sweep: SweepResult, threshold_bits: float = 0.25
) -> list[tuple[float, float]]:
    """Maximal SNR runs where uncoded leakage exceeds coded by more than the threshold."""
    if not sweep.rows:
        raise ValueError("empty sweep")
    gap = sweep.uncoded - sweep.coded > threshold_bits
    snr = sweep.snr_db
    out, start = [], None
    for i, flag in enumerate(gap):
        if flag and start is None:
            start = i
        if start is not None and (not flag or i == len(gap) - 1):
            end = i if flag else i - 1
            out.append((float(snr[start]), float(snr[end])))
            start = None
    return out


# --------------------------------------------------------------------------
# Bit error rate


def message_pattern(count: int, pattern: str, rng: np.random.Generator) -> np.ndarray:
    """``alternating`` sets even-indexed bits to 1 and odd ones to 0."""
    if pattern == "alternating":
        return (np.arange(count) % 2 == 0).astype(np.uint8)
    if pattern == "random":
        return rng.integers(0, 2, size=count, dtype=np.uint8)
    raise ValueError(f"unknown pattern {pattern!r}")


def _link(bits, channel, rng, snr_db, differential):
    tx = diff_encode(bits) if differential else bits
    rx = receive_bits(tx, channel, rng, snr_db)
    return diff_decode(rx) if differential else rx


def ber_run(
    code: SecrecyCode,
    channel: ChannelSpec,
    message_bits: int = 8000,
    pattern: Literal["alternating", "random"] = "alternating",
    seed: int = 0,
    coded_metric: Literal["message", "codeword"] = "message",
    differential: bool = False,
) -> tuple[float, float]:
    """Return ``(ber_coded, ber_uncoded)`` for one channel instance.

    The coded stream is encoded block by block with fresh auxiliary bits,
    sent, hard-decided and syndrome-decoded. ``coded_metric="message"``
    counts wrong message bits after decoding; ``"codeword"`` counts wrong
    channel bits before decoding. The uncoded stream sends the message bits
    over an independent use of the same channel.
    """
    if message_bits <= 0 or message_bits % code.k:
        raise ValueError(f"message_bits must be a positive multiple of k={code.k}")
    rng = derive_rng(seed, 0)
    snr_db = None
    if channel.kind == "indoor":
        snr_db = channel.effective_snr_db(derive_rng(channel.seed))
    msg = message_pattern(message_bits, pattern, rng)
    blocks = msg.reshape(-1, code.k)
    words = encode(code, blocks, random_aux(code, rng, len(blocks)))
    rx = _link(words.ravel(), channel, rng, snr_db, differential).reshape(words.shape)
    if coded_metric == "message":
        ber_coded = float(np.mean(decode(code, rx) != blocks))
    elif coded_metric == "codeword":
        ber_coded = float(np.mean(rx != words))
    else:
        raise ValueError(f"unknown coded metric {coded_metric!r}")
    rx_plain = _link(msg, channel, rng, snr_db, differential)
    return ber_coded, float(np.mean(rx_plain != msg))


# --------------------------------------------------------------------------
# Grid maps


@dataclass
class GridMap:
    """Per-position measurements on a square grid around the transmitter.

    Arrays are indexed ``[iy, ix]`` with coordinates ``ys[iy]``, ``xs[ix]``
    in feet; the transmitter sits at (0, 0). Missing cells hold NaN and are
    flagged in ``present``.
    """

    xs: np.ndarray
    ys: np.ndarray
    k: int
    snr_db: np.ndarray
    ber_coded: np.ndarray
    ber_uncoded: np.ndarray
    mi_bits: np.ndarray
    equivocation_bits: np.ndarray
    present: np.ndarray
    spacing_feet: float = GRID_SPACING_FEET

    @property
    def shape(self) -> tuple[int, int]:
        return self.present.shape

    @property
    def origin(self) -> tuple[int, int] | None:
        """Index ``(iy, ix)`` of the transmitter cell, if it is on the grid."""
        ix = np.flatnonzero(np.isclose(self.xs, 0.0))
        iy = np.flatnonzero(np.isclose(self.ys, 0.0))
        if ix.size and iy.size:
            return int(iy[0]), int(ix[0])
        return None

    def distance(self) -> np.ndarray:
        return np.hypot(*np.meshgrid(self.xs, self.ys))

    def metric(self, name: str) -> np.ndarray:
        if name == "ber_difference":
            return self.ber_uncoded - self.ber_coded
        if name not in GRID_COLUMNS[2:]:
            raise KeyError(name)
        return getattr(self, name)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridMap):
            return NotImplemented
        same = self.k == other.k and self.spacing_feet == other.spacing_feet
        for name in ("xs", "ys", "present", *GRID_COLUMNS[2:]):
            same = same and np.array_equal(getattr(self, name), getattr(other, name), equal_nan=True)
        return bool(same)

    def validate(self, tol: float = 1e-9) -> None:
        p = self.present
        for name in ("ber_coded", "ber_uncoded"):
            v = getattr(self, name)[p]
            if np.any((v < 0) | (v > 1)):
                raise GridValidationError(f"{name} outside [0, 1]")
        e, mi = self.equivocation_bits[p], self.mi_bits[p]
        if np.any((e < -tol) | (e > self.k + tol)):
            raise GridValidationError(f"equivocation outside [0, {self.k}]")
        if np.any(np.abs(e - (self.k - mi)) > tol):
            raise GridValidationError("equivocation differs from k - mi")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(GRID_COLUMNS)
        for iy, y in enumerate(self.ys):
            for ix, x in enumerate(self.xs):
                if not self.present[iy, ix]:
                    continue
                vals = [getattr(self, c)[iy, ix] for c in GRID_COLUMNS[2:]]
                w.writerow([repr(float(x)), repr(float(y))] + [repr(float(v)) for v in vals])
        return buf.getvalue()


@dataclass(frozen=True)
class _CellJob:
    iy: int
    ix: int
    x: float
    y: float
    seed: int
    indoor: IndoorParams
    code: SecrecyCode
    message_bits: int
    mi_samples: int
    estimator: str
    coded_metric: str
    differential: bool
    mine_cfg: MineConfig | None = field(default=None)


def _run_cell(job: _CellJob) -> tuple[int, int, tuple[float, ...]]:
    base = (job.seed, job.iy, job.ix)
    snr = indoor_snr((job.x, job.y), job.indoor, derive_rng(*base, 0))
    link = ChannelSpec("awgn", snr_db=snr)
    ber_c, ber_u = ber_run(
        job.code,
        link,
        job.message_bits,
        "alternating",
        seed=int(derive_rng(*base, 1).integers(2**31)),
        coded_metric=job.coded_metric,
        differential=job.differential,
    )
    mi, _ = _mi_point(job.code, snr, job.estimator, (*base, 2), job.mi_samples, job.mine_cfg, "soft")
    mi = clamp_mi(job.code.k, mi)
    return job.iy, job.ix, (snr, ber_c, ber_u, mi, job.code.k - mi)


def grid_axis(cells: int, spacing: float = GRID_SPACING_FEET) -> np.ndarray:
    half = (cells - 1) / 2
    return (np.arange(cells) - half) * spacing


def grid_simulate(
    dims: tuple[int, int] = (11, 11),
    indoor: IndoorParams | None = None,
    code: SecrecyCode | None = None,
    seed: int = 0,
    message_bits: int = 8000,
    mi_samples: int = 2000,
    estimator: Estimator = "oracle-mc",
    coded_metric: Literal["message", "codeword"] = "codeword",
    differential: bool = False,
    mine_cfg: MineConfig | None = None,
    workers: int = 1,
) -> GridMap:
    """Simulate Eve's receiver at every point of a grid around the transmitter.

    Each cell draws its own SNR from the indoor model, measures coded and
    uncoded BER on an alternating 1010... stream and estimates the
    leakage with ``estimator``. ``dims`` is ``(rows, cols)``; odd sizes put
    the transmitter on the centre cell.
    """
    rows, cols = dims
    if rows <= 0 or cols <= 0:
        raise ValueError("grid dimensions must be positive")
    indoor = indoor or IndoorParams()
    code = code or rm_secrecy_code(4)
    xs, ys = grid_axis(cols), grid_axis(rows)
    jobs = [
        _CellJob(iy, ix, float(x), float(y), seed, indoor, code, message_bits,
                 mi_samples, estimator, coded_metric, differential, mine_cfg)
        for iy, y in enumerate(ys)
        for ix, x in enumerate(xs)
    ]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_run_cell, jobs))
    else:
        results = [_run_cell(j) for j in jobs]
    arrays = {name: np.full((rows, cols), np.nan) for name in GRID_COLUMNS[2:]}
    for iy, ix, values in results:
        for name, v in zip(GRID_COLUMNS[2:], values):
            arrays[name][iy, ix] = v
    grid = GridMap(xs, ys, code.k, present=np.ones((rows, cols), dtype=bool), **arrays)
    grid.validate()
    return grid


def _parse_float(value: str, line: int, column: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise GridFormatError(f"line {line}, column {column!r}: not a number: {value!r}") from None


def parse_grid_csv(text: str, k: int | None = None, spacing: float = GRID_SPACING_FEET) -> GridMap:
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise GridFormatError("empty grid file") from None
    if header != GRID_COLUMNS:
        raise GridFormatError(f"line 1: expected columns {GRID_COLUMNS}, got {header}")
    records = {}
    for line, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(GRID_COLUMNS):
            raise GridFormatError(f"line {line}: expected {len(GRID_COLUMNS)} fields, got {len(row)}")
        x = _parse_float(row[0], line, "x_feet")
        y = _parse_float(row[1], line, "y_feet")
        vals = []
        for col, v in zip(GRID_COLUMNS[2:], row[2:]):
            vals.append(math.nan if not v.strip() else _parse_float(v, line, col))
        records[(x, y)] = vals
    if not records:
        raise GridFormatError("grid file has no data rows")

    def axis(values):
        lo, hi = min(values), max(values)
        count = int(round((hi - lo) / spacing)) + 1
        ax = lo + spacing * np.arange(count)
        for v in values:
            if not np.isclose(ax, v).any():
                raise GridFormatError(f"coordinate {v} is off the {spacing}-ft grid")
        return ax

    xs = axis([x for x, _ in records])
    ys = axis([y for _, y in records])
    arrays = {name: np.full((len(ys), len(xs)), np.nan) for name in GRID_COLUMNS[2:]}
    present = np.zeros((len(ys), len(xs)), dtype=bool)
    for (x, y), vals in records.items():
        ix = int(np.flatnonzero(np.isclose(xs, x))[0])
        iy = int(np.flatnonzero(np.isclose(ys, y))[0])
        for name, v in zip(GRID_COLUMNS[2:], vals):
            arrays[name][iy, ix] = v
        present[iy, ix] = not any(math.isnan(v) for v in vals)
    if k is None:
        tot = arrays["mi_bits"][present] + arrays["equivocation_bits"][present]
        if tot.size == 0:
            raise GridFormatError("no complete cells to infer the message length from")
        k = int(round(float(tot[0])))
    # exact coordinates from the file win over the reconstructed axis
    for (x, y) in records:
        xs[np.isclose(xs, x)] = x
        ys[np.isclose(ys, y)] = y
    grid = GridMap(xs, ys, k, present=present, spacing_feet=spacing, **arrays)
    grid.validate()
    return grid


def ingest_grid_csv(path: str | Path, k: int | None = None) -> GridMap:
    """Load and validate a grid CSV (simulated or recorded on hardware).

    Cells absent from the file, or with an empty field, are marked missing.
    ``k`` defaults to ``mi_bits + equivocation_bits`` of the first cell.
    """
    return parse_grid_csv(Path(path).read_text(), k)


# --------------------------------------------------------------------------
# Run manifests


def _plain(obj):
    if is_dataclass(obj):
        return {k: _plain(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def manifest(config, seed: int, code_id: str, **extra) -> str:
    """JSON run record: config echo, master seed, code and package version."""
    doc = {
        "artifact_version": __version__,
        "code": code_id,
        "seed": int(seed),
        "config": _plain(config),
    }
    doc.update(_plain(extra))
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
