"""Command-line interface.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical or
runtime failure. Experiment commands write their outputs plus a
``manifest.json`` into ``--out-dir``; on a runtime failure they leave a
``FAILED`` marker there with the error message.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig
from .experiments import (
    ESTIMATORS,
    ber_run,
    grid_simulate,
    ingest_grid_csv,
    manifest,
    secrecy_advantage_range,
    sweep_mi_vs_snr,
)
from .heatmap import METRICS, render_heatmap
from .mine import PRESETS, JointSampler, MineConfig, MineError, from_raw, train_mine
from .neural import save_checkpoint
from .phy import ChannelSpec, IndoorParams, derive_rng
from .rmcode import RmSpec, rm_generator, wiretap_generator
from .secrecy import (
    ENUMERATION_LIMIT,
    EnumerationLimitError,
    SecrecyCode,
    codebook_csv,
    codebook_table,
    decode,
    encode,
    random_aux,
    rm_secrecy_code,
    table1_code,
    uncoded,
)

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 2, 3
DEFAULT_OUT = "results"

SNR_NOTE = (
    "SNR is Es/sigma^2 per real BPSK symbol in dB (Es = 1, noise variance "
    "10^(-SNR/10))."
)


class UsageError(Exception):
    pass


def parse_code(name: str) -> SecrecyCode:
    """``table1``, ``rmM`` (message on the lower block), ``rmM-upper``, ``uncodedK``."""
    name = name.strip().lower()
    if name == "table1":
        return table1_code()
    match = re.fullmatch(r"rm(\d+)(-upper|-lower)?", name)
    if match:
        m = int(match.group(1))
        if 2**m > ENUMERATION_LIMIT:
            raise EnumerationLimitError(f"RM({m},{m}) has n={2**m} > {ENUMERATION_LIMIT}")
        block = (match.group(2) or "-lower")[1:]
        return rm_secrecy_code(m, block)
    match = re.fullmatch(r"uncoded(\d+)", name)
    if match:
        return uncoded(int(match.group(1)))
    raise UsageError(f"unknown code {name!r} (try table1, rm2, rm3, rm4, rm3-upper, uncoded4)")


def parse_bits(text: str, width: int, what: str) -> np.ndarray:
    text = text.strip()
    if len(text) != width or set(text) - {"0", "1"}:
        raise UsageError(f"{what} must be {width} characters of 0/1, got {text!r}")
    return np.array([int(c) for c in text], dtype=np.uint8)


def bit_string(bits) -> str:
    return "".join(str(int(b)) for b in np.ravel(bits))


# --------------------------------------------------------------------------
# Building objects from a RunConfig


def code_from_config(cfg: RunConfig) -> SecrecyCode:
    return parse_code(cfg.get("code", "name", "rm2"))


def indoor_from_config(cfg: RunConfig) -> IndoorParams:
    d = IndoorParams()
    return IndoorParams(
        tx_snr_ref_db=cfg.get_float("indoor", "tx_snr_ref_db", d.tx_snr_ref_db),
        d0=cfg.get_float("indoor", "d0", d.d0),
        path_loss_exponent=cfg.get_float("indoor", "path_loss_exponent", d.path_loss_exponent),
        shadowing_sigma_db=cfg.get_float("indoor", "shadowing_sigma_db", d.shadowing_sigma_db),
        fading=cfg.get("indoor", "fading", d.fading),
    )


def channel_from_config(cfg: RunConfig, seed: int) -> ChannelSpec:
    kind = cfg.get("channel", "kind", "awgn")
    if kind == "indoor":
        pos = (cfg.get_float("channel", "x_feet", 0.0), cfg.get_float("channel", "y_feet", 0.0))
        return ChannelSpec("indoor", position=pos, indoor=indoor_from_config(cfg), seed=seed)
    return ChannelSpec(
        kind,
        snr_db=cfg.get_float("channel", "snr_db", None),
        p=cfg.get_float("channel", "p", None),
        seed=seed,
    )


def mine_from_config(cfg: RunConfig, code: SecrecyCode) -> MineConfig:
    default = f"desk-rm{code.n.bit_length() - 1}{code.n.bit_length() - 1}"
    preset = cfg.get("mine", "preset", default if default in PRESETS else "desk-rm22")
    if preset not in PRESETS:
        raise ConfigError(f"unknown MINE preset {preset!r}; choose from {sorted(PRESETS)}")
    base = PRESETS[preset]
    lr = cfg.get_float("mine", "learning_rate", base.adam.learning_rate)
    pool = cfg.get_int("mine", "pool_size", base.pool_size)
    return replace(
        base,
        hidden_layers=cfg.get_int("mine", "hidden_layers", base.hidden_layers),
        neurons_per_layer=cfg.get_int("mine", "neurons_per_layer", base.neurons_per_layer),
        epochs=cfg.get_int("mine", "epochs", base.epochs),
        batch_size=cfg.get_int("mine", "batch_size", base.batch_size),
        ma_window=cfg.get_int("mine", "ma_window", base.ma_window),
        adam=replace(base.adam, learning_rate=lr),
        input_encoding=cfg.get("mine", "input_encoding", base.input_encoding),
        standardize_soft=cfg.get_bool("mine", "standardize_soft", base.standardize_soft),
        bias_correction=cfg.get_bool("mine", "bias_correction", base.bias_correction),
        pool_size=pool,
    )


def snr_grid_from_config(cfg: RunConfig) -> list[float]:
    start = cfg.get_float("sweep", "snr_start", -15.0)
    stop = cfg.get_float("sweep", "snr_stop", 15.0)
    step = cfg.get_float("sweep", "snr_step", 1.0)
    if step <= 0 or stop < start:
        raise ConfigError("need snr_step > 0 and snr_stop >= snr_start")
    count = int(round((stop - start) / step)) + 1
    return [float(round(start + i * step, 10)) for i in range(count)]


# --------------------------------------------------------------------------
# Commands


def _out_dir(args) -> Path:
    out = Path(args.out_dir or DEFAULT_OUT)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out: Path, command: str, cfg: RunConfig, seed: int, code: SecrecyCode, **extra):
    (out / "manifest.json").write_text(
        manifest(cfg.sections, seed, code.name, command=command, **extra)
    )


def cmd_codebook(args, cfg: RunConfig) -> int:
    if args.table1:
        code = table1_code()
    else:
        code = parse_code(args.code or cfg.get("code", "name", "table1"))
    text = codebook_csv(code) if args.format == "csv" else codebook_table(code)
    sys.stdout.write(text)
    if args.out_dir:
        (_out_dir(args) / "codebook.csv").write_text(codebook_csv(code))
    return EXIT_OK


def cmd_rm_gen(args, cfg: RunConfig) -> int:
    if args.wiretap is not None:
        upper, lower = wiretap_generator(args.wiretap, args.split)
        sys.stdout.write(upper.to_text() + "\n\n" + lower.to_text() + "\n")
    else:
        if args.r is None or args.m is None:
            raise UsageError("give -r and -m, or --wiretap M")
        sys.stdout.write(rm_generator(RmSpec(args.r, args.m)).to_text() + "\n")
    return EXIT_OK


def cmd_encode(args, cfg: RunConfig) -> int:
    code = parse_code(args.code)
    m = parse_bits(args.message, code.k, "message")
    if args.aux is None:
        aux = random_aux(code, derive_rng(args.seed or 0))
    else:
        aux = parse_bits(args.aux, code.n - code.k, "auxiliary message")
    print(bit_string(encode(code, m, aux)))
    return EXIT_OK


def cmd_decode(args, cfg: RunConfig) -> int:
    code = parse_code(args.code)
    print(bit_string(decode(code, parse_bits(args.word, code.n, "received word"))))
    return EXIT_OK


def _prepare(args, cfg: RunConfig):
    code = code_from_config(cfg)
    seed = args.seed if args.seed is not None else cfg.get_int("run", "seed", 0)
    cfg.set("run", "seed", seed)
    return code, seed


def cmd_sweep(args, cfg: RunConfig):
    code, seed = _prepare(args, cfg)
    grid = snr_grid_from_config(cfg)
    estimator = cfg.get("sweep", "estimator", "oracle-mc")
    if estimator not in ESTIMATORS:
        raise ConfigError(f"unknown estimator {estimator!r}")
    samples = cfg.get_int("sweep", "sample_count", 20_000)
    representation = cfg.get("sweep", "representation", "soft")
    threshold = cfg.get_float("sweep", "threshold", 0.25)
    mine_cfg = mine_from_config(cfg, code) if estimator == "mine" else None
    out = _out_dir(args)

    def run():
        result = sweep_mi_vs_snr(code, grid, estimator, mine_cfg, seed, samples, representation)
        (out / "sweep.csv").write_text(result.to_csv())
        ranges = secrecy_advantage_range(result, threshold)
        _write_manifest(out, "sweep", cfg, seed, code, secrecy_ranges=ranges)
        for lo, hi in ranges:
            print(f"secrecy advantage > {threshold} bits: {lo:g} dB .. {hi:g} dB")
        if not ranges:
            print(f"no SNR with a secrecy advantage above {threshold} bits")

    return run


def cmd_mine(args, cfg: RunConfig):
    code, seed = _prepare(args, cfg)
    channel = channel_from_config(cfg, seed)
    mcfg = mine_from_config(cfg, code)
    representation = cfg.get("mine", "representation", "soft")
    sampler = JointSampler(code, channel, representation)
    checkpoint = cfg.get_bool("mine", "checkpoint", False)
    out = _out_dir(args)
    raw: list[float] = []

    def run():
        try:
            trace, net = train_mine(
                sampler, mcfg, seed, return_net=True, progress=lambda e, v: raw.append(v)
            )
        except MineError:
            if len(raw) >= mcfg.ma_window:
                (out / "trace.csv").write_text(from_raw(raw, mcfg.ma_window).to_csv())
            raise
        (out / "trace.csv").write_text(trace.to_csv())
        if checkpoint:
            save_checkpoint(net, out / "network.npz")
        _write_manifest(out, "mine", cfg, seed, code, final_bits=trace.final_bits)
        print(f"final estimate: {trace.final_bits:.4f} bits (k = {code.k})")

    return run


def cmd_ber(args, cfg: RunConfig):
    code, seed = _prepare(args, cfg)
    channel = channel_from_config(cfg, seed)
    bits = cfg.get_int("ber", "message_bits", 8000)
    pattern = cfg.get("ber", "pattern", "alternating")
    metric = cfg.get("ber", "coded_metric", "message")
    differential = cfg.get_bool("ber", "differential", False)
    out = _out_dir(args)

    def run():
        ber_c, ber_u = ber_run(code, channel, bits, pattern, seed, metric, differential)
        (out / "ber.csv").write_text(
            f"ber_coded,ber_uncoded,message_bits,coded_metric\n{ber_c!r},{ber_u!r},{bits},{metric}\n"
        )
        _write_manifest(out, "ber", cfg, seed, code)
        print(f"BER coded {ber_c:.6g}  uncoded {ber_u:.6g}")

    return run


def cmd_grid(args, cfg: RunConfig):
    code = parse_code(cfg.get("code", "name", "rm4"))
    cfg.set("code", "name", cfg.get("code", "name", "rm4"))
    _, seed = _prepare(args, cfg)
    dims = (cfg.get_int("grid", "rows", 11), cfg.get_int("grid", "cols", 11))
    indoor = indoor_from_config(cfg)
    estimator = cfg.get("grid", "estimator", "oracle-mc")
    kwargs = dict(
        message_bits=cfg.get_int("grid", "message_bits", 8000),
        mi_samples=cfg.get_int("grid", "mi_samples", 2000),
        estimator=estimator,
        coded_metric=cfg.get("grid", "coded_metric", "codeword"),
        differential=cfg.get_bool("grid", "differential", False),
        mine_cfg=mine_from_config(cfg, code) if estimator == "mine" else None,
        workers=cfg.get_int("grid", "workers", 1),
    )
    out = _out_dir(args)

    def run():
        grid = grid_simulate(dims, indoor, code, seed, **kwargs)
        (out / "grid.csv").write_text(grid.to_csv())
        _write_manifest(out, "grid", cfg, seed, code)
        print(
            f"{dims[0]}x{dims[1]} grid: equivocation {np.nanmin(grid.equivocation_bits):.3f}"
            f"..{np.nanmax(grid.equivocation_bits):.3f} bits"
        )

    return run


def cmd_ingest(args, cfg: RunConfig) -> int:
    grid = ingest_grid_csv(args.path, args.k)
    missing = int((~grid.present).sum())
    print(f"{grid.shape[0]}x{grid.shape[1]} grid, k = {grid.k}, {missing} missing cell(s)")
    if args.out_dir:
        (_out_dir(args) / "grid.csv").write_text(grid.to_csv())
    return EXIT_OK


def cmd_render(args, cfg: RunConfig) -> int:
    grid = ingest_grid_csv(args.grid, args.k)
    svg = render_heatmap(grid, args.metric, args.palette, args.title)
    if args.output:
        target = Path(args.output)
    else:
        target = _out_dir(args) / f"{args.metric}.svg"
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(svg)
    print(target)
    return EXIT_OK


# --------------------------------------------------------------------------
# Argument parsing


def _global_flags(p: argparse.ArgumentParser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--seed", type=int, default=d, help="master random seed")
    p.add_argument("--out-dir", default=d,
                   help=f"directory for output files (experiments default to {DEFAULT_OUT}/)")
    p.add_argument("--config", default=d, help="INI config file or a manifest.json to replay")
    p.add_argument("--set", action="append", default=argparse.SUPPRESS if suppress else [],
                   metavar="SECTION.KEY=VALUE", help="override one config value")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmwiretap",
        description="Reed-Muller coset codes over simulated wiretap channels. " + SNR_NOTE,
    )
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        _global_flags(p, suppress=True)
        return p

    p = add("codebook", "print the full coset table of a code")
    p.add_argument("--table1", action="store_true", help="the (4,2) example code")
    p.add_argument("--code", help="table1, rmM, rmM-upper or uncodedK")
    p.add_argument("--format", choices=["table", "csv"], default="table")

    p = add("rm-gen", "print Reed-Muller generator matrices")
    p.add_argument("-r", type=int)
    p.add_argument("-m", type=int)
    p.add_argument("--wiretap", type=int, metavar="M", help="RM(M,M) split into two blocks")
    p.add_argument("--split", type=int, help="rows in the upper block (default n/2)")

    p = add("encode", "encode one message")
    p.add_argument("--code", required=True)
    p.add_argument("--message", required=True)
    p.add_argument("--aux", help="auxiliary bits (default: random from --seed)")

    p = add("decode", "syndrome-decode one received word")
    p.add_argument("--code", required=True)
    p.add_argument("--word", required=True)

    add("sweep", "leakage versus SNR, coded and uncoded. " + SNR_NOTE)
    add("mine", "train the neural MI estimator on one channel")
    add("ber", "coded and uncoded bit error rate on one channel")
    add("grid", "simulate BER and equivocation on a grid around the transmitter")

    p = add("ingest", "validate a grid CSV (simulated or recorded)")
    p.add_argument("path")
    p.add_argument("--k", type=int, help="message bits (default: inferred)")

    p = add("render", "render a grid CSV as an SVG heatmap")
    p.add_argument("grid")
    p.add_argument("--metric", default="equivocation_bits", help=", ".join(METRICS))
    p.add_argument("--palette", choices=["green-red", "red-green"])
    p.add_argument("--title")
    p.add_argument("--k", type=int)
    p.add_argument("-o", "--output", help="SVG path (default: OUT_DIR/METRIC.svg)")
    return parser


def load_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        path = Path(args.config)
        text = path.read_text() if path.exists() else None
        if text is None:
            raise ConfigError(f"config file {path} not found")
        if text.lstrip().startswith("{"):
            try:
                cfg = RunConfig({s: dict(v) for s, v in json.loads(text)["config"].items()})
            except (KeyError, ValueError, AttributeError) as exc:
                raise ConfigError(f"{path} is not a run manifest: {exc}") from None
        else:
            cfg = RunConfig.from_text(text)
    for item in getattr(args, "set", None) or []:
        key, sep, value = item.partition("=")
        section, dot, name = key.partition(".")
        if not sep or not dot:
            raise ConfigError(f"--set expects SECTION.KEY=VALUE, got {item!r}")
        cfg.set(section.strip(), name.strip(), value.strip())
    return cfg


COMMANDS = {
    "codebook": cmd_codebook,
    "rm-gen": cmd_rm_gen,
    "encode": cmd_encode,
    "decode": cmd_decode,
    "sweep": cmd_sweep,
    "mine": cmd_mine,
    "ber": cmd_ber,
    "grid": cmd_grid,
    "ingest": cmd_ingest,
    "render": cmd_render,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args)
        result = COMMANDS[args.command](args, cfg)
    except (UsageError, ConfigError, EnumerationLimitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not callable(result):
        return result
    try:
        result()
    except Exception as exc:  # noqa: BLE001 - reported via exit code 3
        out = _out_dir(args)
        (out / "FAILED").write_text(f"{type(exc).__name__}: {exc}\n")
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
