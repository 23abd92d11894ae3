"""Render grid maps as standalone SVG heatmaps.

Output is plain text built in a fixed order with fixed-precision numbers,
so the same grid always renders to the same bytes.
"""

from __future__ import annotations

import math

import numpy as np

from .experiments import GridMap

METRICS = ("equivocation_bits", "mi_bits", "ber_coded", "ber_uncoded", "snr_db", "ber_difference")

GREEN = (0, 170, 60)
RED = (215, 25, 28)
MISSING = "#bdbdbd"
CELL = 32
MARGIN = 40
LEGEND_W = 140

# Low values green for equivocation (secure), red for BER near the transmitter.
DEFAULT_PALETTE = {
    "equivocation_bits": "green-red",
    "mi_bits": "red-green",
    "ber_coded": "red-green",
    "ber_uncoded": "red-green",
    "ber_difference": "green-red",
    "snr_db": "red-green",
}


def _lerp(a, b, t):
    return tuple(int(round(x + (y - x) * t)) for x, y in zip(a, b))


def color(value: float, lo: float, hi: float, palette: str = "green-red") -> str:
    if palette not in ("green-red", "red-green"):
        raise ValueError(f"unknown palette {palette!r}")
    t = 0.0 if hi <= lo else min(max((value - lo) / (hi - lo), 0.0), 1.0)
    start, end = (GREEN, RED) if palette == "green-red" else (RED, GREEN)
    return "#%02x%02x%02x" % _lerp(start, end, t)


def _fmt(x: float) -> str:
    return f"{x:.4g}"


def render_heatmap(grid: GridMap, metric: str, palette: str | None = None, title: str | None = None) -> str:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")
    palette = palette or DEFAULT_PALETTE[metric]
    values = grid.metric(metric)
    ok = grid.present & np.isfinite(values)
    lo = float(values[ok].min()) if ok.any() else 0.0
    hi = float(values[ok].max()) if ok.any() else 0.0
    rows, cols = grid.shape
    width = 2 * MARGIN + cols * CELL + LEGEND_W
    height = 2 * MARGIN + rows * CELL
    title = title or metric
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<title>{title}</title>',
        f'<text x="{MARGIN}" y="{MARGIN - 14}" font-family="sans-serif" font-size="14">{title}</text>',
    ]
    # row 0 is the most negative y; draw it at the bottom so north is up
    for iy in range(rows):
        for ix in range(cols):
            x = MARGIN + ix * CELL
            y = MARGIN + (rows - 1 - iy) * CELL
            fill = color(float(values[iy, ix]), lo, hi, palette) if ok[iy, ix] else MISSING
            out.append(
                f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}" '
                f'data-x="{_fmt(grid.xs[ix])}" data-y="{_fmt(grid.ys[iy])}"/>'
            )
    origin = grid.origin
    if origin is not None:
        iy, ix = origin
        cx = MARGIN + ix * CELL + CELL / 2
        cy = MARGIN + (rows - 1 - iy) * CELL + CELL / 2
        out.append(f'<circle cx="{cx:g}" cy="{cy:g}" r="{CELL / 4:g}" fill="#1f4fff" stroke="white"/>')
    for ix in range(cols):
        out.append(
            f'<text x="{MARGIN + ix * CELL + CELL / 2:g}" y="{MARGIN + rows * CELL + 14}" '
            f'font-family="sans-serif" font-size="9" text-anchor="middle">{_fmt(grid.xs[ix])}</text>'
        )
    for iy in range(rows):
        out.append(
            f'<text x="{MARGIN - 4}" y="{MARGIN + (rows - 1 - iy) * CELL + CELL / 2 + 3:g}" '
            f'font-family="sans-serif" font-size="9" text-anchor="end">{_fmt(grid.ys[iy])}</text>'
        )
    lx = MARGIN + cols * CELL + 24
    steps = 10
    bar_h = min(rows * CELL, 200)
    for s in range(steps):
        frac = 1.0 - s / (steps - 1)
        fill = color(lo + frac * (hi - lo), lo, hi, palette)
        out.append(
            f'<rect x="{lx}" y="{MARGIN + s * bar_h / steps:g}" width="20" '
            f'height="{math.ceil(bar_h / steps)}" fill="{fill}"/>'
        )
    out.append(f'<text x="{lx + 26}" y="{MARGIN + 8}" font-family="sans-serif" font-size="11">max {_fmt(hi)}</text>')
    out.append(
        f'<text x="{lx + 26}" y="{MARGIN + bar_h:g}" font-family="sans-serif" font-size="11">min {_fmt(lo)}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
