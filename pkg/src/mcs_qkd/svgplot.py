"""Dependency-free polyline SVG charts with byte-stable output.

Figures are written as standalone 800x600 SVG documents.  Coordinates are
formatted with two fixed decimals and tick labels with ``%g``, so a fixed
input always renders to identical bytes.
"""

from __future__ import annotations

import math
from typing import Sequence

__all__ = ["render_line_chart"]

WIDTH = 800
HEIGHT = 600
MARGIN_LEFT = 80
MARGIN_RIGHT = 160
MARGIN_TOP = 50
MARGIN_BOTTOM = 60

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

Curve = tuple[str, Sequence[tuple[float, float]]]


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def _tick_label(value: float) -> str:
    return f"{value:g}"


def render_line_chart(
    curves: Sequence[Curve],
    *,
    title: str,
    x_label: str,
    y_label: str,
    log_y: bool = False,
) -> str:
    """Render labelled curves into an SVG document string.

    ``log_y`` plots log10 of the y values with decade ticks; non-positive y
    values are dropped from log-scale curves since they have no image.
    """
    plotted: list[tuple[str, list[tuple[float, float]]]] = []
    for label, points in curves:
        kept = [
            (float(x), math.log10(y) if log_y else float(y))
            for x, y in points
            if math.isfinite(x) and math.isfinite(y) and (not log_y or y > 0.0)
        ]
        plotted.append((label, kept))

    xs = [x for _, pts in plotted for x, _ in pts]
    ys = [y for _, pts in plotted for _, y in pts]
    x_lo, x_hi = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y_lo, y_hi = (min(ys), max(ys)) if ys else (0.0, 1.0)
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    if log_y:
        y_lo, y_hi = math.floor(y_lo), math.ceil(y_hi)
        if y_hi <= y_lo:
            y_hi = y_lo + 1

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x: float) -> float:
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return MARGIN_TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="28" text-anchor="middle" font-size="18">{title}</text>',
    ]

    if log_y:
        y_ticks = [float(d) for d in range(int(y_lo), int(y_hi) + 1)]
    else:
        y_ticks = _ticks(y_lo, y_hi)
    x_ticks = _ticks(x_lo, x_hi)

    for tick in x_ticks:
        x = px(tick)
        lines.append(
            f'<line x1="{_fmt(x)}" y1="{MARGIN_TOP}" x2="{_fmt(x)}" '
            f'y2="{MARGIN_TOP + plot_h}" stroke="#dddddd" stroke-width="1"/>'
        )
        lines.append(
            f'<text x="{_fmt(x)}" y="{MARGIN_TOP + plot_h + 20}" text-anchor="middle" '
            f'font-size="12">{_tick_label(tick)}</text>'
        )
    for tick in y_ticks:
        y = py(tick)
        label = f"1e{tick:g}" if log_y else _tick_label(tick)
        lines.append(
            f'<line x1="{MARGIN_LEFT}" y1="{_fmt(y)}" x2="{MARGIN_LEFT + plot_w}" '
            f'y2="{_fmt(y)}" stroke="#dddddd" stroke-width="1"/>'
        )
        lines.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-size="12">{label}</text>'
        )

    # axes drawn after the grid so they stay visible
    lines.append(
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black" stroke-width="1"/>'
    )
    lines.append(
        f'<text x="{MARGIN_LEFT + plot_w / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle" '
        f'font-size="14">{x_label}</text>'
    )
    lines.append(
        f'<text x="20" y="{MARGIN_TOP + plot_h / 2:.0f}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 20 {MARGIN_TOP + plot_h / 2:.0f})">{y_label}</text>'
    )

    for i, (label, pts) in enumerate(plotted):
        color = PALETTE[i % len(PALETTE)]
        if pts:
            coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in pts)
            lines.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>'
            )
        legend_y = MARGIN_TOP + 16 + 22 * i
        legend_x = MARGIN_LEFT + plot_w + 12
        lines.append(
            f'<line x1="{legend_x}" y1="{legend_y}" x2="{legend_x + 24}" y2="{legend_y}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        lines.append(
            f'<text x="{legend_x + 30}" y="{legend_y + 4}" font-size="12">{label}</text>'
        )

    lines.append("</svg>")
    return "\n".join(lines) + "\n"
