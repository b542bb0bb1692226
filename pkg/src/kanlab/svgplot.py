"""Minimal static SVG line charts.

Plots are cosmetic companions to the CSV outputs, so this stays tiny and
fully deterministic: same data in, same bytes out.
"""

from __future__ import annotations

import math
from pathlib import Path

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
           "#17becf", "#7f7f7f"]
_W, _H = 640, 420
_ML, _MR, _MT, _MB = 64, 16, 36, 48


def _ticks(lo: float, hi: float, log: bool, n: int = 5):
    if log:
        lo_e = math.floor(math.log10(lo))
        hi_e = math.ceil(math.log10(hi))
        return [10.0 ** e for e in range(lo_e, hi_e + 1)]
    span = hi - lo or 1.0
    step = 10.0 ** math.floor(math.log10(span / n))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= n:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * span:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _fmt_tick(v: float) -> str:
    if v != 0 and (abs(v) < 1e-3 or abs(v) >= 1e4):
        return f"{v:.0e}"
    return f"{v:g}"


def line_chart(series, path, title: str = "", xlabel: str = "",
               ylabel: str = "", log_x: bool = False, log_y: bool = False) -> None:
    """Write a line chart; `series` is a list of (label, xs, ys) triples."""
    pts = [(x, y) for _, xs, ys in series for x, y in zip(xs, ys)]
    if not pts:
        raise ValueError("nothing to plot")
    if log_x and any(x <= 0 for x, _ in pts):
        raise ValueError("log x-axis needs positive x values")
    if log_y and any(y <= 0 for _, y in pts):
        raise ValueError("log y-axis needs positive y values")

    def tx(v):
        return math.log10(v) if log_x else v

    def ty(v):
        return math.log10(v) if log_y else v

    x_lo, x_hi = min(x for x, _ in pts), max(x for x, _ in pts)
    y_lo, y_hi = min(y for _, y in pts), max(y for _, y in pts)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    sx_lo, sx_hi = tx(x_lo), tx(x_hi)
    sy_lo, sy_hi = ty(y_lo), ty(y_hi)
    plot_w = _W - _ML - _MR
    plot_h = _H - _MT - _MB

    def px(v):
        return _ML + (tx(v) - sx_lo) / (sx_hi - sx_lo) * plot_w

    def py(v):
        return _MT + plot_h - (ty(v) - sy_lo) / (sy_hi - sy_lo) * plot_h

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'font-family="sans-serif" font-size="12">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>']
    if title:
        out.append(f'<text x="{_W / 2:.1f}" y="20" text-anchor="middle" '
                   f'font-size="14">{title}</text>')
    out.append(f'<rect x="{_ML}" y="{_MT}" width="{plot_w}" height="{plot_h}" '
               f'fill="none" stroke="#333"/>')

    for t in _ticks(x_lo, x_hi, log_x):
        if not (x_lo <= t <= x_hi):
            continue
        x = px(t)
        out.append(f'<line x1="{x:.1f}" y1="{_MT + plot_h}" x2="{x:.1f}" '
                   f'y2="{_MT + plot_h + 4}" stroke="#333"/>')
        out.append(f'<text x="{x:.1f}" y="{_MT + plot_h + 18}" '
                   f'text-anchor="middle">{_fmt_tick(t)}</text>')
    for t in _ticks(y_lo, y_hi, log_y):
        if not (y_lo <= t <= y_hi):
            continue
        y = py(t)
        out.append(f'<line x1="{_ML - 4}" y1="{y:.1f}" x2="{_ML}" y2="{y:.1f}" '
                   f'stroke="#333"/>')
        out.append(f'<text x="{_ML - 8}" y="{y + 4:.1f}" '
                   f'text-anchor="end">{_fmt_tick(t)}</text>')
    if xlabel:
        out.append(f'<text x="{_ML + plot_w / 2:.1f}" y="{_H - 10}" '
                   f'text-anchor="middle">{xlabel}</text>')
    if ylabel:
        out.append(f'<text x="16" y="{_MT + plot_h / 2:.1f}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {_MT + plot_h / 2:.1f})">{ylabel}</text>')

    for i, (label, xs, ys) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"/>')
        ly = _MT + 14 + 16 * i
        out.append(f'<line x1="{_ML + plot_w - 130}" y1="{ly - 4}" '
                   f'x2="{_ML + plot_w - 110}" y2="{ly - 4}" stroke="{color}" '
                   f'stroke-width="1.5"/>')
        out.append(f'<text x="{_ML + plot_w - 104}" y="{ly}">{label}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out))
