"""Minimal deterministic SVG line plots for β sweeps."""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

from .errors import ValidationError

WIDTH = 800
HEIGHT = 600
MARGIN_LEFT = 90
MARGIN_RIGHT = 30
MARGIN_TOP = 40
MARGIN_BOTTOM = 70
# below this y-span the axis is widened so round-off noise near zero plots flat
MIN_Y_SPAN = 1e-6


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    """Round tick positions covering ``[lo, hi]``."""
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.floor(lo / step + 1e-9) * step
    ticks = []
    k = 0
    while True:
        t = start + k * step
        if t > hi + 1e-9 * step:
            break
        if t >= lo - 1e-9 * step:
            ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        k += 1
    return ticks


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def render_plot(rows: Sequence[tuple[float, float]], title: str = "I(A:C|B) vs beta",
                x_label: str = "beta", y_label: str = "CMI (nats)") -> str:
    """Render ``(beta, cmi)`` rows as an 800×600 SVG line plot with markers."""
    if not rows:
        raise ValidationError("cannot plot an empty series")
    xs = [float(r[0]) for r in rows]
    ys = [float(r[1]) for r in rows]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    y_lo, y_hi = min(0.0, min(ys)), max(ys)
    if y_hi - y_lo < MIN_Y_SPAN:
        y_hi = y_lo + MIN_Y_SPAN
    x_ticks = nice_ticks(x_lo, x_hi)
    y_ticks = nice_ticks(y_lo, y_hi)
    x_lo, x_hi = min(x_lo, x_ticks[0]), max(x_hi, x_ticks[-1])
    y_lo, y_hi = min(y_lo, y_ticks[0]), max(y_hi, y_ticks[-1])

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x):
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return MARGIN_TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="{MARGIN_TOP / 2 + 6:.2f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{escape(title)}</text>',
    ]
    bottom = MARGIN_TOP + plot_h
    out.append(f'<line class="axis" x1="{MARGIN_LEFT}" y1="{bottom}" x2="{MARGIN_LEFT + plot_w}" y2="{bottom}" stroke="black"/>')
    out.append(f'<line class="axis" x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{bottom}" stroke="black"/>')
    for t in x_ticks:
        x = px(t)
        out.append(f'<line x1="{x:.2f}" y1="{bottom}" x2="{x:.2f}" y2="{bottom + 6}" stroke="black"/>')
        out.append(f'<text class="xtick" x="{x:.2f}" y="{bottom + 22}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12">{_fmt(t)}</text>')
    for t in y_ticks:
        y = py(t)
        out.append(f'<line x1="{MARGIN_LEFT - 6}" y1="{y:.2f}" x2="{MARGIN_LEFT}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text class="ytick" x="{MARGIN_LEFT - 10}" y="{y + 4:.2f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="12">{_fmt(t)}</text>')
    out.append(f'<text x="{MARGIN_LEFT + plot_w / 2:.2f}" y="{HEIGHT - 20}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="14">{escape(x_label)}</text>')
    out.append(f'<text x="20" y="{MARGIN_TOP + plot_h / 2:.2f}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="14" transform="rotate(-90 20 {MARGIN_TOP + plot_h / 2:.2f})">{escape(y_label)}</text>')

    points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
    if len(rows) > 1:
        out.append(f'<polyline class="series" points="{points}" fill="none" stroke="steelblue" stroke-width="2"/>')
    for x, y in zip(xs, ys):
        out.append(f'<circle class="marker" cx="{px(x):.2f}" cy="{py(y):.2f}" r="3" fill="steelblue"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
