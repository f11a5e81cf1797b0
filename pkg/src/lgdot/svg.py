"""Minimal standalone SVG line charts with no plotting dependencies."""

from __future__ import annotations

import math
from typing import Sequence

from lgdot.errors import InputError

WIDTH, HEIGHT = 800, 500
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 80, 170, 50, 60
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf")


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    """Round-numbered ticks covering ``[lo, hi]``."""
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.floor(lo / step) * step
    ticks = []
    k = 0
    while start + k * step <= hi + step * 1e-9:
        ticks.append(round(start + k * step, 12))
        k += 1
    if ticks[-1] < hi:
        ticks.append(round(ticks[-1] + step, 12))
    return ticks


def _label(v: float) -> str:
    text = f"{v:.6g}"
    return "0" if text == "-0" else text


def emit_svg(
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    *,
    title: str = "",
    x_label: str = "t (ps)",
    y_label: str = "K",
    reference: float | None = -1.0,
    reference_label: str = "classical limit",
) -> str:
    """Render ``(label, xs, ys)`` series as a single-panel line chart.

    Output depends only on the arguments, so equal input gives equal bytes.
    """
    if not series or all(len(xs) == 0 for _, xs, _ in series):
        raise InputError("emit_svg needs at least one non-empty series")
    for label, xs, ys in series:
        if len(xs) != len(ys):
            raise InputError(f"series {label!r}: x and y lengths differ")
        if not all(math.isfinite(v) for v in (*xs, *ys)):
            raise InputError(f"series {label!r} contains non-finite values")

    all_x = [x for _, xs, _ in series for x in xs]
    all_y = [y for _, _, ys in series for y in ys]
    if reference is not None:
        all_y.append(reference)
    xt = nice_ticks(min(all_x), max(all_x))
    yt = nice_ticks(min(all_y), max(all_y))
    x0, x1, y0, y1 = xt[0], xt[-1], yt[0], yt[-1]
    left, right = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    top, bottom = MARGIN_TOP, HEIGHT - MARGIN_BOTTOM

    def px(x):
        return left + (x - x0) / (x1 - x0) * (right - left)

    def py(y):
        return bottom - (y - y0) / (y1 - y0) * (bottom - top)

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]
    if title:
        out.append(
            f'<text x="{(left + right) / 2:.2f}" y="28" text-anchor="middle" font-family="sans-serif" '
            f'font-size="16">{_escape(title)}</text>'
        )
    for y in yt:
        out.append(
            f'<line x1="{left}" y1="{py(y):.2f}" x2="{right}" y2="{py(y):.2f}" stroke="#e0e0e0" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{left - 8}" y="{py(y) + 4:.2f}" text-anchor="end" font-family="sans-serif" '
            f'font-size="12">{_label(y)}</text>'
        )
    for x in xt:
        out.append(
            f'<line x1="{px(x):.2f}" y1="{bottom}" x2="{px(x):.2f}" y2="{bottom + 5}" stroke="#000000" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{px(x):.2f}" y="{bottom + 20}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="12">{_label(x)}</text>'
        )
    out.append(f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="#000000" stroke-width="1.5"/>')
    out.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="#000000" stroke-width="1.5"/>')
    out.append(
        f'<text x="{(left + right) / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="13">{_escape(x_label)}</text>'
    )
    out.append(
        f'<text x="20" y="{(top + bottom) / 2:.2f}" text-anchor="middle" font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 20 {(top + bottom) / 2:.2f})">{_escape(y_label)}</text>'
    )

    if reference is not None:
        out.append(
            f'<line x1="{left}" y1="{py(reference):.2f}" x2="{right}" y2="{py(reference):.2f}" '
            'stroke="#555555" stroke-width="1.2" stroke-dasharray="6,4"/>'
        )
        out.append(
            f'<text x="{right - 4}" y="{py(reference) - 6:.2f}" text-anchor="end" font-family="sans-serif" '
            f'font-size="12" fill="#555555">{_escape(reference_label)}</text>'
        )

    for k, (label, xs, ys) in enumerate(series):
        color = COLORS[k % len(COLORS)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.8" points="{pts}"/>')
        ly = top + 10 + 22 * k
        out.append(f'<line x1="{right + 15}" y1="{ly}" x2="{right + 40}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(
            f'<text x="{right + 46}" y="{ly + 4}" font-family="sans-serif" font-size="12">{_escape(label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
