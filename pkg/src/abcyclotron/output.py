"""Deterministic CSV and minimal SVG line plots."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape


def fmt(value):
    if isinstance(value, (bool, str)):
        return str(value).lower() if isinstance(value, bool) else value
    if isinstance(value, int):
        return str(value)
    return f"{float(value):.17g}"


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def _nice_ticks(lo, hi, count=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks


def line_plot_svg(
    path,
    series,
    title="",
    xlabel="",
    ylabel="",
    hlines=(),
    width=640,
    height=400,
    ylim=None,
):
    """Write an SVG with one polyline per (label, xs, ys) in ``series``.

    ``hlines`` holds (label, y) reference lines drawn dashed across the plot.
    """
    colors = ["#1f4e99", "#b03a2e", "#1e8449", "#7d3c98"]
    left, right, top, bottom = 70, 20, 40, 50
    pw, ph = width - left - right, height - top - bottom
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys if math.isfinite(y)]
    ys_all += [y for _, y in hlines]
    x0, x1 = min(xs_all), max(xs_all)
    if ylim is None:
        y0, y1 = min(ys_all), max(ys_all)
        pad = 0.05 * (y1 - y0 or 1.0)
        y0, y1 = y0 - pad, y1 + pad
    else:
        y0, y1 = ylim
    if x1 == x0:
        x1 = x0 + 1.0

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        y = min(max(y, y0), y1)
        return top + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _nice_ticks(x0, x1):
        out.append(f'<line x1="{sx(t):.2f}" y1="{top + ph}" x2="{sx(t):.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(
            f'<text x="{sx(t):.2f}" y="{top + ph + 18}" font-size="11" text-anchor="middle">{t:g}</text>'
        )
    for t in _nice_ticks(y0, y1):
        out.append(f'<line x1="{left - 5}" y1="{sy(t):.2f}" x2="{left}" y2="{sy(t):.2f}" stroke="black"/>')
        out.append(
            f'<text x="{left - 8}" y="{sy(t) + 4:.2f}" font-size="11" text-anchor="end">{t:g}</text>'
        )
    for k, (label, y) in enumerate(hlines):
        out.append(
            f'<line x1="{left}" y1="{sy(y):.2f}" x2="{left + pw}" y2="{sy(y):.2f}" '
            f'stroke="#555555" stroke-dasharray="6,4"/>'
        )
        out.append(
            f'<text x="{left + pw - 4}" y="{sy(y) - 5:.2f}" font-size="11" '
            f'text-anchor="end">{escape(label)}</text>'
        )
    for k, (label, xs, ys) in enumerate(series):
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys) if math.isfinite(y))
        color = colors[k % len(colors)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(
            f'<text x="{left + 8}" y="{top + 16 + 14 * k}" font-size="11" fill="{color}">{escape(label)}</text>'
        )
    out.append(
        f'<text x="{width / 2:.1f}" y="22" font-size="14" text-anchor="middle">{escape(title)}</text>'
    )
    out.append(
        f'<text x="{left + pw / 2:.1f}" y="{height - 10}" font-size="12" '
        f'text-anchor="middle">{escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="16" y="{top + ph / 2:.1f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    out.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n")
    return path
