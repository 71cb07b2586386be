"""Minimal self-contained SVG charts (lines, markers, histogram bars)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

W, H = 640, 420
ML, MR, MT, MB = 70, 20, 40, 55
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    return [start + i * step for i in range(int((hi - start) / step + 1e-9) + 1)]


def svg_chart(series, title="", xlabel="", ylabel="") -> str:
    """``series``: dicts with keys x, y, kind in {line, points, bars}, label.

    Bars take ``width`` (data units). Non-finite points are dropped.
    """
    xs = np.concatenate([np.asarray(s["x"], float) for s in series])
    ys = np.concatenate([np.asarray(s["y"], float) for s in series])
    ok = np.isfinite(xs) & np.isfinite(ys)
    xs, ys = xs[ok], ys[ok]
    x0, x1 = (float(xs.min()), float(xs.max())) if xs.size else (0.0, 1.0)
    y0, y1 = (float(min(ys.min(), 0.0) if any(s.get("kind") == "bars" for s in series) else ys.min()),
              float(ys.max())) if ys.size else (0.0, 1.0)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def px(x):
        return ML + (x - x0) / (x1 - x0) * (W - ML - MR)

    def py(y):
        return H - MB - (y - y0) / (y1 - y0) * (H - MT - MB)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
           f'font-family="sans-serif" font-size="12">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<text x="{W / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
           f'<line x1="{ML}" y1="{H - MB}" x2="{W - MR}" y2="{H - MB}" stroke="black"/>',
           f'<line x1="{ML}" y1="{MT}" x2="{ML}" y2="{H - MB}" stroke="black"/>']
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{px(t):.1f}" y1="{H - MB}" x2="{px(t):.1f}" y2="{H - MB + 5}" stroke="black"/>')
        out.append(f'<text x="{px(t):.1f}" y="{H - MB + 18}" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{ML - 5}" y1="{py(t):.1f}" x2="{ML}" y2="{py(t):.1f}" stroke="black"/>')
        out.append(f'<text x="{ML - 8}" y="{py(t) + 4:.1f}" text-anchor="end">{t:.4g}</text>')
    out.append(f'<text x="{W / 2}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{H / 2}" text-anchor="middle" transform="rotate(-90 16 {H / 2})">'
               f'{escape(ylabel)}</text>')

    for i, s in enumerate(series):
        c = s.get("color", COLORS[i % len(COLORS)])
        x = np.asarray(s["x"], float)
        y = np.asarray(s["y"], float)
        keep = np.isfinite(x) & np.isfinite(y)
        x, y = x[keep], y[keep]
        kind = s.get("kind", "line")
        if kind == "line" and x.size:
            pts = " ".join(f"{px(a):.1f},{py(b):.1f}" for a, b in zip(x, y))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{c}" stroke-width="2"/>')
        elif kind == "points":
            for a, b in zip(x, y):
                out.append(f'<circle cx="{px(a):.1f}" cy="{py(b):.1f}" r="3.5" fill="{c}"/>')
        elif kind == "bars":
            half = 0.5 * s.get("width", 1.0)
            for a, b in zip(x, y):
                left, right = px(a - half), px(a + half)
                top, base = py(max(b, 0.0)), py(0.0)
                out.append(f'<rect x="{left:.1f}" y="{top:.1f}" width="{right - left:.1f}" '
                           f'height="{base - top:.1f}" fill="{c}" fill-opacity="0.5" stroke="none"/>')
        if s.get("label"):
            ly = MT + 8 + 16 * i
            out.append(f'<rect x="{W - MR - 150}" y="{ly - 9}" width="10" height="10" fill="{c}"/>')
            out.append(f'<text x="{W - MR - 135}" y="{ly}">{escape(s["label"])}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
