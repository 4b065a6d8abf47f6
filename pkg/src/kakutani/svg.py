"""Minimal SVG output: ruled partition lines and a log-scale curve plot."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .scheme import fraction_str

WIDTH = 900
MARGIN = 40


def _doc(w, h, body):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}" font-family="sans-serif">\n' + "\n".join(body) + "\n</svg>\n"
    )


def partitions_svg(levels, title: str = "") -> str:
    """One ruled line per level with a tick at every endpoint.

    Endpoints that first appear at a level are labelled there.
    """
    row = 56
    h = 2 * MARGIN + row * len(levels)
    span = WIDTH - 2 * MARGIN
    body = []
    if title:
        body.append(f'<text x="{MARGIN}" y="{MARGIN - 16}" font-size="13">{escape(title)}</text>')
    seen = set()
    for i, lvl in enumerate(levels):
        y = MARGIN + row * i + 20
        body.append(f'<text x="8" y="{y + 4}" font-size="11">{lvl.n}</text>')
        body.append(f'<line x1="{MARGIN}" y1="{y}" x2="{MARGIN + span}" y2="{y}" stroke="black"/>')
        for e in lvl.endpoints():
            x = MARGIN + float(e) * span
            body.append(f'<line x1="{x:.2f}" y1="{y - 6}" x2="{x:.2f}" y2="{y + 6}" stroke="black"/>')
            if e not in seen and 0 < e < 1:
                body.append(
                    f'<text x="{x:.2f}" y="{y + 20}" font-size="9" text-anchor="middle">{fraction_str(e)}</text>'
                )
            seen.add(e)
    return _doc(WIDTH, h, body)


def curve_svg(curve, title: str = "") -> str:
    """Extreme discrepancy against ``-log10 lam``, log-scaled vertically."""
    h = 420
    pts = [(-math.log10(float(v.lam)), math.log10(float(v.extreme))) for v in curve]
    if not pts:
        return _doc(WIDTH, h, [])
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    x0, x1 = min(xs), max(xs) or 1.0
    y0, y1 = math.floor(min(ys)), math.ceil(max(ys))
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    sx = lambda x: MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2 * MARGIN)  # noqa: E731
    sy = lambda y: h - MARGIN - (y - y0) / (y1 - y0) * (h - 2 * MARGIN)  # noqa: E731
    body = []
    if title:
        body.append(f'<text x="{MARGIN}" y="20" font-size="13">{escape(title)}</text>')
    body.append(f'<line x1="{MARGIN}" y1="{h - MARGIN}" x2="{WIDTH - MARGIN}" y2="{h - MARGIN}" stroke="black"/>')
    body.append(f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{h - MARGIN}" stroke="black"/>')
    for d in range(y0, y1 + 1):
        body.append(f'<text x="4" y="{sy(d) + 4:.1f}" font-size="10">1e{d}</text>')
    path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
    body.append(f'<polyline points="{path}" fill="none" stroke="steelblue" stroke-width="1.5"/>')
    for x, y in pts:
        body.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.5" fill="steelblue"/>')
    body.append(
        f'<text x="{WIDTH / 2:.0f}" y="{h - 8}" font-size="11" text-anchor="middle">-log10(lambda)</text>'
    )
    return _doc(WIDTH, h, body)
