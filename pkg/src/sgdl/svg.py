"""Dependency-free SVG line charts."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 400
MARGIN = dict(left=70, right=20, top=40, bottom=50)


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def line_chart(x, y, title: str, xlabel: str, ylabel: str) -> str:
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    finite = [v for v in y if math.isfinite(v)]
    x0, x1 = (min(x), max(x)) if x else (0.0, 1.0)
    y0, y1 = (min(finite), max(finite)) if finite else (0.0, 1.0)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        pad = abs(y0) * 0.05 or 0.5
        y0, y1 = y0 - pad, y1 + pad
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(v):
        return MARGIN["left"] + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return MARGIN["top"] + (1 - (v - y0) / (y1 - y0)) * ph

    pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y) if math.isfinite(b))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<line x1="{MARGIN["left"]}" y1="{MARGIN["top"] + ph}" x2="{MARGIN["left"] + pw}" '
        f'y2="{MARGIN["top"] + ph}" stroke="black"/>',
        f'<line x1="{MARGIN["left"]}" y1="{MARGIN["top"]}" x2="{MARGIN["left"]}" '
        f'y2="{MARGIN["top"] + ph}" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        parts.append(f'<text x="{sx(t):.2f}" y="{MARGIN["top"] + ph + 18}" '
                     f'text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        parts.append(f'<text x="{MARGIN["left"] - 6}" y="{sy(t) + 4:.2f}" '
                     f'text-anchor="end">{t:.3g}</text>')
    parts += [
        f'<text x="{MARGIN["left"] + pw / 2}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="16" y="{MARGIN["top"] + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2})">{escape(ylabel)}</text>',
        f'<polyline fill="none" stroke="#1f77b4" stroke-width="1.5" points="{pts}"/>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"


def write_series_charts(series: dict, out_dir: Path | str, stem: str, x_key: str = "t") -> list[Path]:
    """One chart per non-x series, named ``<stem>_<series>.svg``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, values in series.items():
        if name == x_key:
            continue
        path = out_dir / f"{stem}_{name}.svg"
        path.write_text(line_chart(series[x_key], values, f"{stem}: {name}", x_key, name))
        paths.append(path)
    return paths
