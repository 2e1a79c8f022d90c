"""Minimal SVG line plots. Convenience output only; nothing checks them."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _panel(series, x0, y0, w, h, title, xlabel):
    """``series`` is a list of ``(label, xs, ys)``."""
    xs_all = np.concatenate([np.asarray(s[1], float) for s in series])
    ys_all = np.concatenate([np.asarray(s[2], float) for s in series])
    xmin, xmax = float(xs_all.min()), float(xs_all.max())
    ymin, ymax = float(ys_all.min()), float(ys_all.max())
    if xmax == xmin:
        xmax = xmin + 1.0
    if ymax == ymin:
        ymin, ymax = ymin - 0.5, ymax + 0.5
    pad = 40

    def sx(v):
        return x0 + pad + (v - xmin) / (xmax - xmin) * (w - 2 * pad)

    def sy(v):
        return y0 + h - pad - (v - ymin) / (ymax - ymin) * (h - 2 * pad)

    parts = [
        f'<rect x="{x0 + pad}" y="{y0 + pad}" width="{w - 2 * pad}" height="{h - 2 * pad}" '
        'fill="none" stroke="#999"/>',
        f'<text x="{x0 + w / 2}" y="{y0 + 20}" text-anchor="middle">{escape(title)}</text>',
        f'<text x="{x0 + w / 2}" y="{y0 + h - 8}" text-anchor="middle" font-size="11">{escape(xlabel)}</text>',
        f'<text x="{x0 + 4}" y="{y0 + pad}" font-size="10">{ymax:.4g}</text>',
        f'<text x="{x0 + 4}" y="{y0 + h - pad}" font-size="10">{ymin:.4g}</text>',
    ]
    for k, (label, xs, ys) in enumerate(series):
        color = COLORS[k % len(COLORS)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(xs, ys))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        parts.append(f'<text x="{x0 + w - pad - 4}" y="{y0 + pad + 14 * (k + 1)}" '
                     f'text-anchor="end" font-size="11" fill="{color}">{escape(label)}</text>')
    return "\n".join(parts)


def trajectory_svg(ts, xs, ys, title="trajectory"):
    """Two panels: ``x(t), y(t)`` and the orbit ``(x, y)``."""
    w, h = 480, 360
    body = [
        _panel([("x", ts, xs), ("y", ts, ys)], 0, 0, w, h, title, "t"),
        _panel([("orbit", xs, ys)], w, 0, w, h, "orbit", "x"),
    ]
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{2 * w}" height="{h}" '
            f'font-family="sans-serif">\n' + "\n".join(body) + "\n</svg>\n")


def series_svg(xs, named_series, title, xlabel):
    w, h = 640, 360
    body = _panel([(name, xs, ys) for name, ys in named_series], 0, 0, w, h, title, xlabel)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
            f'font-family="sans-serif">\n{body}\n</svg>\n')
