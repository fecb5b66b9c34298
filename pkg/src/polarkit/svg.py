"""Static SVG histograms, written by hand so output is byte-for-byte stable."""

from xml.sax.saxutils import escape

import numpy as np

PANEL_W = 220
PANEL_H = 140
MARGIN = 30


def histogram_panels(series, bins: int = 20, title: str = "", columns: int = 4) -> str:
    """Grid of histograms over ``[0, 1]``, one per ``(label, values)`` pair."""
    series = list(series)
    rows = max(1, -(-len(series) // columns))
    width = columns * PANEL_W + MARGIN
    height = rows * PANEL_H + 2 * MARGIN
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{MARGIN}" y="18" font-size="13">{escape(title)}</text>',
    ]
    edges = np.linspace(0.0, 1.0, bins + 1)
    for k, (label, values) in enumerate(series):
        ox = MARGIN + (k % columns) * PANEL_W
        oy = MARGIN + (k // columns) * PANEL_H
        counts, _ = np.histogram(np.asarray(values, dtype=float), bins=edges)
        frac = counts / max(1, counts.sum())
        plot_w, plot_h = PANEL_W - 30, PANEL_H - 40
        top = max(float(frac.max()), 1e-12)
        out.append(f'<g transform="translate({ox},{oy})">')
        out.append(f'<text x="0" y="10">{escape(str(label))}</text>')
        bw = plot_w / bins
        for b, f in enumerate(frac):
            h = plot_h * float(f) / top
            out.append(
                f'<rect x="{b * bw:.2f}" y="{15 + plot_h - h:.2f}" width="{bw - 1:.2f}" '
                f'height="{h:.2f}" fill="steelblue"/>'
            )
        base = 15 + plot_h
        out.append(f'<line x1="0" y1="{base}" x2="{plot_w}" y2="{base}" stroke="black"/>')
        out.append(f'<text x="0" y="{base + 12}">0</text>')
        out.append(f'<text x="{plot_w - 6}" y="{base + 12}">1</text>')
        out.append(f'<text x="{plot_w / 2 - 4:.1f}" y="{base + 12}">I</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
