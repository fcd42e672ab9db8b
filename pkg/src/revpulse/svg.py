"""Minimal static SVG rendering of a feasibility grid (no plotting library)."""
from __future__ import annotations

import numpy as np
from skimage.measure import find_contours

W, H = 640, 420
ML, MR, MT, MB = 70, 20, 30, 50


def _color(x: float) -> str:
    # x in [0, 1]: 0 white, 1 deep blue
    r = int(255 * (1 - 0.85 * x))
    g = int(255 * (1 - 0.65 * x))
    return f"rgb({r},{g},255)"


def render_grid(grid, title: str = "") -> str:
    """Heat map of Im h(t) over (time, swept value), the u = 0 contour and accessible frames."""
    im = -grid.imag_h  # >= 0
    vmax = float(im.max()) or 1.0
    t, v = grid.t, grid.values
    pw, ph = W - ML - MR, H - MT - MB

    def X(tt):
        return ML + (tt - t[0]) / (t[-1] - t[0]) * pw

    def Y(vv):
        return MT + ph - (vv - v[0]) / (v[-1] - v[0]) * ph

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
             f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
             f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>']
    # coarse cells keep the file small
    ti = np.linspace(0, t.size - 1, min(t.size, 160)).astype(int)
    vi = np.arange(v.size)
    for a in range(vi.size):
        y0 = Y(v[vi[a]] - (v[1] - v[0]) / 2)
        y1 = Y(v[vi[a]] + (v[1] - v[0]) / 2)
        for b in range(ti.size - 1):
            val = im[vi[a], ti[b]:ti[b + 1] + 1].max() / vmax
            if val <= 0:
                continue
            x0, x1 = X(t[ti[b]]), X(t[ti[b + 1]])
            parts.append(f'<rect x="{x0:.2f}" y="{min(y0, y1):.2f}" width="{x1 - x0 + 0.3:.2f}" '
                         f'height="{abs(y1 - y0) + 0.3:.2f}" fill="{_color(val)}"/>')
    for c in find_contours(grid.u, 0.0):
        pts = " ".join(
            f"{X(np.interp(col, np.arange(t.size), t)):.2f},{Y(np.interp(row, np.arange(v.size), v)):.2f}"
            for row, col in c)
        parts.append(f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="1"/>')
    for lo, hi in grid.bands():
        parts.append(f'<rect x="{X(t[0]):.2f}" y="{Y(hi):.2f}" width="{pw:.2f}" '
                     f'height="{max(Y(lo) - Y(hi), 1.0):.2f}" fill="none" stroke="red" '
                     f'stroke-width="2" stroke-dasharray="6,4"/>')
    parts.append(f'<rect x="{ML}" y="{MT}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for k in range(5):
        tt = t[0] + k * (t[-1] - t[0]) / 4
        vv = v[0] + k * (v[-1] - v[0]) / 4
        parts.append(f'<text x="{X(tt):.1f}" y="{H - MB + 16}" text-anchor="middle">{tt:.4g}</text>')
        parts.append(f'<text x="{ML - 6}" y="{Y(vv) + 4:.1f}" text-anchor="end">{vv:.3g}</text>')
    parts.append(f'<text x="{ML + pw / 2}" y="{H - 12}" text-anchor="middle">t (a.u.)</text>')
    parts.append(f'<text x="16" y="{MT + ph / 2}" transform="rotate(-90 16 {MT + ph / 2})" '
                 f'text-anchor="middle">{grid.axis}</text>')
    if title:
        parts.append(f'<text x="{ML}" y="18">{title}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
