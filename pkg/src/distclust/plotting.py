"""Minimal dependency-free SVG scatter plots of clustered samples."""

from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")
MAX_POINTS = 4000


def _project(points):
    points = np.asarray(points, dtype=float)
    if points.ndim == 1 or points.shape[1] == 1:
        vals = points.reshape(-1)
        return np.column_stack([np.arange(len(vals), dtype=float), vals])
    return points[:, :2]


def scatter_svg(points, labels, centers=None, title="", width=480, height=360,
                axis_labels=("x0", "x1")):
    """Render the first two coordinates of ``points`` colored by ``labels``.

    One-dimensional data is drawn against the sample index. ``centers``
    (same coordinates) are marked with black crosses. At most
    :data:`MAX_POINTS` points are drawn, taken at an even stride.
    """
    xy = _project(points)
    labels = np.asarray(labels)
    stride = max(1, int(np.ceil(len(xy) / MAX_POINTS)))
    xy_s, lab_s = xy[::stride], labels[::stride]
    cxy = None
    if centers is not None and len(centers):
        c = np.asarray(centers, dtype=float)
        if c.ndim == 1 or c.shape[1] == 1:
            c = np.column_stack([np.full(len(c), len(xy) / 2.0), c.reshape(-1)])
        cxy = c[:, :2]

    allxy = xy if cxy is None else np.vstack([xy, cxy])
    lo = allxy.min(axis=0)
    hi = allxy.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    pad = 36.0

    def sx(v):
        return pad + (v - lo[0]) / span[0] * (width - 2 * pad)

    def sy(v):
        return height - pad - (v - lo[1]) / span[1] * (height - 2 * pad)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="13" '
        f'font-family="sans-serif">{escape(title)}</text>',
        f'<text x="{width / 2:.1f}" y="{height - 8}" text-anchor="middle" font-size="11" '
        f'font-family="sans-serif">{escape(axis_labels[0])}</text>',
        f'<text x="12" y="{height / 2:.1f}" font-size="11" font-family="sans-serif" '
        f'transform="rotate(-90 12 {height / 2:.1f})" text-anchor="middle">'
        f'{escape(axis_labels[1])}</text>',
    ]
    for (x, y), lab in zip(xy_s, lab_s):
        color = PALETTE[int(lab) % len(PALETTE)]
        out.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="1.6" fill="{color}" fill-opacity="0.6"/>')
    if cxy is not None:
        for x, y in cxy:
            px, py = sx(x), sy(y)
            out.append(f'<path d="M{px - 6:.1f} {py - 6:.1f}L{px + 6:.1f} {py + 6:.1f}'
                       f'M{px - 6:.1f} {py + 6:.1f}L{px + 6:.1f} {py - 6:.1f}" '
                       f'stroke="black" stroke-width="2.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
