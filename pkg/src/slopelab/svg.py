"""SVG rendering of a lift with the diagonals ``y = x +- 1``.

Coordinates are floats; every annotated value is an exact string in a
``data-*`` attribute so the picture can be audited against the certificate.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import quoteattr

from .lifts import Certified, transitivity_check
from .maps import PiecewiseAffineMap
from .numeric import format_scalar

SIZE = 600
MARGIN = 40


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def lift_svg(F: PiecewiseAffineMap, K: int = 1, title: str = "", cert=None) -> str:
    """Graph of ``F`` over ``[-K, K]`` with diagonals and witness points."""
    if cert is None:
        cert = transitivity_check(F)
    cells = F.cells_between(-K, K)
    pts = [(c.lo, c.at(c.lo)) for c in cells] + [(cells[-1].hi, cells[-1].at(cells[-1].hi))]
    ys = [float(y) for _, y in pts]
    x0, x1 = -K, K
    y0, y1 = min(ys + [x0 - 1.0]), max(ys + [x1 + 1.0])
    span = SIZE - 2 * MARGIN

    def px(x):
        return MARGIN + (float(x) - x0) / (x1 - x0) * span

    def py(y):
        return SIZE - MARGIN - (float(y) - y0) / (y1 - y0) * span

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
           f'viewBox="0 0 {SIZE} {SIZE}">']
    if title:
        out.append(f"<title>{title}</title>")
    out.append(f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>')
    if y0 <= 0 <= y1:
        out.append(f'<line class="axis" x1="{_fmt(px(x0))}" y1="{_fmt(py(0))}" '
                   f'x2="{_fmt(px(x1))}" y2="{_fmt(py(0))}" stroke="#999"/>')
    out.append(f'<line class="axis" x1="{_fmt(px(0))}" y1="{_fmt(py(y0))}" '
               f'x2="{_fmt(px(0))}" y2="{_fmt(py(y1))}" stroke="#999"/>')
    for shift in (-1, 1):
        out.append(f'<line class="diagonal" data-shift="{shift}" '
                   f'x1="{_fmt(px(x0))}" y1="{_fmt(py(x0 + shift))}" '
                   f'x2="{_fmt(px(x1))}" y2="{_fmt(py(x1 + shift))}" '
                   f'stroke="#3a7" stroke-dasharray="6 4"/>')
    poly = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in pts)
    bps = " ".join(format_scalar(x) for x, _ in pts)
    out.append(f'<polyline class="graph" data-breakpoints={quoteattr(bps)} points="{poly}" '
               f'fill="none" stroke="black" stroke-width="2"/>')
    if isinstance(cert, Certified):
        for w in cert.witnesses:
            for name, x, shift in (("x_L", w.x_L, -1), ("x_R", w.x_R, 1)):
                for k in range(math.floor(x0 - x), math.ceil(x1 - x) + 1):
                    xk = x + k
                    if not x0 <= xk <= x1:
                        continue
                    out.append(f'<circle class="witness" data-kind="{name}" '
                               f'data-x={quoteattr(format_scalar(xk))} '
                               f'data-y={quoteattr(format_scalar(xk + shift))} '
                               f'cx="{_fmt(px(xk))}" cy="{_fmt(py(xk + shift))}" r="5" '
                               f'fill="none" stroke="#c33" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
