"""Minimal standalone SVG emission for step-function plots.

Plots are inspection artifacts: self-contained files, no plotting
dependency, diffable output.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

_HEADER = (
    '<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
    'viewBox="0 0 {w} {h}">\n'
)


def step_function_svg(
    values: Sequence[float],
    title: str = "",
    width: int = 720,
    height: int = 480,
    diagonal: bool = True,
) -> str:
    """Render values as a right-continuous step function on [0, 1] x [0, 1].

    ``values[i]`` is the plateau on the i-th of len(values) equal-width
    intervals.  With ``diagonal`` the identity line is drawn dotted, the
    style used for refinement-table plots.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("nothing to plot")
    pad = 40
    x0, y0 = pad, height - pad
    sx = width - 2 * pad
    sy = height - 2 * pad

    def px(x: float) -> float:
        return x0 + x * sx

    def py(y: float) -> float:
        return y0 - y * sy

    n = values.size
    parts = [_HEADER.format(w=width, h=height)]
    parts.append(f'<rect x="{pad}" y="{pad}" width="{sx}" height="{sy}" '
                 'fill="white" stroke="black" stroke-width="1"/>\n')
    if title:
        parts.append(f'<text x="{width/2:.1f}" y="{pad - 12}" text-anchor="middle" '
                     f'font-family="monospace" font-size="14">{title}</text>\n')
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        parts.append(f'<text x="{px(frac):.1f}" y="{y0 + 16}" text-anchor="middle" '
                     f'font-family="monospace" font-size="10">{frac:g}</text>\n')
        parts.append(f'<text x="{pad - 6}" y="{py(frac) + 3:.1f}" text-anchor="end" '
                     f'font-family="monospace" font-size="10">{frac:g}</text>\n')
    if diagonal:
        parts.append(f'<line x1="{px(0):.1f}" y1="{py(0):.1f}" x2="{px(1):.1f}" y2="{py(1):.1f}" '
                     'stroke="black" stroke-width="1" stroke-dasharray="2,4"/>\n')
    coords = [f"{px(0):.2f},{py(values[0]):.2f}"]
    for i in range(n):
        left = i / n
        right = (i + 1) / n
        y = values[i]
        coords.append(f"{px(left):.2f},{py(y):.2f}")
        coords.append(f"{px(right):.2f},{py(y):.2f}")
    parts.append(f'<polyline points="{" ".join(coords)}" fill="none" '
                 'stroke="steelblue" stroke-width="1"/>\n')
    parts.append("</svg>\n")
    return "".join(parts)


def write_step_svg(values: Sequence[float], path, **kwargs) -> None:
    with open(path, "w") as fh:
        fh.write(step_function_svg(values, **kwargs))
