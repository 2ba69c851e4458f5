"""Plain SVG drawings of point sets, graphs, geodesics, trees and probe geometry.

Output is a pure function of the inputs: coordinates are printed with fixed
precision and elements are emitted in a fixed order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geom import Window

SIZE = 800.0
PAD = 20.0


@dataclass
class Scene:
    window: Window
    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    edges: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), dtype=np.int64))
    paths: list = field(default_factory=list)          # vertex sequences
    tree_parent: np.ndarray | None = None               # parent array, -1 for none
    circles: list = field(default_factory=list)        # (cx, cy, r)
    arcs: list = field(default_factory=list)           # (r, center_angle, arc_length)
    barriers: list = field(default_factory=list)       # x abscissae

    def _scale(self):
        xmin, xmax, ymin, ymax = self.window.bounds
        s = (SIZE - 2 * PAD) / max(xmax - xmin, ymax - ymin)
        width = (xmax - xmin) * s + 2 * PAD
        height = (ymax - ymin) * s + 2 * PAD

        def tx(x, y):
            return PAD + (x - xmin) * s, height - PAD - (y - ymin) * s

        return tx, s, width, height

    def to_svg(self) -> str:
        tx, s, width, height = self._scale()
        xmin, xmax, ymin, ymax = self.window.bounds
        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2f}" height="{height:.2f}" '
               f'viewBox="0 0 {width:.2f} {height:.2f}">',
               '<rect width="100%" height="100%" fill="white"/>']

        # axes: window frame plus the coordinate axes where they fall inside
        x0, y0 = tx(xmin, ymax)
        x1, y1 = tx(xmax, ymin)
        out.append(f'<g id="axes" stroke="#888" stroke-width="1" fill="none">'
                   f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{x1 - x0:.2f}" height="{y1 - y0:.2f}"/>')
        if xmin <= 0 <= xmax:
            a, b = tx(0, ymin), tx(0, ymax)
            out.append(_line(a, b))
        if ymin <= 0 <= ymax:
            a, b = tx(xmin, 0), tx(xmax, 0)
            out.append(_line(a, b))
        out.append("</g>")

        P = self.points
        if len(self.edges):
            out.append('<g id="edges" stroke="#bbb" stroke-width="0.6">')
            out += [_line(tx(*P[i]), tx(*P[j])) for i, j in self.edges.tolist()]
            out.append("</g>")
        if self.tree_parent is not None:
            out.append('<g id="tree" stroke="#2a6" stroke-width="1">')
            out += [_line(tx(*P[v]), tx(*P[p])) for v, p in enumerate(self.tree_parent.tolist()) if p >= 0]
            out.append("</g>")
        for k, seq in enumerate(self.paths):
            pts = " ".join("{:.2f},{:.2f}".format(*tx(*P[v])) for v in seq)
            out.append(f'<polyline class="path" id="path{k}" data-vertices="{",".join(map(str, seq))}" '
                       f'points="{pts}" fill="none" stroke="#d22" stroke-width="2"/>')
        for cx, cy, r in self.circles:
            c = tx(cx, cy)
            out.append(f'<circle class="probe" cx="{c[0]:.2f}" cy="{c[1]:.2f}" r="{r * s:.2f}" '
                       f'fill="none" stroke="#36c" stroke-dasharray="4 3"/>')
        for r, theta, c in self.arcs:
            span = min(c / r, 2 * math.pi - 1e-9)
            a0, a1 = theta - span / 2, theta + span / 2
            p0 = tx(r * math.cos(a0), r * math.sin(a0))
            p1 = tx(r * math.cos(a1), r * math.sin(a1))
            large = 1 if span > math.pi else 0
            # y is flipped, so counter-clockwise in the plane is sweep-flag 0
            out.append(f'<path class="arc" d="M {p0[0]:.2f} {p0[1]:.2f} A {r * s:.2f} {r * s:.2f} 0 {large} 0 '
                       f'{p1[0]:.2f} {p1[1]:.2f}" fill="none" stroke="#c6c" stroke-width="3"/>')
        for x in self.barriers:
            out.append('<line class="barrier" x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" '
                       'stroke="#e80" stroke-width="2"/>'.format(*tx(x, ymin), *tx(x, ymax)))
        if len(P):
            out.append('<g id="points" fill="black">')
            rad = max(0.8, min(3.0, 0.15 * s))
            out += ['<circle cx="{:.2f}" cy="{:.2f}" r="{:.2f}"/>'.format(*tx(x, y), rad) for x, y in P.tolist()]
            out.append("</g>")
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_svg())


def _line(a, b) -> str:
    return f'<line x1="{a[0]:.2f}" y1="{a[1]:.2f}" x2="{b[0]:.2f}" y2="{b[1]:.2f}"/>'
