"""Minimal self-contained SVG figures for block maps and planar flows."""

from __future__ import annotations

from typing import Iterable, Sequence
from xml.sax.saxutils import escape

from .cantor import BlockMap
from .planar import ComputationCurve, Trajectory, USet

GENERATOR = "tmflow-svg 1"

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _num(v) -> str:
    return f"{float(v):.6f}".rstrip("0").rstrip(".")


class _Canvas:
    """World rectangle ``[x0, x1] x [y0, y1]`` drawn with y pointing up."""

    def __init__(self, x0, x1, y0, y1, width=600, pad=20):
        self.x0, self.x1, self.y0, self.y1 = map(float, (x0, x1, y0, y1))
        self.scale = (width - 2 * pad) / (self.x1 - self.x0)
        self.pad = pad
        self.width = width
        self.height = int(round((self.y1 - self.y0) * self.scale + 2 * pad))
        self.items: list[str] = []

    def px(self, x) -> str:
        return _num(self.pad + (float(x) - self.x0) * self.scale)

    def py(self, y) -> str:
        return _num(self.height - self.pad - (float(y) - self.y0) * self.scale)

    def rect(self, x0, x1, y0, y1, **style):
        w = _num((float(x1) - float(x0)) * self.scale)
        h = _num((float(y1) - float(y0)) * self.scale)
        self.items.append(f'<rect x="{self.px(x0)}" y="{self.py(y1)}" width="{w}" '
                          f'height="{h}"{_style(style)}/>')

    def polyline(self, xs: Iterable, ys: Iterable, **style):
        pts = " ".join(f"{self.px(x)},{self.py(y)}" for x, y in zip(xs, ys))
        self.items.append(f'<polyline points="{pts}" fill="none"{_style(style)}/>')

    def text(self, x, y, s: str, size=10):
        self.items.append(f'<text x="{self.px(x)}" y="{self.py(y)}" font-size="{size}">'
                          f'{escape(s)}</text>')

    def render(self, title: str) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
                f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">')
        return "\n".join([
            '<?xml version="1.0" encoding="UTF-8"?>',
            f"<!-- generator: {GENERATOR} -->",
            head,
            f"<title>{escape(title)}</title>",
            *self.items,
            "</svg>",
        ]) + "\n"


def _style(style) -> str:
    return "".join(f' {k.replace("_", "-")}="{v}"' for k, v in sorted(style.items()))


def blockmap_svg(bm: BlockMap, title: str = "block map") -> str:
    """Source blocks (left square) and their images (right square), colour matched."""
    cv = _Canvas(0, 2.2, 0, 1, width=660)
    for off in (0.0, 1.2):
        cv.rect(off, off + 1, 0, 1, fill="none", stroke="#000", stroke_width="0.5")
    for i, comp in enumerate(bm.components):
        col = _PALETTE[i % len(_PALETTE)]
        for off, block in ((0.0, comp.source), (1.2, comp.image)):
            x0, x1, y0, y1 = block.footprint
            cv.rect(off + float(x0), off + float(x1), y0, y1,
                    fill=col, fill_opacity="0.5", stroke=col, stroke_width="0.5")
            if len(bm.components) <= 26:
                cv.text(off + (float(x0) + float(x1)) / 2, (float(y0) + float(y1)) / 2,
                        chr(ord("A") + i))
    return cv.render(title)


def flow_svg(curves: Sequence[ComputationCurve], trajectories: Sequence[Trajectory],
             usets: Sequence[USet] = (), title: str = "planar flow") -> str:
    """Bands, coding rectangles, computation curves and integrated trajectories."""
    bands = [cv.band for cv in curves] or [0]
    K = max((cv.height for cv in curves), default=1)
    cv_ = _Canvas(2 * min(bands) - 0.5, 2 * max(bands) + 1.5, -0.5, K + 0.5, width=400)
    for b in bands:
        cv_.rect(2 * b, 2 * b + 1, -0.5, K + 0.5, fill="#eeeeee", stroke="none")
    for u in usets:
        for x0, x1, y0, y1 in u.rects:
            cv_.rect(x0, x1, y0, y1, fill="#ffd700", fill_opacity="0.6", stroke="none")
    for i, curve in enumerate(curves):
        ys = [k / 16 for k in range(16 * curve.height + 1)]
        gs = curve.eval(ys)[0]
        cv_.polyline(gs, ys, stroke=_PALETTE[i % len(_PALETTE)], stroke_width="1")
    for traj in trajectories:
        cv_.polyline(traj.x, traj.y, stroke="#000", stroke_width="0.5", stroke_dasharray="2,2")
    return cv_.render(title)
