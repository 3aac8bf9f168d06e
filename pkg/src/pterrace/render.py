"""SVG figures: terrace satellite view, terrace area plot, barcode slices.

Output is plain SVG 1.1 text built by hand.  Every numeric attribute is
printed with six decimals, so a figure is a pure function of its inputs and
can be compared byte for byte.

Palettes have 16 entries.  Entry 0 (light grey) is height 0; entries 1..15
are discrete steps of a colour-blind-safe sequential map:

viridis: #fde725 #d0e11c #a0da39 #73d056 #4ac16d #2db27d #1fa187 #21918c
         #277f8e #2e6e8e #365c8d #3f4788 #46327e #481b6d #440154
cividis: #fee838 #edd54a #d9c55c #c5b568 #b1a570 #9f9775 #8e8978 #7d7c78
         #6c6e72 #5d616e #4c556c #39486c #213b6e #002f6d #00224e

Heights at or above the cap share the cap's colour.  Without an explicit
cap, heights of 15 and above share the last entry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

from pterrace._io import PathLike, atomic_write
from pterrace.errors import DataError
from pterrace.terrace import TerraceAreaSummary, TerraceMatrix, bars_from_step, slice_at_bandwidth

ZERO_COLOR = "#f2f2f2"
PALETTES = {
    "viridis": [ZERO_COLOR] + """#fde725 #d0e11c #a0da39 #73d056 #4ac16d #2db27d #1fa187 #21918c
        #277f8e #2e6e8e #365c8d #3f4788 #46327e #481b6d #440154""".split(),
    "cividis": [ZERO_COLOR] + """#fee838 #edd54a #d9c55c #c5b568 #b1a570 #9f9775 #8e8978 #7d7c78
        #6c6e72 #5d616e #4c556c #39486c #213b6e #002f6d #00224e""".split(),
}

MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 80.0, 110.0, 30.0, 55.0


@dataclass(frozen=True)
class RenderOptions:
    height_cap: Optional[int] = None
    palette: str = "viridis"
    width_px: int = 640
    height_px: int = 480
    annotate: bool = True

    def __post_init__(self):
        if self.height_cap is not None and self.height_cap < 1:
            raise DataError(f"height_cap must be >= 1, got {self.height_cap}")
        if self.palette not in PALETTES:
            raise DataError(f"unknown palette {self.palette!r}; choose from {', '.join(PALETTES)}")
        if self.width_px < 1 or self.height_px < 1:
            raise DataError("figure size must be positive")

    @property
    def colors(self) -> List[str]:
        return PALETTES[self.palette]

    @property
    def effective_cap(self) -> int:
        last = len(self.colors) - 1
        return last if self.height_cap is None else min(self.height_cap, last)


def _f(v: float) -> str:
    return f"{v:.6f}"


def _tick(v: float) -> str:
    return escape(f"{v:.4g}")


class _Canvas:
    def __init__(self, options: RenderOptions):
        self.opt = options
        self.parts: List[str] = []
        self.w = float(options.width_px)
        self.h = float(options.height_px)
        left = MARGIN_LEFT if options.annotate else 10.0
        right = MARGIN_RIGHT if options.annotate else 10.0
        top = MARGIN_TOP if options.annotate else 10.0
        bottom = MARGIN_BOTTOM if options.annotate else 10.0
        self.px0, self.px1 = left, max(left + 1.0, self.w - right)
        self.py0, self.py1 = top, max(top + 1.0, self.h - bottom)

    def map(self, x, y, xr, yr) -> Tuple[float, float]:
        fx = (x - xr[0]) / (xr[1] - xr[0])
        fy = (y - yr[0]) / (yr[1] - yr[0])
        return self.px0 + fx * (self.px1 - self.px0), self.py1 - fy * (self.py1 - self.py0)

    def rect(self, x0, y0, x1, y1, fill, cls=None):
        c = f' class="{cls}"' if cls else ""
        self.parts.append(
            f'<rect{c} x="{_f(min(x0, x1))}" y="{_f(min(y0, y1))}" width="{_f(abs(x1 - x0))}" '
            f'height="{_f(abs(y1 - y0))}" fill="{fill}"/>'
        )

    def line(self, x0, y0, x1, y1, stroke="#000000", width=1.0, cls=None):
        c = f' class="{cls}"' if cls else ""
        self.parts.append(
            f'<line{c} x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x1)}" y2="{_f(y1)}" '
            f'stroke="{stroke}" stroke-width="{_f(width)}"/>'
        )

    def text(self, x, y, s, anchor="middle", size=12.0, cls=None, rotate=False):
        c = f' class="{cls}"' if cls else ""
        rot = f' transform="rotate({_f(-90.0)} {_f(x)} {_f(y)})"' if rotate else ""
        self.parts.append(
            f'<text{c} x="{_f(x)}" y="{_f(y)}" font-family="sans-serif" font-size="{_f(size)}" '
            f'text-anchor="{anchor}"{rot}>{escape(s)}</text>'
        )

    def axes(self, xr, yr, xlabel, ylabel, xticks=None, yticks=None):
        if not self.opt.annotate:
            return
        self.line(self.px0, self.py1, self.px1, self.py1, cls="axis")
        self.line(self.px0, self.py0, self.px0, self.py1, cls="axis")
        xticks = _ticks(*xr) if xticks is None else xticks
        yticks = _ticks(*yr) if yticks is None else yticks
        for v in xticks:
            x, _ = self.map(v, yr[0], xr, yr)
            self.line(x, self.py1, x, self.py1 + 5.0, cls="tick")
            self.text(x, self.py1 + 18.0, _tick(v) if isinstance(v, float) else str(v), size=10.0)
        for v in yticks:
            _, y = self.map(xr[0], v, xr, yr)
            self.line(self.px0 - 5.0, y, self.px0, y, cls="tick")
            self.text(self.px0 - 8.0, y + 3.5, _tick(v), anchor="end", size=10.0)
        self.text((self.px0 + self.px1) / 2.0, self.h - 12.0, xlabel, cls="xlabel")
        self.text(16.0, (self.py0 + self.py1) / 2.0, ylabel, cls="ylabel", rotate=True)

    def svg(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(self.w)}" '
            f'height="{_f(self.h)}" viewBox="{_f(0.0)} {_f(0.0)} {_f(self.w)} {_f(self.h)}">\n'
        )
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _ticks(lo: float, hi: float, n: int = 5) -> List[float]:
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _range(values: Sequence[float]) -> Tuple[float, float]:
    lo, hi = float(min(values)), float(max(values))
    if not hi > lo:
        pad = 0.5 if lo == 0 else abs(lo) * 0.5
        return lo - pad, hi + pad
    return lo, hi


def _edges(values: Sequence[float]) -> List[float]:
    """Cell edges along an axis; a single value gets a unit-wide cell."""
    if len(values) == 1:
        return [values[0] - 0.5, values[0] + 0.5]
    return list(values)


def _write(svg: str, path: Optional[PathLike]) -> str:
    if path is not None:
        try:
            atomic_write(path, svg)
        except OSError as exc:
            raise DataError(f"cannot write {path}: {exc}") from exc
    return svg


def legend_entries(matrix: TerraceMatrix, options: RenderOptions) -> List[Tuple[int, str]]:
    """(colour index, label) for every distinct capped height in the terrace."""
    cap = options.effective_cap
    heights = sorted({min(int(v), cap) for v in np.unique(matrix.zmat)})
    bucketed = matrix.max_height > cap or (options.height_cap is not None and matrix.max_height >= cap)
    return [(h, f"≥{h}" if h == cap and bucketed else str(h)) for h in heights]


def terrace_svg(matrix: TerraceMatrix, options: RenderOptions = RenderOptions()) -> str:
    colors = options.colors
    cap = options.effective_cap
    xe = _edges(matrix.xvec)
    ye = list(matrix.yvec) if len(matrix.yvec) > 1 else [matrix.yvec[0] + 0.5, matrix.yvec[0] - 0.5]
    xr, yr = _range(xe), _range(ye)
    cv = _Canvas(options)
    cv.rect(cv.px0, cv.py0, cv.px1, cv.py1, colors[0], cls="background")
    z = np.minimum(matrix.zmat, cap)
    ncols = len(xe) - 1
    nrows = len(ye) - 1
    for i in range(ncols):
        j = 0
        while j < nrows:
            h = int(z[j, i])
            k = j
            while k + 1 < nrows and int(z[k + 1, i]) == h:
                k += 1
            if h:
                x0, y0 = cv.map(xe[i], ye[j], xr, yr)
                x1, y1 = cv.map(xe[i + 1], ye[k + 1], xr, yr)
                cv.rect(x0, y0, x1, y1, colors[h], cls=f"cell h{h}")
            j = k + 1
    cv.axes(xr, yr, "bandwidth", "filtration")
    if options.annotate:
        lx = cv.px1 + 15.0
        for n, (h, label) in enumerate(legend_entries(matrix, options)):
            ly = cv.py0 + 4.0 + 18.0 * n
            cv.rect(lx, ly, lx + 14.0, ly + 14.0, colors[h], cls="legend-swatch")
            cv.text(lx + 20.0, ly + 11.0, label, anchor="start", size=11.0, cls="legend")
        cv.text(lx, cv.py0 - 10.0, f"β{matrix.dim}", anchor="start", size=12.0, cls="legend-title")
    return cv.svg()


def render_terrace(matrix: TerraceMatrix, options: RenderOptions = RenderOptions(), path: Optional[PathLike] = None) -> str:
    """Satellite view of the terrace: bandwidth across, filtration up, colour = height."""
    return _write(terrace_svg(matrix, options), path)


def area_svg(summary: TerraceAreaSummary, options: RenderOptions = RenderOptions()) -> str:
    heights = sorted(summary.areas)
    hmax = max(heights) if heights else 1
    xr = (0.5, hmax + 0.5)
    yr = (0.0, 1.0)
    cv = _Canvas(options)
    step = max(1, int(math.ceil(hmax / 20)))
    xticks = [h for h in range(1, hmax + 1) if (h - 1) % step == 0] if heights else []
    cv.axes(xr, yr, "terrace height", "standardized area", xticks=xticks)
    for h in heights:
        a = summary.areas[h]
        if a <= 0:
            continue
        x0, y0 = cv.map(h - 0.35, 0.0, xr, yr)
        x1, y1 = cv.map(h + 0.35, a, xr, yr)
        cv.rect(x0, y0, x1, y1, "#3f4788", cls=f"bar h{h}")
    return cv.svg()


def render_area(summary: TerraceAreaSummary, options: RenderOptions = RenderOptions(), path: Optional[PathLike] = None) -> str:
    """Bar chart of standardized area against terrace height (heights >= 1)."""
    return _write(area_svg(summary, options), path)


def barcode_slice_svg(matrix: TerraceMatrix, i: int, options: RenderOptions = RenderOptions()) -> str:
    sf = slice_at_bandwidth(matrix, i)
    bars = [] if sf.counts == (0,) and len(sf.counts) == 1 else bars_from_step(sf)
    yr = _range(matrix.yvec)
    xr = (0.0, float(max(len(bars), 1)) + 1.0)
    cv = _Canvas(options)
    cv.axes(xr, yr, f"bars at bandwidth {matrix.xvec[i]:.4g}", "filtration", xticks=[])
    for n, (birth, death) in enumerate(bars, start=1):
        death = max(death, yr[0])
        x, y0 = cv.map(float(n), death, xr, yr)
        _, y1 = cv.map(float(n), birth, xr, yr)
        cv.line(x, y0, x, y1, stroke="#3f4788", width=2.0, cls="bar")
    return cv.svg()


def render_barcode_slice(
    matrix: TerraceMatrix, i: int, options: RenderOptions = RenderOptions(), path: Optional[PathLike] = None
) -> str:
    """Barcode at one bandwidth, drawn vertically against the terrace's filtration axis."""
    return _write(barcode_slice_svg(matrix, i, options), path)
