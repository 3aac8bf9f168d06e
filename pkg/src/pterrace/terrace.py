"""Betti step functions, terrace matrices and the terrace area summary.

Conventions used throughout:

* a bar with birth ``b`` and death ``d`` counts at threshold ``y`` when
  ``d < y <= b``;
* step functions store breakpoints in descending order, and ``counts[q]``
  holds on ``(breakpoints[q + 1], breakpoints[q]]`` with ``-inf`` after the
  last breakpoint;
* terrace ``yvec`` is descending and always contains 0.0 as a floor.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from pterrace._io import fmt_float
from pterrace.errors import DataError
from pterrace.persistence import Barcode


@dataclass(frozen=True)
class BettiStepFunction:
    breakpoints: Tuple[float, ...]
    counts: Tuple[int, ...]

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        counts = tuple(int(c) for c in self.counts)
        if len(bp) != len(counts) or not bp:
            raise DataError("breakpoints and counts must be non-empty and of equal length")
        if any(a <= b for a, b in zip(bp, bp[1:])):
            raise DataError("breakpoints must be strictly descending")
        if any(c < 0 for c in counts):
            raise DataError("Betti counts must be non-negative")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def trivial(cls) -> "BettiStepFunction":
        return cls((0.0,), (0,))

    def __call__(self, y):
        """Evaluate at a scalar or array of thresholds."""
        asc = np.asarray(self.breakpoints[::-1])
        counts = np.asarray(self.counts[::-1] + (0,))
        idx = np.searchsorted(asc, np.asarray(y, dtype=float), side="left")
        out = counts[idx]
        return int(out) if np.ndim(out) == 0 else out

    def canonical(self) -> "BettiStepFunction":
        """Drop breakpoints across which the count does not change."""
        keep_bp: List[float] = []
        keep_c: List[int] = []
        above = 0
        for b, c in zip(self.breakpoints, self.counts):
            if c != above:
                keep_bp.append(b)
                keep_c.append(c)
            above = c
        if not keep_bp:
            return BettiStepFunction.trivial()
        return BettiStepFunction(tuple(keep_bp), tuple(keep_c))


def betti_step_function(barcode: Barcode, k: int) -> BettiStepFunction:
    """Turn the dimension-``k`` bars into a step function of the threshold.

    Births contribute +1 and deaths -1; sorting the events from the top
    threshold downward and taking the running sum gives the count just below
    each breakpoint.  Equal filtration values are merged into one breakpoint.
    An essential bar never dies, so its -1 is placed one float below its
    clamped death to keep it alive at the clamp value itself.
    """
    events: Dict[float, int] = {}
    for p in barcode.pairs:
        if p.dim != k:
            continue
        death = float(np.nextafter(p.death, -math.inf)) if p.essential else p.death
        events[p.birth] = events.get(p.birth, 0) + 1
        events[death] = events.get(death, 0) - 1
    if not events:
        return BettiStepFunction.trivial()
    filtration = sorted(events, reverse=True)
    counts = np.cumsum([events[f] for f in filtration])
    return BettiStepFunction(tuple(filtration), tuple(int(c) for c in counts))


@dataclass(frozen=True, eq=False)
class TerraceMatrix:
    xvec: Tuple[float, ...]
    yvec: Tuple[float, ...]
    zmat: np.ndarray
    dim: int

    def __post_init__(self):
        z = np.array(self.zmat, dtype=np.int64, copy=True)
        if z.shape != (len(self.yvec), len(self.xvec)):
            raise DataError(f"zmat shape {z.shape} != ({len(self.yvec)}, {len(self.xvec)})")
        if np.any(z < 0):
            raise DataError("terrace heights must be non-negative")
        z.setflags(write=False)
        object.__setattr__(self, "xvec", tuple(float(x) for x in self.xvec))
        object.__setattr__(self, "yvec", tuple(float(y) for y in self.yvec))
        object.__setattr__(self, "zmat", z)

    def __eq__(self, other):
        if not isinstance(other, TerraceMatrix):
            return NotImplemented
        return (
            self.xvec == other.xvec
            and self.yvec == other.yvec
            and self.dim == other.dim
            and np.array_equal(self.zmat, other.zmat)
        )

    __hash__ = None

    @property
    def max_height(self) -> int:
        return int(self.zmat.max()) if self.zmat.size else 0

    def to_csv(self, header: str = "") -> str:
        lines = [f"# pterrace terrace dim={self.dim}" + (f" {header}" if header else "")]
        lines.append("bandwidths," + ",".join(fmt_float(x) for x in self.xvec))
        for y, row in zip(self.yvec, self.zmat):
            lines.append(fmt_float(y) + "," + ",".join(str(int(z)) for z in row))
        return "\n".join(lines) + "\n"

    def to_json(self, kde: Optional[dict] = None, grid: Optional[dict] = None) -> str:
        doc = {
            "dim": self.dim,
            "xvec": list(self.xvec),
            "yvec": list(self.yvec),
            "zmat": self.zmat.tolist(),
            "kde": kde or {},
            "grid": grid or {},
        }
        return json.dumps(doc, indent=1) + "\n"

    @classmethod
    def from_csv_text(cls, text: str, dim: Optional[int] = None) -> "TerraceMatrix":
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if dim is None and "dim=" in line:
                    dim = int(line.split("dim=")[1].split()[0])
                continue
            rows.append(line.split(","))
        if not rows or rows[0][0] != "bandwidths":
            raise DataError("terrace CSV must start with a 'bandwidths,...' row")
        try:
            xvec = [float(x) for x in rows[0][1:]]
            yvec = [float(r[0]) for r in rows[1:]]
            zmat = [[int(z) for z in r[1:]] for r in rows[1:]]
        except ValueError as exc:
            raise DataError(f"malformed terrace CSV: {exc}") from None
        if any(len(r) != len(xvec) for r in zmat):
            raise DataError("terrace CSV rows have inconsistent widths")
        return cls(tuple(xvec), tuple(yvec), np.array(zmat, dtype=np.int64).reshape(len(yvec), len(xvec)), dim or 0)

    @classmethod
    def from_json_text(cls, text: str) -> "TerraceMatrix":
        doc = json.loads(text)
        z = np.array(doc["zmat"], dtype=np.int64).reshape(len(doc["yvec"]), len(doc["xvec"]))
        return cls(tuple(doc["xvec"]), tuple(doc["yvec"]), z, int(doc["dim"]))


def assemble_terrace(
    step_functions: Sequence[BettiStepFunction],
    bandwidths: Sequence[float],
    k: int,
) -> TerraceMatrix:
    """Stack per-bandwidth step functions into the terrace matrix.

    ``yvec`` is the descending union of every breakpoint plus the 0.0 floor.
    Each column is filled with the interval rule
    ``(filtration[q+1] < y) & (y <= filtration[q]) * count[q]``.
    """
    if len(step_functions) != len(bandwidths):
        raise DataError(f"{len(step_functions)} step functions for {len(bandwidths)} bandwidths")
    xvec = [float(h) for h in bandwidths]
    if not xvec:
        raise DataError("no bandwidths")
    if any(a >= b for a, b in zip(xvec, xvec[1:])):
        raise DataError("bandwidths must be strictly ascending")
    ys = {0.0}
    for sf in step_functions:
        ys.update(sf.breakpoints)
    yvec = np.array(sorted(ys, reverse=True))
    zmat = np.zeros((len(yvec), len(xvec)), dtype=np.int64)
    for p, sf in enumerate(step_functions):
        filtration = np.array(sf.breakpoints + (-math.inf,))
        zvec = np.zeros(len(yvec), dtype=np.int64)
        for q, count in enumerate(sf.counts):
            if count:
                zvec += ((filtration[q + 1] < yvec) & (yvec <= filtration[q])) * count
        zmat[:, p] = zvec
    return TerraceMatrix(tuple(xvec), tuple(yvec.tolist()), zmat, k)


@dataclass(frozen=True)
class TerraceAreaSummary:
    """Standardized area per terrace height ``h >= 1``."""

    areas: Dict[int, float]
    x_range: Tuple[float, float]
    y_range: Tuple[float, float]
    zero_area: float = 0.0

    def area(self, h: int) -> float:
        return self.areas.get(h, 0.0)

    @property
    def total(self) -> float:
        return float(sum(self.areas.values()))

    def to_csv(self) -> str:
        lines = ["height,area"]
        lines += [f"{h},{fmt_float(a)}" for h, a in sorted(self.areas.items())]
        return "\n".join(lines) + "\n"


def terrace_area(matrix: TerraceMatrix) -> TerraceAreaSummary:
    """Fraction of the standardized (bandwidth x filtration) rectangle at each height.

    The open cell between bandwidths ``x_i, x_{i+1}`` and filtrations
    ``y_{j+1}, y_j`` carries ``zmat[j, i]`` (left bandwidth, upper filtration).
    """
    x = np.asarray(matrix.xvec)
    y = np.asarray(matrix.yvec)
    if x.size < 2 or y.size < 2:
        raise DataError("terrace area needs at least two bandwidths and two filtration values")
    x_lo, x_hi = float(x.min()), float(x.max())
    y_lo, y_hi = float(y.min()), float(y.max())
    dx = np.diff(x) / (x_hi - x_lo)
    dy = -np.diff(y) / (y_hi - y_lo)
    weights = np.outer(dy, dx)
    heights = matrix.zmat[:-1, :-1]
    per_height = np.bincount(heights.ravel(), weights=weights.ravel())
    areas = {h: float(per_height[h]) for h in range(1, per_height.size)}
    return TerraceAreaSummary(areas, (x_lo, x_hi), (y_lo, y_hi), float(per_height[0]))


def slice_at_bandwidth(matrix: TerraceMatrix, i: int) -> BettiStepFunction:
    """The terrace column at bandwidth index ``i`` as a (canonical) step function."""
    if not 0 <= i < len(matrix.xvec):
        raise DataError(f"bandwidth index {i} out of range [0, {len(matrix.xvec)})")
    column = matrix.zmat[:, i]
    return BettiStepFunction(matrix.yvec, tuple(int(c) for c in column)).canonical()


def bars_from_step(sf: BettiStepFunction) -> List[Tuple[float, float]]:
    """Decompose a step function into (birth, death) bars with the same counts.

    The decomposition is not unique; when the count drops, the most recently
    born bars are closed first.
    """
    bars: List[Tuple[float, float]] = []
    open_births: List[float] = []
    for q, (b, c) in enumerate(zip(sf.breakpoints, sf.counts)):
        prev = sf.counts[q - 1] if q else 0
        if c > prev:
            open_births.extend([b] * (c - prev))
        elif c < prev:
            for _ in range(prev - c):
                bars.append((open_births.pop(), b))
    tail = sf.breakpoints[-1]
    while open_births:
        bars.append((open_births.pop(), -math.inf if sf.counts[-1] else tail))
    return bars
