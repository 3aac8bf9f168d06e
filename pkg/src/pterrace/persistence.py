"""Super-level set persistence of grid functions on a cubical complex.

Cells of the complex are addressed in the doubled grid: a grid with ``r_a``
vertices along axis ``a`` becomes an array with ``2 r_a - 1`` entries per axis,
where even coordinates are vertex positions and odd coordinates are the
interiors of edges, squares and cubes.  A cell's dimension is the number of
odd coordinates.  Its faces sit one step away along each odd axis.

A cell enters the super-level filtration at the minimum of its vertex values.
The filtration order is: value descending, then cell dimension, then the
row-major index in the doubled grid.  The dimension key keeps every face
ahead of its cofaces when values tie.

Boundary columns are Python integers used as bitsets over filtration ranks,
so a column addition over Z/2 is one ``^`` and the pivot is ``bit_length() - 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from pterrace._io import fmt_float
from pterrace.errors import DataError
from pterrace.kde import ScalarGrid


@dataclass(frozen=True)
class PersistencePair:
    dim: int
    birth: float
    death: float
    essential: bool = False

    @property
    def persistence(self) -> float:
        return self.birth - self.death


@dataclass(frozen=True)
class Barcode:
    pairs: Tuple[PersistencePair, ...]
    max_dim: int
    grid_min: float
    grid_max: float
    bandwidth: Optional[float] = None

    def of_dim(self, k: int) -> Tuple[PersistencePair, ...]:
        return tuple(p for p in self.pairs if p.dim == k)

    def to_csv(self, header: str = "") -> str:
        head = f"# pterrace barcode max_dim={self.max_dim}"
        if self.bandwidth is not None:
            head += f" bandwidth={fmt_float(self.bandwidth)}"
        if header:
            head += " " + header
        lines = [head, "dim,birth,death,essential"]
        for p in self.pairs:
            lines.append(f"{p.dim},{fmt_float(p.birth)},{fmt_float(p.death)},{int(p.essential)}")
        return "\n".join(lines) + "\n"


def cell_values(values: np.ndarray, sublevel: bool = False) -> np.ndarray:
    """Doubled-grid array of cell filtration values.

    Each cell takes the min (super-level) or max (sub-level) of its vertices.
    """
    reduce = np.maximum if sublevel else np.minimum
    cells = np.asarray(values, dtype=float)
    for axis in range(cells.ndim):
        n = cells.shape[axis]
        shape = list(cells.shape)
        shape[axis] = 2 * n - 1
        out = np.empty(shape)
        even = [slice(None)] * cells.ndim
        odd = [slice(None)] * cells.ndim
        even[axis] = slice(0, None, 2)
        odd[axis] = slice(1, None, 2)
        out[tuple(even)] = cells
        lo = [slice(None)] * cells.ndim
        hi = [slice(None)] * cells.ndim
        lo[axis] = slice(0, -1)
        hi[axis] = slice(1, None)
        out[tuple(odd)] = reduce(cells[tuple(lo)], cells[tuple(hi)])
        cells = out
    return cells


def cell_dims(shape: Tuple[int, ...]) -> np.ndarray:
    """Number of odd coordinates of every doubled-grid cell."""
    dims = np.zeros(shape, dtype=np.int64)
    for axis, n in enumerate(shape):
        parity = (np.arange(n) % 2).reshape([-1 if a == axis else 1 for a in range(len(shape))])
        dims = dims + parity
    return dims


def _face_table(shape: Tuple[int, ...], flat_cells: np.ndarray, dim: int) -> np.ndarray:
    """Flat indices of the ``2 * dim`` codimension-one faces of each cell."""
    coords = np.unravel_index(flat_cells, shape)
    strides = np.cumprod((1,) + shape[:0:-1])[::-1]
    faces = []
    odd_axes = np.stack([c % 2 == 1 for c in coords], axis=1)
    # Per cell, the k-th odd axis in ascending order.
    order = np.argsort(~odd_axes, axis=1, kind="stable")[:, :dim]
    step = strides[order]
    for k in range(dim):
        faces.append(flat_cells - step[:, k])
        faces.append(flat_cells + step[:, k])
    return np.stack(faces, axis=1)


def _reduce(ranked_faces: Iterable[Tuple[int, List[int]]], cleared: bytearray):
    """Standard column reduction over Z/2 for one dimension; yields (low, col) pairs."""
    pivots = {}
    for j, faces in ranked_faces:
        if cleared[j]:
            continue
        col = 0
        for r in faces:
            col ^= 1 << r
        while col:
            low = col.bit_length() - 1
            other = pivots.get(low)
            if other is None:
                pivots[low] = col
                cleared[low] = 1
                yield low, j
                break
            col ^= other


def cubical_pairs(values: np.ndarray, max_dim: int, sublevel: bool = False):
    """Raw persistence of a grid function.

    Returns ``(pairs, essentials, cvals)`` where pairs are (dim, creator_flat,
    destroyer_flat) and essentials are (dim, creator_flat), all as flat indices
    into the doubled grid with values ``cvals``.  Zero-length pairs are kept.
    """
    values = np.asarray(values, dtype=float)
    d = values.ndim
    cvals = cell_values(values, sublevel=sublevel)
    shape = cvals.shape
    flat_vals = cvals.ravel()
    dims = cell_dims(shape).ravel()
    flat_idx = np.arange(flat_vals.size)
    key = flat_vals if sublevel else -flat_vals
    order = np.lexsort((flat_idx, dims, key))
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)

    top = min(max_dim + 1, d)
    cleared = bytearray(flat_vals.size)
    pairs = []
    for p in range(top, 0, -1):
        cells = order[dims[order] == p]
        face_ranks = rank[_face_table(shape, cells, p)]
        col_ranks = rank[cells]
        stream = zip(col_ranks.tolist(), face_ranks.tolist())
        for low, j in _reduce(stream, cleared):
            pairs.append((p - 1, int(order[low]), int(order[j])))

    paired = np.zeros(flat_vals.size, dtype=bool)
    for _, a, b in pairs:
        paired[a] = True
        paired[b] = True
    essentials = [
        (int(dims[c]), int(c)) for c in order if not paired[c] and dims[c] <= max_dim
    ]
    return pairs, essentials, cvals


def superlevel_persistence(grid, max_dim: int = 1) -> Barcode:
    """Barcode of the filtration ``{v : f(v) >= y}`` as ``y`` decreases.

    ``grid`` is a ScalarGrid or a bare array of vertex values.  Pairs with
    ``birth == death`` are dropped; the single essential class is reported
    with ``death`` clamped to the grid minimum.
    """
    bandwidth = None
    if isinstance(grid, ScalarGrid):
        values = grid.values
        bandwidth = grid.bandwidth
    else:
        values = np.asarray(grid, dtype=float)
        if values.size == 0:
            raise DataError("empty grid")
        if not np.all(np.isfinite(values)):
            raise DataError("grid values must be finite")
    if max_dim < 0 or max_dim > values.ndim:
        raise DataError(f"max_dim must be in [0, {values.ndim}], got {max_dim}")
    raw_pairs, essentials, cvals = cubical_pairs(values, max_dim)
    flat = cvals.ravel()
    gmin = float(values.min())
    gmax = float(values.max())
    out = []
    for k, a, b in raw_pairs:
        if k > max_dim:
            continue
        birth, death = float(flat[a]), float(flat[b])
        if birth != death:
            out.append((k, a, PersistencePair(k, birth, death)))
    for k, a in essentials:
        out.append((k, a, PersistencePair(k, float(flat[a]), gmin, essential=True)))
    out.sort(key=lambda t: (t[0], -t[2].birth, -t[2].death, t[1]))
    return Barcode(tuple(t[2] for t in out), max_dim, gmin, gmax, bandwidth)


def betti_at(barcode: Barcode, k: int, y: float) -> int:
    """Number of dimension-``k`` bars alive at threshold ``y``.

    A finite bar is alive on ``death < y <= birth``.  An essential bar never
    dies, so it is also alive at its clamped death value (the grid minimum).
    """
    count = 0
    for p in barcode.pairs:
        if p.dim != k or y > p.birth:
            continue
        if p.death < y or (p.essential and p.death <= y):
            count += 1
    return count
