"""Planar hexagonal tessellation with aperture-7 resolution levels.

Pointy-top hexagons indexed by axial coordinates (q, r).  Each resolution
step shrinks the cell edge by a factor of sqrt(7), so cell area drops by 7
per level, mirroring the aperture-7 hierarchy of production hex-grid
systems while staying on the flat plane.

All functions here are pure; a :class:`CellAssignment` is immutable after
construction, so everything is safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

SQRT3 = math.sqrt(3.0)

__all__ = [
    "GridSpec",
    "CellId",
    "CellAssignment",
    "cell_center",
    "point_to_cell",
    "hex_distance",
    "k_ring",
    "assign_all",
]


@dataclass(frozen=True)
class GridSpec:
    """Grid geometry: ``edge = base_edge * 7 ** (-resolution / 2)``.

    The default ``base_edge`` of 4.0 puts resolution 7 at an edge length of
    roughly 4.4e-3, i.e. about 2e4 cells over the unit square.
    """

    resolution: int
    base_edge: float = 4.0

    def __post_init__(self) -> None:
        if self.resolution < 0:
            raise ValueError(f"resolution must be >= 0, got {self.resolution}")
        if not (self.base_edge > 0.0 and math.isfinite(self.base_edge)):
            raise ValueError(f"base_edge must be positive and finite, got {self.base_edge}")

    @property
    def edge(self) -> float:
        """Hexagon edge length at this resolution."""
        return self.base_edge * 7.0 ** (-self.resolution / 2.0)


@dataclass(frozen=True, order=True)
class CellId:
    """Axial cell coordinate (pointy-top frame); hashable, usable as a map key."""

    q: int
    r: int


# Axial offsets of the six adjacent cells.
HEX_DIRECTIONS = (
    (1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1),
)


@dataclass(frozen=True)
class CellAssignment:
    """Partition of point indices into hex cells.

    ``cells`` maps each occupied :class:`CellId` to the sorted list of
    point indices it contains; every index 0..n_points-1 appears exactly
    once.  Treated as read-only after construction.
    """

    grid: GridSpec
    cells: Mapping[CellId, list[int]]
    n_points: int


def cell_center(spec: GridSpec, cell: CellId) -> tuple[float, float]:
    """Planar center of a hexagon: x = e*sqrt(3)*(q + r/2), y = e*1.5*r."""
    e = spec.edge
    return (e * SQRT3 * (cell.q + cell.r / 2.0), e * 1.5 * cell.r)


def _axial_round(qf: np.ndarray, rf: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Round fractional axial coordinates to the containing cell.

    Cube rounding: round all three cube components, then reset the one
    with the largest rounding error so q + r + s = 0 again.  Boundary
    points resolve deterministically through this largest-component reset
    (with half-even rounding underneath).
    """
    sf = -qf - rf
    q = np.rint(qf)
    r = np.rint(rf)
    s = np.rint(sf)
    dq = np.abs(q - qf)
    dr = np.abs(r - rf)
    ds = np.abs(s - sf)
    fix_q = (dq > dr) & (dq > ds)
    fix_r = ~fix_q & (dr > ds)
    q = np.where(fix_q, -r - s, q)
    r = np.where(fix_r, -q - s, r)
    return q.astype(np.int64), r.astype(np.int64)


def _points_to_axial(spec: GridSpec, xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    e = spec.edge
    qf = (SQRT3 / 3.0 * xs - ys / 3.0) / e
    rf = (2.0 / 3.0 * ys) / e
    return _axial_round(qf, rf)


def point_to_cell(spec: GridSpec, p: tuple[float, float]) -> CellId:
    """Cell whose hexagon contains ``p`` (nearest center under the hex metric)."""
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"point coordinates must be finite, got ({p[0]}, {p[1]})")
    q, r = _points_to_axial(spec, np.asarray([x]), np.asarray([y]))
    return CellId(int(q[0]), int(r[0]))


def hex_distance(a: CellId, b: CellId) -> int:
    """Grid distance between two cells (cube metric); adjacent cells are at 1."""
    dq = a.q - b.q
    dr = a.r - b.r
    return (abs(dq) + abs(dr) + abs(dq + dr)) // 2


def k_ring(center: CellId, k: int) -> set[CellId]:
    """All cells within grid distance ``k`` of ``center``, center included.

    Cardinality is 1 + 3k(k+1).
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    out: set[CellId] = set()
    for dq in range(-k, k + 1):
        for dr in range(max(-k, -dq - k), min(k, -dq + k) + 1):
            out.add(CellId(center.q + dq, center.r + dr))
    return out


def assign_all(spec: GridSpec, coords: np.ndarray) -> CellAssignment:
    """Assign every point to its cell.

    ``coords`` is an (N, 2) array of planar positions.  Uses the same
    rounding path as :func:`point_to_cell`, so the two always agree.
    """
    coords = np.asarray(coords, dtype=np.float64)
    if coords.ndim != 2 or coords.shape[1] != 2:
        raise ValueError(f"coords must have shape (N, 2), got {coords.shape}")
    n = coords.shape[0]
    if n == 0:
        raise ValueError("cannot assign an empty point set")
    if not np.all(np.isfinite(coords)):
        raise ValueError("point coordinates must be finite")
    qs, rs = _points_to_axial(spec, coords[:, 0], coords[:, 1])
    cells: dict[CellId, list[int]] = {}
    for i in range(n):
        cells.setdefault(CellId(int(qs[i]), int(rs[i])), []).append(i)
    return CellAssignment(grid=spec, cells=cells, n_points=n)


def cell_centers(spec: GridSpec, cells: Iterable[CellId]) -> np.ndarray:
    """Stack of cell centers, one row per cell (helper for exports/figures)."""
    return np.asarray([cell_center(spec, c) for c in cells], dtype=np.float64)
