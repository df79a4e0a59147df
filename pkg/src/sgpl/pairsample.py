"""Grid-based pair selection: candidate cells, isolated cell choice, pair draws.

The sampler lays the hex grid over the point set, keeps cells holding at
least ``n_min_per_cell`` points, picks cells one by one at random while
knocking out each chosen cell's k-ring from further consideration, and
finally draws one pair of distinct observations inside every chosen cell.
Spatial separation between chosen cells is what lets pairs from different
cells be treated as (approximately) independent.

Everything is deterministic given the input points, grid and config seed.
One replicate runs on a single sequential RNG stream; independent
replicates with distinct seeds can run concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sgpl.hexgrid import CellAssignment, CellId, GridSpec, assign_all, k_ring

__all__ = [
    "SamplerConfig",
    "PairSet",
    "candidate_cells",
    "select_isolated_cells",
    "sample_pairs",
    "run_sgpl_sampling",
]


@dataclass(frozen=True)
class SamplerConfig:
    """Tuning knobs for one sampling run.

    n_min_per_cell: minimum occupants for a cell to be a pair candidate
        (must be >= 2 so a pair can be formed).
    k_ring: isolation buffer; chosen cells end up pairwise farther apart
        than this grid distance.
    q_target: number of pairs (= cells) to aim for; exhaustion of
        candidates short of the target is recorded, not an error.
    seed: 64-bit seed for the run's RNG stream.
    """

    n_min_per_cell: int = 2
    k_ring: int = 1
    q_target: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_min_per_cell < 2:
            raise ValueError(f"n_min_per_cell must be >= 2, got {self.n_min_per_cell}")
        if self.k_ring < 0:
            raise ValueError(f"k_ring must be >= 0, got {self.k_ring}")
        if self.q_target < 1:
            raise ValueError(f"q_target must be >= 1, got {self.q_target}")
        if not (0 <= self.seed < 2**64):
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")


@dataclass(frozen=True)
class PairSet:
    """Selected observation pairs, one per chosen cell.

    ``pairs`` holds (index_i, index_l, cell) triples with index_i < index_l;
    cells are pairwise distinct.  ``achieved_target`` records whether the
    run reached its q_target or ran out of candidate cells first.
    """

    pairs: tuple[tuple[int, int, CellId], ...]
    achieved_target: bool

    @property
    def q(self) -> int:
        return len(self.pairs)


def candidate_cells(assignment: CellAssignment, cfg: SamplerConfig) -> set[CellId]:
    """Cells with at least ``cfg.n_min_per_cell`` member points."""
    return {c for c, members in assignment.cells.items() if len(members) >= cfg.n_min_per_cell}


def select_isolated_cells(
    candidates: set[CellId], cfg: SamplerConfig, rng: np.random.Generator
) -> list[CellId]:
    """Draw up to ``q_target`` candidate cells, isolating each pick.

    Uniform sampling without replacement is realized as a seeded shuffle
    of the candidate list (sorted by cell id first, so the result does not
    depend on set iteration order) followed by a linear scan that skips
    cells already knocked out by an earlier pick's k-ring.  Every pair of
    selected cells ends up at hex distance > cfg.k_ring.
    """
    ordered = sorted(candidates)
    if not ordered:
        return []
    perm = rng.permutation(len(ordered))
    selected: list[CellId] = []
    removed: set[CellId] = set()
    for j in perm:
        if len(selected) >= cfg.q_target:
            break
        cell = ordered[j]
        if cell in removed:
            continue
        selected.append(cell)
        removed.update(k_ring(cell, cfg.k_ring))
    return selected


def _pair_from_rank(m: int, k: int) -> tuple[int, int]:
    # Unordered pairs of range(m) enumerated (0,1),(0,2),...,(1,2),...
    a = 0
    step = m - 1
    while k >= step:
        k -= step
        a += 1
        step -= 1
    return a, a + 1 + k


def sample_pairs(
    assignment: CellAssignment,
    selected: list[CellId],
    cfg: SamplerConfig,
    rng: np.random.Generator,
) -> PairSet:
    """Draw one uniformly chosen unordered pair of distinct points per cell."""
    if not selected:
        return PairSet(pairs=(), achieved_target=(0 == cfg.q_target))
    sizes = []
    for cell in selected:
        m = len(assignment.cells[cell])
        if m < 2:
            raise RuntimeError(
                f"internal consistency error: selected cell {cell} has {m} member(s); "
                "cells must pass candidate filtering before pair sampling"
            )
        sizes.append(m * (m - 1) // 2)
    ranks = rng.integers(0, np.asarray(sizes, dtype=np.int64))
    pairs = []
    for cell, rank in zip(selected, ranks):
        members = assignment.cells[cell]
        a, b = _pair_from_rank(len(members), int(rank))
        pairs.append((members[a], members[b], cell))
    return PairSet(pairs=tuple(pairs), achieved_target=(len(pairs) == cfg.q_target))


def run_sgpl_sampling(coords: np.ndarray, grid: GridSpec, cfg: SamplerConfig) -> PairSet:
    """Full sampling pipeline: overlay, candidate filter, isolation, pair draws.

    ``coords`` is the (N, 2) array of point positions, N >= 2.  The result
    is a pure function of (coords, grid, cfg).
    """
    coords = np.asarray(coords, dtype=np.float64)
    if coords.shape[0] < 2:
        raise ValueError(f"need at least 2 points to sample pairs, got {coords.shape[0]}")
    assignment = assign_all(grid, coords)
    cands = candidate_cells(assignment, cfg)
    if not cands:
        raise ValueError(
            f"no cell reaches n_min_per_cell={cfg.n_min_per_cell}; "
            "lower the grid resolution or n_min_per_cell"
        )
    rng = np.random.default_rng(cfg.seed)
    selected = select_isolated_cells(cands, cfg, rng)
    return sample_pairs(assignment, selected, cfg, rng)
