"""Local destination selection by a bottom-to-top scan of road breadth."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .raster import as_grid


@dataclass(frozen=True)
class DestinationConfig:
    alpha: float = 1 / 24

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")


@dataclass(frozen=True)
class RowScan:
    """Maximal road runs of one row as inclusive ``(l, r)`` column pairs."""

    row: int
    intervals: tuple[tuple[int, int], ...]

    @property
    def breadth(self) -> int:
        return max((r - l for l, r in self.intervals), default=0)


@dataclass(frozen=True)
class Destination:
    row: int
    col: int

    @property
    def xy(self) -> tuple[float, float]:
        return float(self.col), float(self.row)


def _row_intervals(row: np.ndarray) -> tuple[tuple[int, int], ...]:
    padded = np.concatenate(([0], (row > 0).astype(np.int8), [0]))
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return tuple(zip(starts.tolist(), ends.tolist()))


def _scan_block(binary: np.ndarray, rows: range) -> list[RowScan]:
    return [RowScan(i, _row_intervals(binary[i])) for i in rows]


def scan_rows(binary, workers: int = 1) -> list[RowScan]:
    """Run-length scan of every row, returned in row order (top row first).

    Rows are independent; with ``workers > 1`` they are split into contiguous
    blocks scanned on a thread pool and reassembled in order, so the result is
    identical for any worker count.
    """
    binary = as_grid(binary)
    h = binary.shape[0]
    if workers <= 1 or h < 2 * workers:
        return _scan_block(binary, range(h))
    step = -(-h // workers)
    blocks = [range(s, min(s + step, h)) for s in range(0, h, step)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda rows: _scan_block(binary, rows), blocks))
    return [scan for part in parts for scan in part]


def row_breadths(binary) -> np.ndarray:
    """Vectorised road breadth of every row (max ``r - l`` over runs, 0 if none)."""
    road = as_grid(binary) > 0
    h, w = road.shape
    cols = np.arange(w)
    # column where the run containing each pixel started
    is_start = road & ~np.concatenate([np.zeros((h, 1), bool), road[:, :-1]], axis=1)
    start_col = np.maximum.accumulate(np.where(is_start, cols, -1), axis=1)
    length = np.where(road, cols - start_col, -1)
    return np.maximum(length.max(axis=1), 0)


def _pick_interval(intervals, width: int) -> tuple[int, int]:
    widest = max(r - l for l, r in intervals)
    centre = (width - 1) / 2
    candidates = [(l, r) for l, r in intervals if r - l == widest]
    # nearest midpoint to the image centre, then leftmost
    return min(candidates, key=lambda lr: (abs((lr[0] + lr[1]) / 2 - centre), lr[0]))


def find_destination(binary, cfg: DestinationConfig = DestinationConfig(), workers: int = 1) -> Destination | None:
    """Farthest row up to which every row below is at least ``alpha * w`` wide.

    Returns:
        The destination pixel, or ``None`` when even the bottom row is too
        narrow; the caller treats ``None`` as a request to rotate and rescan.
    """
    binary = as_grid(binary)
    h, w = binary.shape
    threshold = cfg.alpha * w
    if workers > 1:
        breadths = np.array([scan.breadth for scan in scan_rows(binary, workers)])
    else:
        breadths = row_breadths(binary)
    ok = breadths >= threshold
    if not ok[-1]:
        return None
    failing = np.flatnonzero(~ok)
    g_r = int(failing[-1]) + 1 if failing.size else 0
    l, r = _pick_interval(_row_intervals(binary[g_r]), w)
    return Destination(row=g_r, col=(l + r) // 2)
