"""Morphological smoothing of binary road images and obstacle extraction.

Road (1) is the foreground set throughout: ``erode`` shrinks the road and
therefore grows obstacles, ``dilate`` does the opposite. Square structuring
elements are centred on their origin and image borders are replicated.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .raster import as_grid

EIGHT_CONNECTED = ndimage.generate_binary_structure(2, 2)


@dataclass(frozen=True)
class MorphConfig:
    """Element sizes as fractions of ``min(w, h)``: closing, erosion, dilation."""

    k1: float = 1 / 80
    k2: float = 1 / 48
    k3: float = 1 / 64

    def __post_init__(self):
        for name in ("k1", "k2", "k3"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {value}")


@dataclass(frozen=True, eq=False)
class Obstacle:
    rows: np.ndarray
    cols: np.ndarray

    @property
    def size(self) -> int:
        return int(self.rows.size)

    @property
    def centroid(self) -> tuple[float, float]:
        """Pixel-mean position as ``(x, y)``."""
        return float(self.cols.sum() / self.cols.size), float(self.rows.sum() / self.rows.size)

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        """Inclusive ``(x_min, y_min, x_max, y_max)``."""
        return int(self.cols.min()), int(self.rows.min()), int(self.cols.max()), int(self.rows.max())


def odd_size(x: float) -> int:
    """Closest odd integer to ``x`` (ties go up): ``2 * floor(x / 2 + 1) - 1``."""
    if x < 0:
        raise ValueError("x must be non-negative")
    return 2 * math.floor(x / 2 + 1) - 1


def element_size(k: float, w: int, h: int) -> int:
    if k <= 0:
        raise ValueError("k must be positive")
    span = k * min(w, h)
    size = odd_size(span)
    if span < 1:
        warnings.warn(
            f"structuring element {k}*{min(w, h)}={span:.3g} px is below one pixel; using 1",
            RuntimeWarning,
            stacklevel=2,
        )
        size = 1
    return size


def _check_size(size: int):
    if size < 1 or size % 2 == 0:
        raise ValueError(f"structuring element size must be odd and >= 1, got {size}")


def erode(binary, size: int) -> np.ndarray:
    _check_size(size)
    binary = as_grid(binary).astype(np.uint8)
    if size == 1:
        return binary.copy()
    return ndimage.minimum_filter(binary, size=size, mode="nearest")


def dilate(binary, size: int) -> np.ndarray:
    _check_size(size)
    binary = as_grid(binary).astype(np.uint8)
    if size == 1:
        return binary.copy()
    return ndimage.maximum_filter(binary, size=size, mode="nearest")


def close(binary, size: int) -> np.ndarray:
    return erode(dilate(binary, size), size)


def element_sizes(shape, cfg: MorphConfig) -> tuple[int, int, int]:
    h, w = shape
    return tuple(element_size(k, w, h) for k in (cfg.k1, cfg.k2, cfg.k3))


def smooth(binary, cfg: MorphConfig = MorphConfig()) -> np.ndarray:
    """Close the road set, then erode and dilate it.

    Closing removes obstacles narrower than the first element; the erosion /
    dilation pair merges nearby obstacles and leaves them grown by
    ``(a2 - a3) / 2`` pixels per edge as a robot-size margin.
    """
    binary = as_grid(binary)
    a1, a2, a3 = element_sizes(binary.shape, cfg)
    return dilate(erode(close(binary, a1), a2), a3)


def connected_components(binary) -> list[Obstacle]:
    """8-connected non-road components, ordered by their first pixel in raster order."""
    obstacle = as_grid(binary) == 0
    labels, count = ndimage.label(obstacle, structure=EIGHT_CONNECTED)
    if count == 0:
        return []
    flat = labels.ravel()
    index = np.flatnonzero(flat)
    order = np.argsort(flat[index], kind="stable")
    index = index[order]
    bounds = np.searchsorted(flat[index], np.arange(1, count + 2))
    w = labels.shape[1]
    out = []
    for i in range(count):
        pix = index[bounds[i] : bounds[i + 1]]
        out.append(Obstacle(rows=pix // w, cols=pix % w))
    return out
