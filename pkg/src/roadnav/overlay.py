"""RGB overlay of a processed frame, written as binary PPM.

Colours (RGB): road contour green, obstacle boxes red, destination a pink
disc, planned positions blue discs; the ``Proceed`` waypoints are drawn larger
than the rest of the plan.
"""

from __future__ import annotations

import numpy as np

from .apf import Proceed
from .morphology import connected_components
from .pipeline import FrameResult

ROAD_GREY = (200, 200, 200)
OBSTACLE_GREY = (40, 40, 40)
CONTOUR_GREEN = (0, 255, 0)
BOX_RED = (255, 0, 0)
DEST_PINK = (255, 105, 180)
PATH_BLUE = (0, 0, 255)

DEST_RADIUS = 6
WAYPOINT_RADIUS = 4
PATH_RADIUS = 2


def _disc(img: np.ndarray, x: float, y: float, radius: int, colour):
    h, w = img.shape[:2]
    cx, cy = int(np.floor(x + 0.5)), int(np.floor(y + 0.5))
    r0, r1 = max(cy - radius, 0), min(cy + radius + 1, h)
    c0, c1 = max(cx - radius, 0), min(cx + radius + 1, w)
    if r0 >= r1 or c0 >= c1:
        return
    rows, cols = np.ogrid[r0:r1, c0:c1]
    inside = (rows - cy) ** 2 + (cols - cx) ** 2 <= radius * radius
    img[r0:r1, c0:c1][inside] = colour


def _contour(mask: np.ndarray) -> np.ndarray:
    # mask pixels with a 4-neighbour outside the mask; image borders don't count
    m = mask.astype(bool)
    padded = np.pad(m, 1, mode="edge")
    interior = padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    return m & ~interior


def render_overlay(result: FrameResult) -> np.ndarray:
    smoothed = result.smoothed > 0
    img = np.empty(smoothed.shape + (3,), dtype=np.uint8)
    img[smoothed] = ROAD_GREY
    img[~smoothed] = OBSTACLE_GREY

    if result.roi is not None:
        roi = result.roi > 0
        img[_contour(roi)] = CONTOUR_GREEN
        for obstacle in connected_components(result.smoothed):
            # only obstacles lying mostly on the road region get a box
            if 2 * np.count_nonzero(roi[obstacle.rows, obstacle.cols]) < obstacle.size:
                continue
            x0, y0, x1, y1 = obstacle.bbox
            img[y0, x0 : x1 + 1] = BOX_RED
            img[y1, x0 : x1 + 1] = BOX_RED
            img[y0 : y1 + 1, x0] = BOX_RED
            img[y0 : y1 + 1, x1] = BOX_RED

    if result.path is not None:
        for x, y in result.path.positions:
            _disc(img, x, y, PATH_RADIUS, PATH_BLUE)
    if isinstance(result.directive, Proceed):
        for x, y in result.directive.waypoints:
            _disc(img, x, y, WAYPOINT_RADIUS, PATH_BLUE)
    if result.destination is not None:
        _disc(img, result.destination.col, result.destination.row, DEST_RADIUS, DEST_PINK)
    return img
