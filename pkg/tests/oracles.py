"""Slow, direct reference implementations used only as test oracles.

Each one follows the textbook definition and shares no code with the package.
"""

import math
from collections import deque

import numpy as np


def brute_erode(img, size):
    """Pure-Python set erosion of the 1-set with a square element and replicated borders."""
    h, w = len(img), len(img[0])
    r = size // 2
    out = [[0] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            v = 1
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    yy = min(max(y + dy, 0), h - 1)
                    xx = min(max(x + dx, 0), w - 1)
                    if not img[yy][xx]:
                        v = 0
            out[y][x] = v
    return out


def brute_dilate(img, size):
    h, w = len(img), len(img[0])
    r = size // 2
    out = [[0] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            v = 0
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    yy = min(max(y + dy, 0), h - 1)
                    xx = min(max(x + dx, 0), w - 1)
                    if img[yy][xx]:
                        v = 1
            out[y][x] = v
    return out


def shift_erode(img, size):
    """Erosion as the AND of every replicated-border shift in the element (vectorised)."""
    img = np.asarray(img, dtype=bool)
    h, w = img.shape
    r = size // 2
    out = np.ones_like(img)
    rows, cols = np.arange(h), np.arange(w)
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            out &= img[np.clip(rows + dy, 0, h - 1)][:, np.clip(cols + dx, 0, w - 1)]
    return out.astype(np.uint8)


def shift_dilate(img, size):
    img = np.asarray(img, dtype=bool)
    h, w = img.shape
    r = size // 2
    out = np.zeros_like(img)
    rows, cols = np.arange(h), np.arange(w)
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            out |= img[np.clip(rows + dy, 0, h - 1)][:, np.clip(cols + dx, 0, w - 1)]
    return out.astype(np.uint8)


def bfs_components(mask, eight=True):
    """Connected components of truthy pixels as lists of (row, col), in raster order of first pixel."""
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    seen = np.zeros_like(mask)
    steps = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    if eight:
        steps += [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    comps = []
    for r in range(h):
        for c in range(w):
            if mask[r, c] and not seen[r, c]:
                seen[r, c] = True
                queue = deque([(r, c)])
                comp = []
                while queue:
                    y, x = queue.popleft()
                    comp.append((y, x))
                    for dy, dx in steps:
                        yy, xx = y + dy, x + dx
                        if 0 <= yy < h and 0 <= xx < w and mask[yy, xx] and not seen[yy, xx]:
                            seen[yy, xx] = True
                            queue.append((yy, xx))
                comps.append(comp)
    return comps


def border_flood_outside(mask):
    """Non-mask pixels reachable from the border through non-mask pixels (4-connected)."""
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    outside = np.zeros_like(mask)
    queue = deque()
    for r in range(h):
        for c in range(w):
            if (r in (0, h - 1) or c in (0, w - 1)) and not mask[r, c]:
                outside[r, c] = True
                queue.append((r, c))
    while queue:
        y, x = queue.popleft()
        for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            yy, xx = y + dy, x + dx
            if 0 <= yy < h and 0 <= xx < w and not mask[yy, xx] and not outside[yy, xx]:
                outside[yy, xx] = True
                queue.append((yy, xx))
    return outside


def runs(row):
    out, start = [], None
    for i, v in enumerate(list(row) + [0]):
        if v and start is None:
            start = i
        elif not v and start is not None:
            out.append((start, i - 1))
            start = None
    return out


def brute_destination(binary, alpha):
    """Test every candidate row independently against the breadth rule."""
    binary = np.asarray(binary)
    h, w = binary.shape
    T = alpha * w
    breadth = []
    for i in range(h):
        rr = runs(binary[i].tolist())
        breadth.append(max((r - l for l, r in rr), default=0))
    candidates = [r for r in range(h) if all(breadth[i] >= T for i in range(r, h))]
    if not candidates:
        return None
    g_r = min(candidates)
    rr = runs(binary[g_r].tolist())
    widest = max(r - l for l, r in rr)
    centre = (w - 1) / 2
    best = min((lr for lr in rr if lr[1] - lr[0] == widest), key=lambda lr: (abs((lr[0] + lr[1]) / 2 - centre), lr[0]))
    return g_r, (best[0] + best[1]) // 2


def kernel_sum_bilinear(grid, x, y):
    """sum_i max(0, 1-|i_x-x|) * max(0, 1-|i_y-y|) * f(i) over every grid node."""
    total = 0.0
    for r in range(len(grid)):
        for c in range(len(grid[0])):
            total += max(0.0, 1 - abs(c - x)) * max(0.0, 1 - abs(r - y)) * grid[r][c]
    return total


def force_sum(robot, points, mu):
    """mu * sum (1/d^2) (sin theta, cos theta) via explicit angles."""
    lat, fwd = [], []
    for px, py in points:
        d = math.hypot(px - robot[0], robot[1] - py)
        theta = math.atan2(px - robot[0], robot[1] - py)
        lat.append(math.sin(theta) / d ** 2)
        fwd.append(math.cos(theta) / d ** 2)
    return mu * math.fsum(lat), mu * math.fsum(fwd)


def hausdorff_loops(a, b):
    def directed(p, q):
        return max(min(math.dist(u, v) for v in q) for u in p)

    return max(directed(a, b), directed(b, a))


def brute_convolve(img, kernel):
    """Direct 2-D convolution with replicated borders (single channel)."""
    img = np.asarray(img, dtype=float)
    k = np.asarray(kernel, dtype=float)
    h, w = img.shape
    kh, kw = k.shape
    ry, rx = kh // 2, kw // 2
    out = np.zeros_like(img)
    for y in range(h):
        for x in range(w):
            s = 0.0
            for i in range(-ry, ry + 1):
                for j in range(-rx, rx + 1):
                    yy = min(max(y - i, 0), h - 1)
                    xx = min(max(x - j, 0), w - 1)
                    s += k[i + ry, j + rx] * img[yy, xx]
            out[y, x] = s
    return out
