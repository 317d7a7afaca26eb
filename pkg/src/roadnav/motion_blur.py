"""Linear motion-blur kernels for training-time augmentation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .raster import as_tensor

TRAINING_KERNEL_SIZES = (3, 5, 7)


@dataclass(frozen=True)
class BlurSpec:
    """Motion extent ``length`` (odd, pixels) and direction ``theta`` in degrees.

    ``theta = 0`` is horizontal motion and angles grow counter-clockwise with the
    image y axis pointing up, so ``theta = 45`` smears toward the upper right.
    """

    length: int
    theta: float = 0.0

    def __post_init__(self):
        if self.length < 1 or self.length % 2 == 0:
            raise ValueError(f"kernel length must be odd and >= 1, got {self.length}")


def _round_half_away(v: float) -> int:
    return int(math.copysign(math.floor(abs(v) + 0.5), v))


def psf_kernel(spec: BlurSpec) -> np.ndarray:
    """Rasterise a centred motion segment into a normalised ``length x length`` kernel.

    Cells are stepped along the dominant axis of the motion direction and the
    other coordinate is rounded, so vertical motion needs no special case.
    Only cells whose line position lies within ``length / 2`` of the centre are
    kept; each gets weight ``1 / count``.
    """
    size = spec.length
    half = size // 2
    kernel = np.zeros((size, size), dtype=np.float64)
    # depends on the direction modulo 180 only, so opposite angles match exactly
    rad = math.radians(spec.theta % 180.0)
    c, s = math.cos(rad), math.sin(rad)
    steps = min(math.floor(size / 2 * max(abs(c), abs(s)) + 1e-9), half)
    cells = []
    for k in range(-steps, steps + 1):
        if abs(c) >= abs(s):
            dx, dy = k, _round_half_away(k * s / c)
        else:
            dx, dy = _round_half_away(k * c / s), k
        cells.append((half - dy, half + dx))
    for row, col in cells:
        kernel[row, col] = 1.0
    return kernel / kernel.sum()


def apply_blur(image, kernel) -> np.ndarray:
    """Convolve each channel with ``kernel`` using replicated borders.

    Args:
        image: ``(C, H, W)`` tensor or ``(H, W)`` grid.
        kernel: odd-sized, non-negative, normalised 2-D kernel.

    Returns:
        Float tensor with the same shape as ``image``.
    """
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim != 2 or kernel.shape[0] % 2 == 0 or kernel.shape[1] % 2 == 0:
        raise ValueError(f"kernel must be 2-D with odd sides, got {kernel.shape}")
    flat = np.asarray(image).ndim == 2
    tensor = as_tensor(image)
    # convolution reads image[y - i, x - j]; min/max filters correlate, hence the flip
    footprint = kernel[::-1, ::-1] > 0
    out = np.empty_like(tensor)
    for ch in range(tensor.shape[0]):
        blurred = ndimage.convolve(tensor[ch], kernel, mode="nearest")
        # a convex combination stays inside its support's range; clip round-off
        lo = ndimage.minimum_filter(tensor[ch], footprint=footprint, mode="nearest")
        hi = ndimage.maximum_filter(tensor[ch], footprint=footprint, mode="nearest")
        out[ch] = np.clip(blurred, lo, hi)
    return out[0] if flat else out


def random_spec(seed) -> BlurSpec:
    """Draw a training blur: length from {3, 5, 7}, angle uniform in (-180, 180]."""
    rng = np.random.default_rng(seed)
    length = int(rng.choice(TRAINING_KERNEL_SIZES))
    theta = 180.0 - float(rng.uniform(0.0, 360.0))
    return BlurSpec(length, theta)


def random_blur(image, seed) -> np.ndarray:
    return apply_blur(image, psf_kernel(random_spec(seed)))
