"""Backward warping of pre-frame feature maps into the current frame."""

from __future__ import annotations

import numpy as np

from .raster import as_flow, as_tensor, bilinear_sample_many


def _scale_grid(scale, shape) -> np.ndarray:
    if scale is None:
        return np.ones(shape)
    scale = np.asarray(scale, dtype=np.float64)
    if scale.shape != shape:
        raise ValueError(f"scale grid shape {scale.shape} does not match {shape}")
    if not np.all(np.isfinite(scale)) or np.any(scale < 0):
        raise ValueError("scale grid must be finite and non-negative")
    return scale


def propagate_feature(f_p, flow, scale=None) -> np.ndarray:
    """Propagate pre-frame features to the current frame.

    Each current-frame pixel ``x`` reads the pre-frame tensor bilinearly at
    ``x + flow(x)`` (zero outside the grid) and multiplies by ``scale(x)``.

    Args:
        f_p: ``(C, H, W)`` pre-frame feature tensor.
        flow: ``(H, W, 2)`` current-to-pre-frame displacements ``(dx, dy)``;
            resize it with :func:`roadnav.raster.resize_flow` first if the
            feature map has a different resolution.
        scale: optional ``(H, W)`` non-negative multipliers, default all ones.
    """
    f_p = as_tensor(f_p)
    flow = as_flow(flow)
    h, w = f_p.shape[1:]
    if flow.shape[:2] != (h, w):
        raise ValueError(f"flow shape {flow.shape[:2]} does not match feature shape {(h, w)}")
    scale = _scale_grid(scale, (h, w))
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    warped = bilinear_sample_many(f_p, xs + flow[..., 0], ys + flow[..., 1])
    return warped * scale[np.newaxis]


def propagation_residual(f_c_observed, f_p, flow, scale=None) -> float:
    """Mean absolute difference between observed and propagated current features."""
    observed = as_tensor(f_c_observed)
    predicted = propagate_feature(f_p, flow, scale)
    if observed.shape != predicted.shape:
        raise ValueError(f"observed shape {observed.shape} does not match {predicted.shape}")
    return float(np.mean(np.abs(observed - predicted)))
