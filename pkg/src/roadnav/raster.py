"""Dense grids, bilinear sampling and the binary file formats used across the package.

Conventions shared by every module:

* a grid is a 2-D ``numpy`` array indexed ``[row, col]``, row 0 at the top;
* ``x`` is the column coordinate and ``y`` the row coordinate;
* a feature tensor is a ``(channels, height, width)`` float array;
* a flow field is a ``(height, width, 2)`` float array holding ``(dx, dy)``.
"""

from __future__ import annotations

import struct

import numpy as np

FLO_MAGIC = 202021.25
FTEN_MAGIC = b"FTEN"
PNM_MAXVAL = 255


class FormatError(ValueError):
    """Malformed or unsupported file payload.

    Attributes:
        offset: byte offset at which parsing failed.
    """

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


# ---------------------------------------------------------------------------
# validation helpers


def as_grid(values, dtype=None) -> np.ndarray:
    grid = np.asarray(values, dtype=dtype)
    if grid.ndim != 2 or grid.shape[0] < 1 or grid.shape[1] < 1:
        raise ValueError(f"grid must be 2-D and non-empty, got shape {grid.shape}")
    return grid


def as_tensor(values) -> np.ndarray:
    """Coerce to a finite ``(C, H, W)`` float64 tensor; 2-D input gains a channel axis."""
    tensor = np.asarray(values, dtype=np.float64)
    if tensor.ndim == 2:
        tensor = tensor[np.newaxis]
    if tensor.ndim != 3 or min(tensor.shape) < 1:
        raise ValueError(f"feature tensor must be (C, H, W), got shape {tensor.shape}")
    if not np.all(np.isfinite(tensor)):
        raise ValueError("feature tensor contains non-finite values")
    return tensor


def as_flow(values) -> np.ndarray:
    flow = np.asarray(values, dtype=np.float64)
    if flow.ndim != 3 or flow.shape[2] != 2 or flow.shape[0] < 1 or flow.shape[1] < 1:
        raise ValueError(f"flow field must be (H, W, 2), got shape {flow.shape}")
    if not np.all(np.isfinite(flow)):
        raise ValueError("flow field contains non-finite values")
    return flow


# ---------------------------------------------------------------------------
# sampling


def bilinear_sample_many(tensor: np.ndarray, xs, ys) -> np.ndarray:
    """Bilinearly sample every channel of ``tensor`` at the points ``(xs, ys)``.

    Neighbours that fall outside the grid contribute zero, so a point whose four
    neighbours are all outside samples to 0.

    Args:
        tensor: ``(C, H, W)`` array.
        xs: column coordinates, any shape.
        ys: row coordinates, same shape as ``xs``.

    Returns:
        Array of shape ``(C,) + xs.shape``.
    """
    tensor = np.asarray(tensor, dtype=np.float64)
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    _, h, w = tensor.shape
    x0 = np.floor(xs)
    y0 = np.floor(ys)
    fx = xs - x0
    fy = ys - y0
    x0 = x0.astype(np.int64)
    y0 = y0.astype(np.int64)

    out = np.zeros((tensor.shape[0],) + xs.shape, dtype=np.float64)
    corners = (
        (y0, x0, (1.0 - fx) * (1.0 - fy)),
        (y0, x0 + 1, fx * (1.0 - fy)),
        (y0 + 1, x0, (1.0 - fx) * fy),
        (y0 + 1, x0 + 1, fx * fy),
    )
    for rows, cols, weight in corners:
        valid = (rows >= 0) & (rows < h) & (cols >= 0) & (cols < w)
        values = tensor[:, np.clip(rows, 0, h - 1), np.clip(cols, 0, w - 1)]
        out += np.where(valid, weight, 0.0) * np.where(valid, values, 0.0)
    return out


def bilinear_sample(tensor, channel: int, x: float, y: float) -> float:
    """Sample one channel of a feature tensor at a real-valued position."""
    tensor = as_tensor(tensor)
    if not 0 <= channel < tensor.shape[0]:
        raise IndexError(f"channel {channel} out of range for {tensor.shape[0]} channels")
    return float(bilinear_sample_many(tensor[channel : channel + 1], x, y)[0])


def _resize_axis(values: np.ndarray, new_len: int, axis: int) -> np.ndarray:
    # half-pixel centre alignment, edge-clamped
    old_len = values.shape[axis]
    src = (np.arange(new_len, dtype=np.float64) + 0.5) * (old_len / new_len) - 0.5
    src = np.clip(src, 0.0, old_len - 1)
    lo = np.floor(src).astype(np.int64)
    hi = np.minimum(lo + 1, old_len - 1)
    frac = src - lo
    shape = [1] * values.ndim
    shape[axis] = new_len
    frac = frac.reshape(shape)
    return np.take(values, lo, axis=axis) * (1.0 - frac) + np.take(values, hi, axis=axis) * frac


def resize_flow(flow, new_w: int, new_h: int) -> np.ndarray:
    """Bilinearly resize a flow field and rescale its vectors to the new pixel units."""
    flow = as_flow(flow)
    if new_w < 1 or new_h < 1:
        raise ValueError("target size must be at least 1x1")
    old_h, old_w = flow.shape[:2]
    if (old_w, old_h) == (new_w, new_h):
        return flow.copy()
    out = _resize_axis(_resize_axis(flow, new_h, 0), new_w, 1)
    out[..., 0] *= new_w / old_w
    out[..., 1] *= new_h / old_h
    return out


# ---------------------------------------------------------------------------
# netpbm


def _pnm_tokens(data: bytes, count: int, start: int):
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments."""
    tokens = []
    pos = start
    n = len(data)
    while len(tokens) < count:
        while pos < n and (data[pos : pos + 1].isspace() or data[pos : pos + 1] == b"#"):
            if data[pos : pos + 1] == b"#":
                while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            else:
                pos += 1
        if pos >= n:
            raise FormatError("truncated header", pos)
        begin = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        token = data[begin:pos]
        if not token.isdigit():
            raise FormatError(f"bad header field {token!r}", begin)
        tokens.append(int(token))
    if pos >= n or not data[pos : pos + 1].isspace():
        raise FormatError("header must end with a single whitespace byte", pos)
    return tokens, pos + 1


def read_pnm(data: bytes) -> np.ndarray:
    """Decode a binary PGM (P5) or PPM (P6) with maxval <= 255.

    Returns:
        ``uint8`` array shaped ``(H, W)`` for P5 or ``(H, W, 3)`` for P6.
    """
    magic = data[:2]
    if magic in (b"P1", b"P2", b"P3", b"P4", b"P7"):
        raise FormatError(f"unsupported variant {magic.decode()}", 0)
    if magic not in (b"P5", b"P6"):
        raise FormatError("not a netpbm file", 0)
    (width, height, maxval), pos = _pnm_tokens(data, 3, 2)
    if width < 1 or height < 1:
        raise FormatError("image dimensions must be positive", 2)
    if not 1 <= maxval <= PNM_MAXVAL:
        raise FormatError(f"unsupported maxval {maxval}", pos - 1)
    channels = 3 if magic == b"P6" else 1
    size = width * height * channels
    if len(data) - pos < size:
        raise FormatError(f"truncated payload: need {size} bytes, have {len(data) - pos}", len(data))
    pixels = np.frombuffer(data, dtype=np.uint8, count=size, offset=pos)
    shape = (height, width, 3) if channels == 3 else (height, width)
    return pixels.reshape(shape).copy()


def read_pgm(data: bytes) -> np.ndarray:
    image = read_pnm(data)
    if image.ndim != 2:
        raise FormatError("unsupported variant P6 where P5 expected", 0)
    return image


def write_pgm(grid) -> bytes:
    """Encode a grid as canonical P5 (``P5\\n<w> <h>\\n255\\n`` + payload)."""
    grid = as_grid(grid)
    if grid.min() < 0 or grid.max() > PNM_MAXVAL:
        raise ValueError("PGM values must lie in [0, 255]")
    h, w = grid.shape
    return b"P5\n%d %d\n255\n" % (w, h) + grid.astype(np.uint8).tobytes()


def read_ppm(data: bytes) -> np.ndarray:
    image = read_pnm(data)
    if image.ndim != 3:
        raise FormatError("unsupported variant P5 where P6 expected", 0)
    return image


def write_ppm(rgb) -> bytes:
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"PPM image must be (H, W, 3), got {rgb.shape}")
    h, w = rgb.shape[:2]
    return b"P6\n%d %d\n255\n" % (w, h) + rgb.astype(np.uint8).tobytes()


# ---------------------------------------------------------------------------
# optical flow (.flo)


def read_flo(data: bytes) -> np.ndarray:
    """Decode a Middlebury ``.flo`` stream into an ``(H, W, 2)`` float32 array."""
    if len(data) < 12:
        raise FormatError("truncated flow header", len(data))
    (magic,) = struct.unpack_from("<f", data, 0)
    if magic != FLO_MAGIC:
        raise FormatError("not a flow file", 0)
    width, height = struct.unpack_from("<ii", data, 4)
    if width < 1 or height < 1:
        raise FormatError(f"invalid flow dimensions {width}x{height}", 4)
    need = 12 + 8 * width * height
    if len(data) != need:
        raise FormatError(f"flow payload size mismatch: header implies {need} bytes, got {len(data)}", min(len(data), need))
    payload = np.frombuffer(data, dtype="<f4", count=2 * width * height, offset=12)
    return payload.reshape(height, width, 2).astype(np.float32)


def write_flo(flow) -> bytes:
    flow = as_flow(flow)
    h, w = flow.shape[:2]
    return struct.pack("<fii", FLO_MAGIC, w, h) + flow.astype("<f4").tobytes()


# ---------------------------------------------------------------------------
# feature tensor dump


def read_ften(data: bytes) -> np.ndarray:
    """Decode a ``FTEN`` dump: magic, ``<C H W`` as uint32, float32 payload channel-major."""
    if data[:4] != FTEN_MAGIC:
        raise FormatError("not a feature tensor file", 0)
    if len(data) < 16:
        raise FormatError("truncated tensor header", len(data))
    c, h, w = struct.unpack_from("<III", data, 4)
    if min(c, h, w) < 1:
        raise FormatError(f"invalid tensor dimensions {c}x{h}x{w}", 4)
    need = 16 + 4 * c * h * w
    if len(data) != need:
        raise FormatError(f"tensor payload size mismatch: header implies {need} bytes, got {len(data)}", min(len(data), need))
    payload = np.frombuffer(data, dtype="<f4", count=c * h * w, offset=16)
    return payload.reshape(c, h, w).astype(np.float32)


def write_ften(tensor) -> bytes:
    tensor = as_tensor(tensor)
    c, h, w = tensor.shape
    return FTEN_MAGIC + struct.pack("<III", c, h, w) + tensor.astype("<f4").tobytes()
