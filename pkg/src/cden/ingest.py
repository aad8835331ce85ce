"""Image decoding, canonical resizing and HSV color quantization."""

import io
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from PIL import Image, UnidentifiedImageError

from .exceptions import DecodeError, InvalidInputError
from .validation import check_rgb_image

CANONICAL_SIZE = 128


class HsvColor(NamedTuple):
    hue: float  # degrees, [0, 360)
    saturation: float
    value: float


@dataclass(frozen=True)
class QuantizationConfig:
    """Uniform HSV quantization grid.

    The default 8 x 2 x 2 grid yields 32 bins laid out as
    ``bin = (h_q * saturation_levels + s_q) * value_levels + v_q``.
    """

    hue_levels: int = 8
    saturation_levels: int = 2
    value_levels: int = 2

    def __post_init__(self):
        for name in ("hue_levels", "saturation_levels", "value_levels"):
            if getattr(self, name) < 1:
                raise InvalidInputError(f"{name} must be >= 1")

    @property
    def total_bins(self):
        return self.hue_levels * self.saturation_levels * self.value_levels


DEFAULT_QUANTIZATION = QuantizationConfig()


def _axis_weights(n_in, n_out):
    """Resampling matrix of shape ``(n_out, n_in)`` for one image axis.

    Shrinking uses exact area overlap (box filter); enlarging picks the
    nearest source sample so no new colors are introduced.
    """
    weights = np.zeros((n_out, n_in))
    if n_out > n_in:
        src = np.floor((np.arange(n_out) + 0.5) * n_in / n_out).astype(int)
        weights[np.arange(n_out), np.minimum(src, n_in - 1)] = 1.0
        return weights
    scale = n_in / n_out
    for k in range(n_out):
        lo, hi = k * scale, (k + 1) * scale
        for j in range(int(np.floor(lo)), min(int(np.ceil(hi)), n_in)):
            overlap = min(hi, j + 1) - max(lo, j)
            if overlap > 0:
                weights[k, j] = overlap
        weights[k] /= weights[k].sum()
    return weights


def resize_canonical(image, size=CANONICAL_SIZE):
    """Resize an RGB array to ``size x size``, discarding the aspect ratio."""
    rgb = check_rgb_image(image)
    h, w = rgb.shape[:2]
    if (h, w) == (size, size):
        return rgb.copy()
    rows = _axis_weights(h, size)
    cols = _axis_weights(w, size)
    out = np.tensordot(rows, rgb.astype(float), axes=(1, 0))  # (size, w, 3)
    out = np.tensordot(out, cols, axes=(1, 1)).transpose(0, 2, 1)
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def decode_image(raw):
    try:
        with Image.open(io.BytesIO(raw)) as img:
            img.load()
            if img.width < 1 or img.height < 1:
                raise InvalidInputError("image has a zero dimension")
            return np.asarray(img.convert("RGB"))
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise DecodeError(f"cannot decode image: {exc}") from exc


def decode_and_resize(raw, size=CANONICAL_SIZE):
    """Decode PNG/JPEG bytes into a canonical ``size x size`` RGB array."""
    return resize_canonical(decode_image(raw), size)


def load_image(path, size=CANONICAL_SIZE):
    return decode_and_resize(Path(path).read_bytes(), size)


def rgb_to_hsv_array(rgb):
    """Vectorized hexcone RGB -> HSV.

    Returns an array of shape ``rgb.shape`` with hue in degrees ``[0, 360)``
    and saturation/value in ``[0, 1]``. Achromatic pixels get hue 0.
    """
    rgb = np.asarray(rgb, dtype=float) / 255.0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    cmax = rgb.max(axis=-1)
    cmin = rgb.min(axis=-1)
    delta = cmax - cmin
    chroma = delta > 0
    safe = np.where(chroma, delta, 1.0)

    hue = np.zeros_like(cmax)
    is_r = chroma & (cmax == r)
    is_g = chroma & (cmax == g) & ~is_r
    is_b = chroma & ~is_r & ~is_g
    hue[is_r] = np.mod((g - b)[is_r] / safe[is_r], 6.0)
    hue[is_g] = (b - r)[is_g] / safe[is_g] + 2.0
    hue[is_b] = (r - g)[is_b] / safe[is_b] + 4.0
    hue = np.mod(hue * 60.0, 360.0)

    sat = np.where(cmax > 0, delta / np.where(cmax > 0, cmax, 1.0), 0.0)
    return np.stack([hue, sat, cmax], axis=-1)


def rgb_to_hsv(r, g, b):
    for channel in (r, g, b):
        if not 0 <= channel <= 255:
            raise InvalidInputError("RGB channels must lie in [0, 255]")
    hue, sat, val = rgb_to_hsv_array(np.array([r, g, b]))
    return HsvColor(float(hue), float(sat), float(val))


def hsv_to_bin_array(hsv, q=DEFAULT_QUANTIZATION):
    hsv = np.asarray(hsv, dtype=float)
    h_q = np.clip(np.floor(hsv[..., 0] * q.hue_levels / 360.0), 0, q.hue_levels - 1)
    s_q = np.clip(np.floor(hsv[..., 1] * q.saturation_levels), 0, q.saturation_levels - 1)
    v_q = np.clip(np.floor(hsv[..., 2] * q.value_levels), 0, q.value_levels - 1)
    bins = (h_q * q.saturation_levels + s_q) * q.value_levels + v_q
    return bins.astype(np.intp)


def hsv_to_bin(color, q=DEFAULT_QUANTIZATION):
    hue, sat, val = color
    if not (0 <= hue < 360 and 0 <= sat <= 1 and 0 <= val <= 1):
        raise InvalidInputError(f"HSV color out of range: {tuple(color)}")
    return int(hsv_to_bin_array(np.array([hue, sat, val]), q))


def quantize_image(image, q=DEFAULT_QUANTIZATION):
    """Map every pixel of an RGB array to its color-bin index."""
    return hsv_to_bin_array(rgb_to_hsv_array(check_rgb_image(image)), q)


def image_to_bin_map(raw, q=DEFAULT_QUANTIZATION, size=CANONICAL_SIZE):
    return quantize_image(decode_and_resize(raw, size), q)
