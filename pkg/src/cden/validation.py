"""Input validation helpers shared by the estimators and the functional API."""

import numpy as np

from .exceptions import InvalidInputError

PROBABILITY_ATOL = 1e-9


def check_rgb_image(image):
    """Return ``image`` as a ``(H, W, 3)`` uint8 array.

    Grayscale ``(H, W)`` input is broadcast to three channels. Integer input
    outside ``[0, 255]`` is rejected rather than clipped.
    """
    arr = np.asarray(image)
    if arr.ndim == 2:
        arr = np.repeat(arr[:, :, None], 3, axis=2)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise InvalidInputError(f"expected an (H, W, 3) RGB array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"image has a zero dimension: {arr.shape[:2]}")
    if arr.dtype == np.uint8:
        return arr
    if not np.issubdtype(arr.dtype, np.integer):
        raise InvalidInputError(f"RGB channels must be integers, got dtype {arr.dtype}")
    if arr.min() < 0 or arr.max() > 255:
        raise InvalidInputError("RGB channel values must lie in [0, 255]")
    return arr.astype(np.uint8)


def check_bin_map(bin_map, n_bins=None):
    arr = np.asarray(bin_map)
    if arr.ndim != 2:
        raise InvalidInputError(f"a bin map must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidInputError("bin map is empty")
    if not np.issubdtype(arr.dtype, np.integer):
        raise InvalidInputError(f"bin indices must be integers, got dtype {arr.dtype}")
    if arr.min() < 0 or (n_bins is not None and arr.max() >= n_bins):
        raise InvalidInputError(f"bin indices must lie in [0, {n_bins})")
    return arr.astype(np.intp, copy=False)


def check_probability_vector(p):
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError("a probability vector must be 1-D and non-empty")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise InvalidInputError("probabilities must be finite and non-negative")
    total = float(np.sum(arr))
    if abs(total - 1.0) > PROBABILITY_ATOL:
        raise InvalidInputError(f"probabilities sum to {total!r}, not 1")
    return arr


def check_bin_index(bin_index, n_bins):
    if not 0 <= int(bin_index) < n_bins:
        raise InvalidInputError(f"bin index {bin_index} outside [0, {n_bins})")
    return int(bin_index)
