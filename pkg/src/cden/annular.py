"""Annular color histograms: per-bin centroid, radius and ring distribution.

Pixel coordinates are ``(row, col)`` cell indices. Ring ``j`` of ``n_rings``
holds the pixels whose distance ``d`` to the bin centroid satisfies
``(j - 1) * r / n < d <= j * r / n``; the centroid itself (``d == 0``)
belongs to ring 1.
"""

from typing import NamedTuple

import numpy as np

from .exceptions import EmptyBinError, InvalidInputError
from .validation import check_bin_map

# slack on ring boundaries so that rounding in the centroid never pushes a
# pixel lying exactly on a circle into the next ring
_RING_EPS = 1e-9


class BinGeometry(NamedTuple):
    bin: int
    centroid: tuple
    radius: float


def _bin_coords(bins, bin_index):
    coords = np.argwhere(bins == bin_index).astype(float)
    if coords.size == 0:
        raise EmptyBinError(f"bin {bin_index} has no pixels")
    return coords


def _distances(coords, centroid):
    return np.sqrt(((coords - np.asarray(centroid)) ** 2).sum(axis=1))


def bin_geometry(bin_map, bin_index):
    """Centroid (coordinate mean) and radius (max distance) of one bin."""
    bins = check_bin_map(bin_map)
    coords = _bin_coords(bins, bin_index)
    centroid = coords.mean(axis=0)
    radius = float(_distances(coords, centroid).max())
    return BinGeometry(int(bin_index), (float(centroid[0]), float(centroid[1])), radius)


def ring_counts(bin_map, geometry, n_rings):
    if n_rings < 1:
        raise InvalidInputError(f"number of circles must be >= 1, got {n_rings}")
    bins = check_bin_map(bin_map)
    coords = _bin_coords(bins, geometry.bin)
    if geometry.radius == 0:
        counts = np.zeros(n_rings, dtype=np.int64)
        counts[0] = len(coords)
        return counts
    scaled = _distances(coords, geometry.centroid) * n_rings / geometry.radius
    rings = np.clip(np.ceil(scaled - _RING_EPS), 1, n_rings).astype(np.int64)
    return np.bincount(rings - 1, minlength=n_rings)


def annular_distribution(bin_map, geometry, n_rings):
    """Fraction of the bin's pixels falling in each of ``n_rings`` rings."""
    counts = ring_counts(bin_map, geometry, n_rings)
    return counts / counts.sum()


def annular_histogram(bin_map, bin_index, n_rings):
    """Convenience wrapper computing the geometry and the ring distribution."""
    geometry = bin_geometry(bin_map, bin_index)
    return annular_distribution(bin_map, geometry, n_rings)
