"""Entropy-based color descriptors.

Four descriptor kinds are supported:

``HIST``
    the normalized color histogram alone;
``CDE``
    histogram plus the Shannon entropy of each bin's annular distribution;
``ICDE``
    histogram plus the position- and area-weighted entropy of the annular
    distribution;
``DCDEN``
    histogram plus the Shannon entropy of each bin's neighborhood-size
    distribution, and the number of neighborhoods per bin.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import annular
from .exceptions import EmptyCorpusError, InvalidInputError
from .neighborhoods import N_BINS, label_components, neighborhood_distribution
from .validation import check_bin_map, check_probability_vector


class DescriptorKind(str, enum.Enum):
    HIST = "HIST"
    CDE = "CDE"
    ICDE = "ICDE"
    DCDEN = "DCDEN"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            names = ", ".join(k.value.lower() for k in cls)
            raise InvalidInputError(f"unknown descriptor kind {value!r} (expected one of {names})") from None

    @property
    def uses_circles(self):
        return self in (DescriptorKind.CDE, DescriptorKind.ICDE)


@dataclass(eq=False)
class DescriptorRecord:
    """Descriptor of one image.

    Attributes
    ----------
    kind : DescriptorKind
    hist : ndarray of shape (n_bins,)
        Fraction of the image's pixels in each bin.
    entropy : ndarray of shape (n_bins,)
        Per-bin entropy; zero for empty bins and for ``HIST`` records.
    n_neighborhoods : ndarray of int, shape (n_bins,)
        Neighborhood count per bin; only populated for ``DCDEN``.
    """

    kind: DescriptorKind
    hist: np.ndarray
    entropy: np.ndarray
    n_neighborhoods: np.ndarray

    def __post_init__(self):
        self.kind = DescriptorKind.parse(self.kind)
        self.hist = np.asarray(self.hist, dtype=float)
        self.entropy = np.asarray(self.entropy, dtype=float)
        self.n_neighborhoods = np.asarray(self.n_neighborhoods, dtype=np.int64)
        n = self.hist.shape
        if len(n) != 1 or self.entropy.shape != n or self.n_neighborhoods.shape != n:
            raise InvalidInputError("hist, entropy and n_neighborhoods must be 1-D and of equal length")

    @property
    def n_bins(self):
        return len(self.hist)

    def to_vector(self):
        """Concatenate ``hist``, ``entropy`` and ``n_neighborhoods`` into one row."""
        return np.concatenate([self.hist, self.entropy, self.n_neighborhoods.astype(float)])

    @classmethod
    def from_vector(cls, vector, kind):
        vector = np.asarray(vector, dtype=float)
        if vector.ndim != 1 or len(vector) % 3:
            raise InvalidInputError("descriptor vector length must be a multiple of 3")
        n = len(vector) // 3
        return cls(kind, vector[:n], vector[n:2 * n], np.rint(vector[2 * n:]).astype(np.int64))

    def same_values(self, other, atol=0.0):
        return (
            self.kind == other.kind
            and np.allclose(self.hist, other.hist, rtol=0, atol=atol)
            and np.allclose(self.entropy, other.entropy, rtol=0, atol=atol)
            and np.array_equal(self.n_neighborhoods, other.n_neighborhoods)
        )


def shannon_entropy(p):
    """``-sum(p * log2(p))`` in bits, with ``0 * log2(0) = 0``."""
    p = check_probability_vector(p)
    nz = p[p > 0]
    value = math.fsum((-nz * np.log2(nz)).tolist())
    # exact bounds; fsum can land one ulp outside them
    return min(max(0.0, value), math.log2(len(p)))


def improved_entropy(p, n_rings=None):
    """Ring-position and histogram-area weighted entropy.

    With ``N = len(p)`` and 1-based ring index ``j``::

        A = sum_j j * p_j
        g = 1 + A / N
        f_j = 1 + j / N
        E = -g * sum_j f_j * p_j * log2(p_j)
    """
    p = check_probability_vector(p)
    n = len(p) if n_rings is None else int(n_rings)
    if n != len(p):
        raise InvalidInputError(f"distribution has {len(p)} rings, expected {n}")
    j = np.arange(1, n + 1, dtype=float)
    area = float(np.dot(p, j))
    g = 1.0 + area / n
    nz = p > 0
    terms = -(1.0 + j[nz] / n) * p[nz] * np.log2(p[nz])
    return max(0.0, g * math.fsum(terms.tolist()))


def extract_descriptor(bin_map, kind, n_circles=None, n_bins=N_BINS):
    """Compute the descriptor of a quantized image.

    ``n_circles`` is required for ``CDE``/``ICDE`` and ignored otherwise.
    """
    kind = DescriptorKind.parse(kind)
    bins = check_bin_map(bin_map, n_bins)
    if kind.uses_circles:
        if n_circles is None:
            raise InvalidInputError(f"{kind.value} descriptors need a circle count")
        n_circles = int(n_circles)
        if n_circles < 1:
            raise InvalidInputError(f"circle count must be >= 1, got {n_circles}")

    pixel_counts = np.bincount(bins.ravel(), minlength=n_bins)
    hist = pixel_counts / bins.size
    entropy = np.zeros(n_bins)
    nb = np.zeros(n_bins, dtype=np.int64)
    present = np.flatnonzero(pixel_counts)

    if kind is DescriptorKind.DCDEN:
        _, table = label_components(bins, n_bins)
        nb = table.counts
        for i in present:
            entropy[i] = shannon_entropy(neighborhood_distribution(table, i))
    elif kind.uses_circles:
        weigh = improved_entropy if kind is DescriptorKind.ICDE else shannon_entropy
        for i in present:
            probs = annular.annular_histogram(bins, i, n_circles)
            entropy[i] = weigh(probs)

    return DescriptorRecord(kind, hist, entropy, nb)


def mean_neighborhood_count(bin_map, n_bins=N_BINS):
    """Mean number of neighborhoods over the image's non-empty bins."""
    counts = label_components(bin_map, n_bins)[1].counts
    return float(counts[counts > 0].mean())


def circle_count_from_means(means):
    means = list(means)
    if not means:
        raise EmptyCorpusError("cannot choose a circle count for an empty corpus")
    average = math.fsum(means) / len(means)
    # round half up
    return max(1, int(math.floor(average + 0.5)))


def choose_circle_count(bin_maps, n_bins=N_BINS):
    """Corpus-wide ring count: the average per-image mean neighborhood count.

    Empty bins are left out of each image's mean. The average is rounded
    half up and clamped to at least 1.
    """
    return circle_count_from_means(mean_neighborhood_count(b, n_bins) for b in bin_maps)
