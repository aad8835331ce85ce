"""Same-color neighborhood extraction by a single raster scan with merging.

The scan visits pixels row by row, left to right. A pixel is compared with
its already-visited west, north-west and north neighbors; if one of them
has the same color bin the pixel joins that neighborhood, and when several
matching neighbors carry different labels their neighborhoods are merged.
The resulting undirected adjacency is {E, W, N, S, NW, SE}; the NE/SW
diagonal does not connect pixels.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import EmptyBinError, InvalidInputError
from .validation import check_bin_index, check_bin_map

N_BINS = 32

# (row, col) offsets of the scan predecessors: west, north-west, north.
PREDECESSOR_OFFSETS = ((0, -1), (-1, -1), (-1, 0))


@dataclass(frozen=True)
class ComponentTable:
    """Per-bin neighborhood sizes.

    ``sizes[i]`` lists the pixel counts of the neighborhoods of bin ``i`` in
    order of first appearance during the scan.
    """

    sizes: tuple

    @property
    def n_bins(self):
        return len(self.sizes)

    @property
    def counts(self):
        """Number of neighborhoods per bin."""
        return np.array([len(s) for s in self.sizes], dtype=np.int64)

    @property
    def totals(self):
        """Number of pixels per bin."""
        return np.array([sum(s) for s in self.sizes], dtype=np.int64)


def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def label_components(bin_map, n_bins=N_BINS):
    """Label same-bin neighborhoods of ``bin_map``.

    Returns ``(labels, table)`` where ``labels`` is an integer array of the
    same shape holding canonical component ids (numbered 0, 1, ... in order
    of first appearance) and ``table`` is the :class:`ComponentTable`.
    """
    bins = check_bin_map(bin_map, n_bins)
    height, width = bins.shape
    rows = bins.tolist()
    provisional = [[0] * width for _ in range(height)]
    parent = []

    for r in range(height):
        row, lab = rows[r], provisional[r]
        up = rows[r - 1] if r else None
        up_lab = provisional[r - 1] if r else None
        for c in range(width):
            b = row[c]
            matches = []
            if c and row[c - 1] == b:
                matches.append(lab[c - 1])
            if r:
                if c and up[c - 1] == b:
                    matches.append(up_lab[c - 1])
                if up[c] == b:
                    matches.append(up_lab[c])
            if not matches:
                lab[c] = len(parent)
                parent.append(len(parent))
                continue
            roots = {_find(parent, m) for m in matches}
            # the oldest label survives, so roots stay in scan order
            root = min(roots)
            for other in roots:
                parent[other] = root
            lab[c] = root

    roots = np.array([_find(parent, x) for x in range(len(parent))], dtype=np.int64)
    labels = roots[np.array(provisional, dtype=np.int64)]
    labels = canonicalize_labels(labels)

    sizes = [[] for _ in range(n_bins)]
    comp_bin = np.empty(int(labels.max()) + 1, dtype=np.int64)
    flat_labels = labels.ravel()
    comp_bin[flat_labels] = bins.ravel()
    comp_size = np.bincount(flat_labels)
    for b, size in zip(comp_bin.tolist(), comp_size.tolist()):
        sizes[b].append(size)
    return labels, ComponentTable(tuple(tuple(s) for s in sizes))


def canonicalize_labels(labels):
    """Renumber labels 0, 1, ... in order of first appearance in scan order."""
    labels = np.asarray(labels)
    flat = labels.ravel()
    uniq, first = np.unique(flat, return_index=True)
    order = np.argsort(first, kind="stable")
    remap = np.empty(len(uniq), dtype=np.int64)
    remap[order] = np.arange(len(uniq))
    return remap[np.searchsorted(uniq, flat)].reshape(labels.shape)


def component_table(bin_map, n_bins=N_BINS):
    return label_components(bin_map, n_bins)[1]


def neighborhood_distribution(table, bin_index):
    """Fraction of bin ``bin_index``'s pixels in each of its neighborhoods."""
    bin_index = check_bin_index(bin_index, table.n_bins)
    sizes = np.asarray(table.sizes[bin_index], dtype=float)
    if sizes.size == 0:
        raise EmptyBinError(f"bin {bin_index} has no pixels")
    return sizes / sizes.sum()


def normalized_counts(table):
    """Neighborhood count of each bin divided by the total neighborhood count."""
    counts = table.counts
    total = counts.sum()
    if total == 0:
        raise InvalidInputError("component table has no neighborhoods")
    return counts / total
