"""Similarity and dissimilarity measures between descriptor records.

``legacy``
    sum over bins of ``min(h_q, h_t) * min(E_q, E_t) / max(E_q, E_t)``; a
    similarity in [0, 1], higher is closer.
``d1``
    ``2 - cos(h_q, h_t) - cos(E_q, E_t)``; a dissimilarity in [0, 2].
``d2``
    ``3 - cos(h_q, h_t) - cos(E_q, E_t) - cos(Nb_q, Nb_t)`` where ``Nb`` is
    the neighborhood count vector normalized to sum 1; in [0, 3].
"""

import enum
import math

import numpy as np

from .descriptors import DescriptorKind
from .exceptions import IncompatibleMetricError, InvalidInputError


class Metric(str, enum.Enum):
    LEGACY = "legacy"
    D1 = "d1"
    D2 = "d2"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidInputError(f"unknown metric {value!r} (expected legacy, d1 or d2)") from None

    @property
    def higher_is_closer(self):
        return self is Metric.LEGACY


# HIST records have all-zero entropies, so d1 reduces to 1 - cos(h_q, h_t).
COMPATIBLE_KINDS = {
    Metric.LEGACY: frozenset({DescriptorKind.CDE, DescriptorKind.ICDE}),
    Metric.D1: frozenset({DescriptorKind.CDE, DescriptorKind.ICDE, DescriptorKind.HIST}),
    Metric.D2: frozenset({DescriptorKind.DCDEN}),
}


def check_compatible(metric, kind):
    metric = Metric.parse(metric)
    kind = DescriptorKind.parse(kind)
    if kind not in COMPATIBLE_KINDS[metric]:
        allowed = "/".join(sorted(k.value for k in COMPATIBLE_KINDS[metric]))
        raise IncompatibleMetricError(
            f"metric {metric.value} cannot compare {kind.value} descriptors (needs {allowed})"
        )
    return metric


def _row_dots(u, rows):
    # one reduction path for every row, so equal rows give equal results
    return (rows * u).sum(axis=1)


def row_cosines(u, rows):
    """Cosine between ``u`` and every row of ``rows``.

    Rows equal to ``u`` (including two zero vectors) score exactly 1.0; a
    zero vector against a non-zero one scores 0.0.
    """
    dots = _row_dots(u, rows)
    norms = np.sqrt(_row_dots(rows, rows)) * math.sqrt(_row_dots(u[None, :], u[None, :])[0])
    out = np.divide(dots, norms, out=np.zeros_like(dots), where=norms > 0)
    out = np.clip(out, 0.0, 1.0)
    out[np.all(rows == u, axis=1)] = 1.0
    return out


def cosine(u, v):
    """Cosine of the angle between two non-negative vectors.

    Two zero vectors are identical (1.0); a zero vector against a non-zero
    one scores 0.0.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1:
        raise InvalidInputError(f"cosine needs two 1-D vectors of equal length, got {u.shape} and {v.shape}")
    if np.any(u < 0) or np.any(v < 0):
        raise InvalidInputError("cosine is only defined here for non-negative vectors")
    return float(row_cosines(u, v[None, :])[0])


def _normalized_counts(nb):
    nb = np.asarray(nb, dtype=float)
    totals = nb.sum(axis=-1, keepdims=True)
    return np.divide(nb, totals, out=np.zeros_like(nb), where=totals > 0)


def _check_pair(q, t, kinds):
    if q.kind != t.kind:
        raise IncompatibleMetricError(f"cannot compare a {q.kind.value} record with a {t.kind.value} record")
    if q.kind not in kinds:
        allowed = "/".join(sorted(k.value for k in kinds))
        raise IncompatibleMetricError(f"expected {allowed} records, got {q.kind.value}")
    if q.n_bins != t.n_bins:
        raise InvalidInputError(f"bin counts differ: {q.n_bins} vs {t.n_bins}")


class RecordMatrix:
    """Descriptor records stacked row-wise for batch comparisons."""

    def __init__(self, records):
        records = list(records)
        self.hist = np.vstack([r.hist for r in records])
        self.entropy = np.vstack([r.entropy for r in records])
        self.raw_counts = np.vstack([r.n_neighborhoods for r in records])
        self.counts = _normalized_counts(self.raw_counts)

    def __len__(self):
        return len(self.hist)

    def legacy(self, q):
        lo = np.minimum(self.entropy, q.entropy)
        hi = np.maximum(self.entropy, q.entropy)
        # equal zero entropies agree perfectly; a single zero does not
        ratio = np.divide(lo, hi, out=np.ones_like(lo), where=hi > 0)
        return np.minimum(_row_dots(ratio, np.minimum(self.hist, q.hist)), 1.0)

    def d1(self, q):
        return np.maximum(0.0, 2.0 - row_cosines(q.hist, self.hist) - row_cosines(q.entropy, self.entropy))

    def d2(self, q):
        cos_n = row_cosines(_normalized_counts(q.n_neighborhoods), self.counts)
        return np.maximum(0.0, 3.0 - row_cosines(q.hist, self.hist) - row_cosines(q.entropy, self.entropy) - cos_n)

    def score(self, q, metric):
        return getattr(self, Metric.parse(metric).value)(q)


def legacy_similarity(q, t):
    _check_pair(q, t, COMPATIBLE_KINDS[Metric.LEGACY])
    return float(RecordMatrix([t]).legacy(q)[0])


def dissimilarity_icde(q, t):
    _check_pair(q, t, COMPATIBLE_KINDS[Metric.D1])
    return float(RecordMatrix([t]).d1(q)[0])


def dissimilarity_dcden(q, t):
    _check_pair(q, t, COMPATIBLE_KINDS[Metric.D2])
    return float(RecordMatrix([t]).d2(q)[0])


_MEASURES = {
    Metric.LEGACY: legacy_similarity,
    Metric.D1: dissimilarity_icde,
    Metric.D2: dissimilarity_dcden,
}


def compare(q, t, metric):
    """Evaluate ``metric`` between two records."""
    return _MEASURES[Metric.parse(metric)](q, t)
