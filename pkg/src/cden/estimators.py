"""scikit-learn compatible wrappers.

:class:`ColorDescriptorExtractor` turns images into descriptor rows and
:class:`ImageRetriever` answers nearest-neighbor queries over those rows.
Both follow the usual ``fit``/``transform`` conventions, so they work with
``clone``, ``get_params`` and grid searches.

A descriptor row is ``[hist (32) | entropy (32) | n_neighborhoods (32)]``.
"""

from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .descriptors import DescriptorKind, DescriptorRecord, choose_circle_count, extract_descriptor
from .exceptions import InvalidInputError
from .ingest import CANONICAL_SIZE, DEFAULT_QUANTIZATION, decode_and_resize, quantize_image, resize_canonical
from .similarity import Metric, RecordMatrix, check_compatible
from .validation import check_bin_map

N_BINS = DEFAULT_QUANTIZATION.total_bins


def to_bin_map(image, size=CANONICAL_SIZE):
    """Coerce one input sample into a bin map.

    Accepts a path, raw PNG/JPEG bytes, an ``(H, W, 3)`` RGB array (resized
    and quantized) or a 2-D integer array, which is taken to be a bin map
    already and used unchanged.
    """
    if isinstance(image, (str, Path)):
        image = Path(image).read_bytes()
    if isinstance(image, (bytes, bytearray)):
        return quantize_image(decode_and_resize(bytes(image), size))
    arr = np.asarray(image)
    if arr.ndim == 2:
        return check_bin_map(arr, N_BINS)
    return quantize_image(resize_canonical(arr, size))


def _as_records(X, kind):
    if len(X) and isinstance(X[0], DescriptorRecord):
        return list(X)
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3 * N_BINS:
        raise InvalidInputError(f"expected descriptor rows of width {3 * N_BINS}, got shape {arr.shape}")
    return [DescriptorRecord.from_vector(row, kind) for row in arr]


class ColorDescriptorExtractor(TransformerMixin, BaseEstimator):
    """Compute spatial color descriptors for a collection of images.

    Parameters
    ----------
    kind : {"hist", "cde", "icde", "dcden"}, default="dcden"
    n_circles : "auto" or int, default="auto"
        Ring count for the annular descriptors. With ``"auto"`` it is
        derived from the training images during ``fit``.
    size : int, default=128
        Side of the square raster images are resized to.

    Attributes
    ----------
    n_circles_ : int or None
        Ring count used by ``transform`` (None for hist and dcden).
    """

    def __init__(self, kind="dcden", n_circles="auto", size=CANONICAL_SIZE):
        self.kind = kind
        self.n_circles = n_circles
        self.size = size

    def fit(self, X, y=None):
        kind = DescriptorKind.parse(self.kind)
        if kind.uses_circles and self.n_circles == "auto":
            bin_maps = [to_bin_map(x, self.size) for x in X]
            if not bin_maps:
                raise InvalidInputError("cannot fit on an empty collection")
            self.n_circles_ = choose_circle_count(bin_maps)
        elif kind.uses_circles:
            if int(self.n_circles) < 1:
                raise InvalidInputError(f"n_circles must be >= 1, got {self.n_circles}")
            self.n_circles_ = int(self.n_circles)
        else:
            self.n_circles_ = None
        self.kind_ = kind
        self.n_features_out_ = 3 * N_BINS
        return self

    def transform_records(self, X):
        check_is_fitted(self, "kind_")
        return [extract_descriptor(to_bin_map(x, self.size), self.kind_, self.n_circles_) for x in X]

    def transform(self, X):
        records = self.transform_records(X)
        if not records:
            return np.empty((0, self.n_features_out_))
        return np.vstack([r.to_vector() for r in records])

    def get_feature_names_out(self, input_features=None):
        return np.array(
            [f"hist{i}" for i in range(N_BINS)]
            + [f"entropy{i}" for i in range(N_BINS)]
            + [f"nb{i}" for i in range(N_BINS)],
            dtype=object,
        )


class ImageRetriever(BaseEstimator):
    """Exhaustive nearest-neighbor search over descriptor rows.

    Parameters
    ----------
    metric : {"d2", "d1", "legacy"}, default="d2"
        ``legacy`` is a similarity: neighbors come back in descending order
        and the returned "distances" are similarities.
    n_neighbors : int, default=10
    kind : str or None
        Descriptor kind of the rows. Defaults to dcden for d2 and icde
        otherwise; only used to check metric compatibility.
    """

    def __init__(self, metric="d2", n_neighbors=10, kind=None):
        self.metric = metric
        self.n_neighbors = n_neighbors
        self.kind = kind

    def _kind(self):
        if self.kind is not None:
            return DescriptorKind.parse(self.kind)
        return DescriptorKind.DCDEN if Metric.parse(self.metric) is Metric.D2 else DescriptorKind.ICDE

    def fit(self, X, y=None):
        kind = self._kind()
        self.metric_ = check_compatible(self.metric, kind)
        self.kind_ = kind
        records = _as_records(X, kind)
        if not records:
            raise InvalidInputError("cannot fit on an empty collection")
        self.matrix_ = RecordMatrix(records)
        self.n_samples_fit_ = len(records)
        return self

    def _rank(self, query, exclude=None):
        scores = self.matrix_.score(query, self.metric_)
        keys = -scores if self.metric_.higher_is_closer else scores
        order = np.lexsort((np.arange(len(scores)), keys))
        if exclude is not None:
            order = order[order != exclude]
        return order, scores

    def kneighbors(self, X=None, n_neighbors=None, return_distance=True):
        """Indices (and scores) of the closest fitted rows for each query.

        With ``X=None`` every fitted row is queried against the others, as
        in :meth:`sklearn.neighbors.NearestNeighbors.kneighbors`. Ties are
        broken by fit order.
        """
        check_is_fitted(self, "matrix_")
        k = self.n_neighbors if n_neighbors is None else n_neighbors
        if X is None:
            fitted = self.matrix_
            queries = [
                (DescriptorRecord(self.kind_, fitted.hist[i], fitted.entropy[i], fitted.raw_counts[i]), i)
                for i in range(self.n_samples_fit_)
            ]
            limit = self.n_samples_fit_ - 1
        else:
            queries = [(rec, None) for rec in _as_records(X, self.kind_)]
            limit = self.n_samples_fit_
        k = min(int(k), limit)
        if k < 1:
            raise InvalidInputError("n_neighbors must be >= 1 and the index must have candidates")
        ind = np.empty((len(queries), k), dtype=np.intp)
        dist = np.empty((len(queries), k))
        for row, (rec, exclude) in enumerate(queries):
            order, scores = self._rank(rec, exclude)
            ind[row] = order[:k]
            dist[row] = scores[order[:k]]
        return (dist, ind) if return_distance else ind
