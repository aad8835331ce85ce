"""Descriptor indexes: building, persistence, ranked queries and evaluation."""

import csv
import io
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np
from joblib import Parallel, delayed

from .descriptors import (
    DescriptorKind,
    DescriptorRecord,
    circle_count_from_means,
    extract_descriptor,
    mean_neighborhood_count,
)
from .exceptions import (
    CdenError,
    EmptyCorpusError,
    IncompatibleMetricError,
    IndexFormatError,
    IndexKindError,
    IndexVersionError,
    InvalidInputError,
    MalformedRecordError,
)
from .ingest import DEFAULT_QUANTIZATION, image_to_bin_map
from .similarity import Metric, RecordMatrix, check_compatible

logger = logging.getLogger(__name__)

MAGIC = "CDEN-IDX"
FORMAT_VERSION = 1
N_BINS = DEFAULT_QUANTIZATION.total_bins
IMAGE_SUFFIXES = frozenset({".png", ".jpg", ".jpeg"})
RECALL_LEVELS = tuple(i / 10 for i in range(11))


@dataclass
class IndexFile:
    """A descriptor index; treat it as read-only once built."""

    kind: DescriptorKind
    records: list  # of (image_id, DescriptorRecord), sorted by image_id
    circle_count: int | None = None
    quantization: object = DEFAULT_QUANTIZATION
    skipped: list = field(default_factory=list)

    def __post_init__(self):
        self.kind = DescriptorKind.parse(self.kind)
        ids = [image_id for image_id, _ in self.records]
        if len(set(ids)) != len(ids):
            raise InvalidInputError("image ids must be unique within an index")
        for image_id, rec in self.records:
            if rec.kind != self.kind:
                raise InvalidInputError(f"record {image_id!r} is {rec.kind.value}, index is {self.kind.value}")

    @property
    def ids(self):
        return [image_id for image_id, _ in self.records]

    def __len__(self):
        return len(self.records)

    @cached_property
    def matrix(self):
        return RecordMatrix(rec for _, rec in self.records)

    def get(self, image_id):
        for rid, rec in self.records:
            if rid == image_id:
                return rec
        raise InvalidInputError(f"image {image_id!r} is not in the index")


class Hit(NamedTuple):
    image_id: str
    distance: float


@dataclass
class RankedResult:
    """Query result; ``distance`` holds the similarity for the legacy metric."""

    metric: Metric
    entries: list

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def ids(self):
        return [h.image_id for h in self.entries]


class PRPoint(NamedTuple):
    cutoff: int
    precision: float
    recall: float


# -- building -----------------------------------------------------------------


def list_images(directory):
    directory = Path(directory)
    if not directory.is_dir():
        raise InvalidInputError(f"{directory} is not a directory")
    paths = [p for p in directory.rglob("*") if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES]
    return sorted(paths, key=lambda p: p.relative_to(directory).as_posix())


def _quantize_file(path):
    try:
        return image_to_bin_map(Path(path).read_bytes())
    except (CdenError, OSError) as exc:
        return exc


def load_corpus(directory, n_jobs=1):
    """Decode and quantize every image under ``directory``.

    Returns ``(ids, bin_maps, skipped)``; ids are POSIX paths relative to
    ``directory``. Undecodable files are skipped with a warning.
    """
    directory = Path(directory)
    paths = list_images(directory)
    results = Parallel(n_jobs=n_jobs)(delayed(_quantize_file)(p) for p in paths)
    ids, bin_maps, skipped = [], [], []
    for path, result in zip(paths, results):
        image_id = path.relative_to(directory).as_posix()
        if isinstance(result, Exception):
            logger.warning("skipping %s: %s", image_id, result)
            skipped.append(image_id)
            continue
        ids.append(image_id)
        bin_maps.append(result)
    if not ids:
        raise EmptyCorpusError(f"no decodable images under {directory}")
    return ids, bin_maps, skipped


def resolve_circle_count(kind, bin_maps, circles="auto", n_jobs=1):
    kind = DescriptorKind.parse(kind)
    if not kind.uses_circles:
        return None
    if circles == "auto":
        means = Parallel(n_jobs=n_jobs)(delayed(mean_neighborhood_count)(b) for b in bin_maps)
        return circle_count_from_means(means)
    n = int(circles)
    if n < 1:
        raise InvalidInputError(f"circle count must be >= 1, got {n}")
    return n


def index_bin_maps(ids, bin_maps, kind, circles="auto", n_jobs=1):
    """Build an :class:`IndexFile` from already quantized images."""
    if not ids:
        raise EmptyCorpusError("cannot index an empty corpus")
    kind = DescriptorKind.parse(kind)
    n_circles = resolve_circle_count(kind, bin_maps, circles, n_jobs)
    records = Parallel(n_jobs=n_jobs)(delayed(extract_descriptor)(b, kind, n_circles) for b in bin_maps)
    pairs = sorted(zip(ids, records), key=lambda pair: pair[0])
    return IndexFile(kind, pairs, n_circles)


def build_index(directory, kind, circles="auto", n_jobs=1):
    """Index every PNG/JPEG under ``directory``.

    ``circles`` is ``"auto"`` (derive the ring count from the corpus) or a
    fixed positive integer; it only matters for CDE and ICDE.
    """
    ids, bin_maps, skipped = load_corpus(directory, n_jobs)
    index = index_bin_maps(ids, bin_maps, kind, circles, n_jobs)
    index.skipped = skipped
    return index


def describe_image(path, index):
    """Descriptor of an arbitrary image, computed with the index's settings."""
    return extract_descriptor(image_to_bin_map(Path(path).read_bytes()), index.kind, index.circle_count)


# -- persistence ----------------------------------------------------------------


def _fmt(x):
    return format(float(x), ".17g")


def dumps_index(index):
    circles = "-" if index.circle_count is None else str(index.circle_count)
    lines = [f"{MAGIC} {FORMAT_VERSION} {index.kind.value} {circles} {N_BINS}"]
    for image_id, rec in index.records:
        if "\t" in image_id or "\n" in image_id:
            raise InvalidInputError(f"image id {image_id!r} contains a TAB or newline")
        if rec.n_bins != N_BINS:
            raise InvalidInputError(f"record {image_id!r} has {rec.n_bins} bins, expected {N_BINS}")
        lines.append("\t".join([
            image_id,
            ",".join(_fmt(x) for x in rec.hist),
            ",".join(_fmt(x) for x in rec.entropy),
            ",".join(str(int(x)) for x in rec.n_neighborhoods),
        ]))
    return "\n".join(lines) + "\n"


def save_index(index, path):
    Path(path).write_text(dumps_index(index), encoding="utf-8", newline="\n")


def _parse_header(line):
    parts = line.split(" ")
    if not parts or parts[0] != MAGIC:
        raise IndexFormatError(f"not an index file (header must start with {MAGIC!r})")
    if len(parts) != 5:
        raise IndexFormatError(f"malformed header: {line!r}")
    _, version, kind, circles, n_bins = parts
    if version != str(FORMAT_VERSION):
        raise IndexVersionError(f"unsupported index format version {version!r}")
    try:
        kind = DescriptorKind(kind)
    except ValueError:
        raise IndexFormatError(f"unknown descriptor kind {kind!r} in header") from None
    if n_bins != str(N_BINS):
        raise IndexFormatError(f"index has {n_bins} bins, expected {N_BINS}")
    if kind.uses_circles:
        if not circles.isdigit() or int(circles) < 1:
            raise IndexFormatError(f"{kind.value} index needs a positive circle count, got {circles!r}")
        circle_count = int(circles)
    elif circles != "-":
        raise IndexFormatError(f"{kind.value} index must not carry a circle count")
    else:
        circle_count = None
    return kind, circle_count


def _parse_values(field_text, lineno, name, convert):
    values = field_text.split(",")
    if len(values) != N_BINS:
        raise MalformedRecordError(lineno, f"expected {N_BINS} {name} values, got {len(values)}")
    try:
        return [convert(v) for v in values]
    except ValueError:
        raise MalformedRecordError(lineno, f"unparseable {name} value") from None


def loads_index(text, kind=None):
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise IndexFormatError("empty index file")
    file_kind, circle_count = _parse_header(lines[0])
    if kind is not None and DescriptorKind.parse(kind) != file_kind:
        raise IndexKindError(f"expected a {DescriptorKind.parse(kind).value} index, file holds {file_kind.value}")
    records, seen = [], set()
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != 4:
            raise MalformedRecordError(lineno, f"expected 4 tab-separated fields, got {len(fields)}")
        image_id, h, e, nb = fields
        if not image_id:
            raise MalformedRecordError(lineno, "empty image id")
        if image_id in seen:
            raise MalformedRecordError(lineno, f"duplicate image id {image_id!r}")
        seen.add(image_id)
        rec = DescriptorRecord(
            file_kind,
            _parse_values(h, lineno, "histogram", float),
            _parse_values(e, lineno, "entropy", float),
            _parse_values(nb, lineno, "neighborhood count", int),
        )
        records.append((image_id, rec))
    return IndexFile(file_kind, records, circle_count)


def load_index(path, kind=None):
    """Read an index written by :func:`save_index`.

    Passing ``kind`` makes a file of another descriptor kind an error.
    """
    return loads_index(Path(path).read_text(encoding="utf-8"), kind)


# -- querying -------------------------------------------------------------------


def rank(index, query, metric, exclude=()):
    """Every record of ``index`` (minus ``exclude``) ordered by closeness to ``query``."""
    metric = check_compatible(metric, index.kind)
    if query.kind != index.kind:
        raise IncompatibleMetricError(f"cannot query a {index.kind.value} index with a {query.kind.value} record")
    if query.n_bins != N_BINS:
        raise InvalidInputError(f"query has {query.n_bins} bins, expected {N_BINS}")
    scores = index.matrix.score(query, metric).tolist()
    hits = [Hit(image_id, score) for image_id, score in zip(index.ids, scores) if image_id not in exclude]
    if metric.higher_is_closer:
        hits.sort(key=lambda h: (-h.distance, h.image_id))
    else:
        hits.sort(key=lambda h: (h.distance, h.image_id))
    return RankedResult(metric, hits)


def query_topk(index, query, k, metric):
    """Top ``k`` records closest to ``query`` (all of them if ``k`` exceeds the index)."""
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    result = rank(index, query, metric)
    result.entries = result.entries[:k]
    return result


# -- evaluation -----------------------------------------------------------------


def precision_recall(ranked, relevant, n_relevant):
    """Precision ``r / Nr`` and recall ``r / Ni`` at every cutoff ``Nr``."""
    if n_relevant < 1:
        raise InvalidInputError("the number of relevant images must be >= 1")
    relevant = set(relevant)
    points, r = [], 0
    for cutoff, hit in enumerate(ranked, start=1):
        r += hit.image_id in relevant
        points.append(PRPoint(cutoff, r / cutoff, r / n_relevant))
    return points


def interpolated_precision(points, levels=RECALL_LEVELS):
    """Highest precision reached at recall >= each level (0 if never reached)."""
    precision = np.array([p.precision for p in points])
    recall = np.array([p.recall for p in points])
    out = []
    for level in levels:
        mask = recall >= level - 1e-12
        out.append(float(precision[mask].max()) if mask.any() else 0.0)
    return out


@dataclass
class EvalReport:
    metric: Metric
    per_query: dict  # query id -> list[PRPoint]
    recall_levels: tuple = RECALL_LEVELS

    @property
    def mean_precision(self):
        """Mean interpolated precision at each recall level."""
        curves = np.array([interpolated_precision(pts, self.recall_levels) for pts in self.per_query.values()])
        return curves.mean(axis=0)

    def mean_at_cutoff(self, cutoff):
        """``(mean precision, mean recall)`` over queries at a rank cutoff."""
        points = [pts[cutoff - 1] for pts in self.per_query.values() if len(pts) >= cutoff]
        if not points:
            raise InvalidInputError(f"no query has a ranking of length {cutoff}")
        return (float(np.mean([p.precision for p in points])), float(np.mean([p.recall for p in points])))

    @property
    def max_cutoff(self):
        return min(len(pts) for pts in self.per_query.values())

    def write_csv(self, out):
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["query_id", "cutoff", "precision", "recall"])
        for query_id, points in self.per_query.items():
            for p in points:
                writer.writerow([query_id, p.cutoff, _num(p.precision), _num(p.recall)])
        writer.writerow([])
        writer.writerow(["recall_level", "mean_precision"])
        for level, precision in zip(self.recall_levels, self.mean_precision):
            writer.writerow([_num(level), _num(precision)])

    def to_csv(self):
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def _num(x):
    return format(float(x), ".12g")


def read_labels(path):
    """Read a ``image_id,category`` CSV into a dict."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"image_id", "category"} <= set(reader.fieldnames):
            raise InvalidInputError(f"{path}: labels CSV needs an 'image_id,category' header")
        labels = {}
        for row in reader:
            labels[row["image_id"]] = row["category"]
    return labels


def evaluate_protocol(index, labels, queries, metric):
    """Run every query against the rest of the index and collect PR points.

    A query's relevant set is every other indexed image of its category; the
    query itself is removed from both the ranking and the relevant count.
    """
    metric = check_compatible(metric, index.kind)
    by_id = dict(index.records)
    queries = list(queries)
    if not queries:
        raise InvalidInputError("no queries given")
    per_query = {}
    for query_id in queries:
        if query_id not in by_id:
            raise InvalidInputError(f"query {query_id!r} is not in the index")
        if query_id not in labels:
            raise InvalidInputError(f"query {query_id!r} has no category label")
        category = labels[query_id]
        relevant = {i for i in by_id if i != query_id and labels.get(i) == category}
        if not relevant:
            raise InvalidInputError(f"query {query_id!r}: no other image of category {category!r} in the index")
        ranked = rank(index, by_id[query_id], metric, exclude={query_id})
        per_query[query_id] = precision_recall(ranked, relevant, len(relevant))
    return EvalReport(metric, per_query)


def labeled_queries(index, labels):
    """Every indexed image that carries a label, in index order."""
    return [i for i in index.ids if i in labels]


COMPARISON = (("dcden_d2", DescriptorKind.DCDEN, Metric.D2), ("icde_d1", DescriptorKind.ICDE, Metric.D1))


def compare_methods(directory, labels, circles="auto", n_jobs=1):
    """Evaluate D-CDEN/d2 against I-CDE/d1 on the same corpus and queries.

    Returns ``{name: (IndexFile, EvalReport)}``.
    """
    ids, bin_maps, skipped = load_corpus(directory, n_jobs)
    out = {}
    for name, kind, metric in COMPARISON:
        index = index_bin_maps(ids, bin_maps, kind, circles, n_jobs)
        index.skipped = skipped
        out[name] = (index, evaluate_protocol(index, labels, labeled_queries(index, labels), metric))
    return out


def write_comparison_csv(results, out):
    names = list(results)
    reports = [results[n][1] for n in names]
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["recall_level"] + names)
    curves = [r.mean_precision for r in reports]
    for i, level in enumerate(reports[0].recall_levels):
        writer.writerow([_num(level)] + [_num(c[i]) for c in curves])
    writer.writerow([])
    header = ["cutoff"]
    for n in names:
        header += [f"{n}_mean_precision", f"{n}_mean_recall"]
    writer.writerow(header)
    for cutoff in range(1, min(r.max_cutoff for r in reports) + 1):
        row = [cutoff]
        for r in reports:
            row += [_num(v) for v in r.mean_at_cutoff(cutoff)]
        writer.writerow(row)
