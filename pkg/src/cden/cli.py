"""Command-line interface.

    cden index   --images DIR --out FILE --kind hist|cde|icde|dcden [--circles auto|N]
    cden query   --index FILE --image PATH --top K --metric legacy|d1|d2
    cden eval    --index FILE --labels CSV [--queries all|FILE] --metric legacy|d1|d2 --out CSV
    cden compare --images DIR --labels CSV --out CSV [--circles auto|N]

Exit status is 0 on success, 1 on a data or engine error and 2 on a usage
error.
"""

import argparse
import logging
import sys
from pathlib import Path

from . import engine
from .descriptors import DescriptorKind
from .exceptions import CdenError
from .similarity import Metric, check_compatible

METRIC_HELP = "legacy = min-ratio similarity, d1 = 2-cos(h)-cos(E), d2 = 3-cos(h)-cos(E)-cos(Nb)"


def _circles(value):
    if value == "auto":
        return value
    try:
        n = int(value)
    except ValueError:
        n = 0
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected 'auto' or a positive integer, got {value!r}")
    return n


def _positive_int(value):
    try:
        n = int(value)
    except ValueError:
        n = 0
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value!r}")
    return n


def build_parser():
    parser = argparse.ArgumentParser(prog="cden", description="Spatial color descriptor image retrieval.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress and skipped files")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for feature extraction")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="build a descriptor index over an image directory")
    p.add_argument("--images", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--kind", required=True, choices=[k.value.lower() for k in DescriptorKind])
    p.add_argument("--circles", type=_circles, default="auto",
                   help="ring count for cde/icde: 'auto' derives it from the corpus (default)")

    p = sub.add_parser("query", help="print the top-k matches for an image")
    p.add_argument("--index", required=True, type=Path)
    p.add_argument("--image", required=True, type=Path)
    p.add_argument("--top", type=_positive_int, default=10)
    p.add_argument("--metric", required=True, choices=[m.value for m in Metric], help=METRIC_HELP)

    p = sub.add_parser("eval", help="precision/recall of every query against the index")
    p.add_argument("--index", required=True, type=Path)
    p.add_argument("--labels", required=True, type=Path)
    p.add_argument("--queries", default="all", help="'all' or a file with one image id per line")
    p.add_argument("--metric", required=True, choices=[m.value for m in Metric], help=METRIC_HELP)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("compare", help="D-CDEN/d2 versus I-CDE/d1 on the same corpus")
    p.add_argument("--images", required=True, type=Path)
    p.add_argument("--labels", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--circles", type=_circles, default="auto")
    return parser


def _index(args):
    index = engine.build_index(args.images, args.kind, args.circles, n_jobs=args.jobs)
    engine.save_index(index, args.out)
    circles = f", {index.circle_count} circles" if index.circle_count else ""
    print(f"indexed {len(index)} images ({index.kind.value}{circles}) -> {args.out}")
    if index.skipped:
        print(f"skipped {len(index.skipped)} undecodable files", file=sys.stderr)


def _query(args):
    index = engine.load_index(args.index)
    check_compatible(args.metric, index.kind)
    query = engine.describe_image(args.image, index)
    result = engine.query_topk(index, query, args.top, args.metric)
    label = "similarity" if result.metric.higher_is_closer else "distance"
    print(f"rank\timage_id\t{label}")
    for rank, hit in enumerate(result, start=1):
        print(f"{rank}\t{hit.image_id}\t{hit.distance:.6f}")


def _read_queries(source, index, labels):
    if source == "all":
        return engine.labeled_queries(index, labels)
    lines = Path(source).read_text(encoding="utf-8").splitlines()
    return [line.strip() for line in lines if line.strip()]


def _eval(args):
    index = engine.load_index(args.index)
    labels = engine.read_labels(args.labels)
    queries = _read_queries(args.queries, index, labels)
    report = engine.evaluate_protocol(index, labels, queries, args.metric)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        report.write_csv(fh)
    precision, recall = report.mean_at_cutoff(min(10, report.max_cutoff))
    print(f"{len(report.per_query)} queries; mean precision@10 {precision:.4f}, recall@10 {recall:.4f}")


def _compare(args):
    labels = engine.read_labels(args.labels)
    results = engine.compare_methods(args.images, labels, args.circles, n_jobs=args.jobs)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        engine.write_comparison_csv(results, fh)
    for name, (index, report) in results.items():
        cutoff = min(10, report.max_cutoff)
        precision, recall = report.mean_at_cutoff(cutoff)
        print(f"{name}: {len(report.per_query)} queries, mean precision@{cutoff} {precision:.4f}, recall {recall:.4f}")


COMMANDS = {"index": _index, "query": _query, "eval": _eval, "compare": _compare}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (CdenError, OSError) as exc:
        print(f"cden {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
