"""Spatial color descriptors and a small content-based image retrieval engine."""

from .descriptors import (
    DescriptorKind,
    DescriptorRecord,
    choose_circle_count,
    extract_descriptor,
    improved_entropy,
    shannon_entropy,
)
from .engine import (
    EvalReport,
    IndexFile,
    build_index,
    evaluate_protocol,
    load_index,
    precision_recall,
    query_topk,
    save_index,
)
from .estimators import ColorDescriptorExtractor, ImageRetriever
from .ingest import QuantizationConfig, decode_and_resize, quantize_image
from .neighborhoods import label_components
from .similarity import Metric, cosine, dissimilarity_dcden, dissimilarity_icde, legacy_similarity

__version__ = "0.1.0"

__all__ = [
    "ColorDescriptorExtractor",
    "DescriptorKind",
    "DescriptorRecord",
    "EvalReport",
    "ImageRetriever",
    "IndexFile",
    "Metric",
    "QuantizationConfig",
    "build_index",
    "choose_circle_count",
    "cosine",
    "decode_and_resize",
    "dissimilarity_dcden",
    "dissimilarity_icde",
    "evaluate_protocol",
    "extract_descriptor",
    "improved_entropy",
    "label_components",
    "legacy_similarity",
    "load_index",
    "precision_recall",
    "quantize_image",
    "query_topk",
    "save_index",
    "shannon_entropy",
]
