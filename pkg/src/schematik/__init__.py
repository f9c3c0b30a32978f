"""Toolkit for Schematismus-style document pages: synthetic generation with
pixel-exact annotations, layout detection and post-processing, reading-order
snippet extraction for OCR, and evaluation metrics (CER/WER, detection
scores)."""

__version__ = "0.1.0"

from schematik.corpus import Detection, LayoutClass, PageAnnotation
from schematik.geometry import BoundingBox, area, iou, pad_and_clip, union_box
from schematik.raster import PageImage

__all__ = [
    "BoundingBox",
    "Detection",
    "LayoutClass",
    "PageAnnotation",
    "PageImage",
    "__version__",
    "area",
    "iou",
    "pad_and_clip",
    "union_box",
]
