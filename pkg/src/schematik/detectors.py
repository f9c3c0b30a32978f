"""Layout detectors behind one contract: a ground-truth oracle with
calibrated perturbation for closed-loop testing, and a classical run-length
smoothing segmenter with a rule classifier.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass
from typing import Protocol

import numpy as np
from scipy import ndimage

from schematik import kernels
from schematik.corpus import CLASS_ORDER, Detection, LayoutClass, PageAnnotation
from schematik.geometry import BoundingBox
from schematik.raster import PageImage, binarize
from schematik.seeding import stable_seed

RLSA_RULE_CONFIDENCE = 0.5
FULL_WIDTH_FRACTION = 0.8


@dataclass
class DetectorOutput:
    page_id: str
    detections: list[Detection]


class Detector(Protocol):
    def detect(self, page: PageImage, page_id: str) -> DetectorOutput: ...


# ---------------------------------------------------------------------------
# Oracle detector


@dataclass(frozen=True)
class OraclePerturbation:
    """Zero perturbation replays ground truth exactly with confidence 1.0."""

    jitter_sigma: float = 0.0
    label_flip_prob: float = 0.0
    confidence_range: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        if self.jitter_sigma < 0:
            raise ValueError("jitter_sigma must be >= 0")
        if not (0.0 <= self.label_flip_prob <= 1.0):
            raise ValueError("label_flip_prob must be in [0, 1]")
        lo, hi = self.confidence_range
        if not (0.0 <= lo <= hi <= 1.0):
            raise ValueError("confidence_range must be ordered within [0, 1]")


class OracleDetector:
    """Replays (optionally perturbed) ground truth, standing in for a trained
    model so downstream stages can be tested in isolation."""

    def __init__(
        self,
        annotations: dict[str, PageAnnotation],
        perturbation: OraclePerturbation | None = None,
        seed: int = 0,
    ):
        self.annotations = annotations
        self.perturbation = perturbation if perturbation is not None else OraclePerturbation()
        self.seed = seed

    def detect(self, page: PageImage, page_id: str) -> DetectorOutput:
        ann = self.annotations.get(page_id)
        if ann is None:
            raise KeyError(f"oracle has no annotation for page {page_id!r}")
        p = self.perturbation
        rng = random.Random(stable_seed(self.seed, "oracle", page_id))
        dets = []
        for box, label in ann.elements:
            if p.jitter_sigma > 0:
                box = self._jitter(box, rng, p.jitter_sigma, ann.width, ann.height)
            if p.label_flip_prob > 0 and rng.random() < p.label_flip_prob:
                label = rng.choice([c for c in CLASS_ORDER if c is not label])
            lo, hi = p.confidence_range
            conf = 1.0 if (lo, hi) == (1.0, 1.0) else rng.uniform(lo, hi)
            dets.append(Detection(box, label, conf))
        return DetectorOutput(page_id, dets)

    @staticmethod
    def _jitter(box: BoundingBox, rng: random.Random, sigma: float, w: int, h: int) -> BoundingBox:
        x0 = min(max(box.x_min + rng.gauss(0.0, sigma), 0.0), w - 1.0)
        y0 = min(max(box.y_min + rng.gauss(0.0, sigma), 0.0), h - 1.0)
        x1 = min(max(box.x_max + rng.gauss(0.0, sigma), 0.0), float(w))
        y1 = min(max(box.y_max + rng.gauss(0.0, sigma), 0.0), float(h))
        if x1 <= x0:
            x1 = min(x0 + 1.0, float(w))
            x0 = x1 - 1.0
        if y1 <= y0:
            y1 = min(y0 + 1.0, float(h))
            y0 = y1 - 1.0
        return BoundingBox(x0, y0, x1, y1)


# ---------------------------------------------------------------------------
# Run-length smoothing segmentation


@dataclass(frozen=True)
class RlsaParams:
    horizontal_threshold_1: int
    vertical_threshold: int
    horizontal_threshold_2: int
    binarization_threshold: int = 128
    min_block_area: int = 64

    def __post_init__(self):
        for name in ("horizontal_threshold_1", "vertical_threshold", "horizontal_threshold_2"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @classmethod
    def from_char_height(cls, char_height: int, **kwargs) -> "RlsaParams":
        """Thresholds in multiples of the character height: 8x horizontal,
        0.8x vertical, 6x for the final horizontal pass."""
        h = max(1, char_height)
        return cls(8 * h, max(1, int(0.8 * h)), 6 * h, **kwargs)


@dataclass(frozen=True)
class BlockStats:
    black_pixel_density: float
    aspect_ratio: float
    height: int

    def __post_init__(self):
        if not (0.0 <= self.black_pixel_density <= 1.0):
            raise ValueError("density must be in [0, 1]")
        if self.height <= 0:
            raise ValueError("height must be positive")


def rlsa_smooth(bits, threshold: int) -> np.ndarray:
    """Run-length smooth a binary vector or image along its rows: white runs
    strictly shorter than ``threshold`` between two black pixels turn black;
    runs touching the border never fill."""
    arr = np.ascontiguousarray(np.asarray(bits, dtype=np.uint8))
    squeeze = arr.ndim == 1
    if squeeze:
        arr = arr[None, :]
    out = arr.copy()
    kernels.smooth_rows_inplace(out, int(threshold))
    return out[0] if squeeze else out


def estimate_char_height(page: PageImage, binarization_threshold: int = 128) -> int:
    """Median connected-component height of the raw ink (pre-smoothing)."""
    ink = binarize(page, binarization_threshold)
    labels, n = ndimage.label(ink, structure=np.ones((3, 3), dtype=int))
    if n == 0:
        return 1
    slices = ndimage.find_objects(labels)
    heights = [s[0].stop - s[0].start for s in slices if s is not None]
    return max(1, int(statistics.median(heights)))


def rlsa_segment(
    page: PageImage, params: RlsaParams | None = None
) -> list[tuple[BoundingBox, BlockStats]]:
    """Classic four-step segmentation: horizontal smoothing and vertical
    smoothing of the binarised page, pixelwise AND, one more horizontal
    smoothing, then 8-connected components with per-block statistics."""
    if params is None:
        params = RlsaParams.from_char_height(estimate_char_height(page))
    ink = binarize(page, params.binarization_threshold).astype(np.uint8)
    horiz = rlsa_smooth(ink, params.horizontal_threshold_1)
    vert = rlsa_smooth(np.ascontiguousarray(ink.T), params.vertical_threshold).T
    combined = rlsa_smooth(horiz & vert, params.horizontal_threshold_2)

    labels, n = ndimage.label(combined, structure=np.ones((3, 3), dtype=int))
    blocks = []
    for sl in ndimage.find_objects(labels):
        if sl is None:
            continue
        y0, y1 = sl[0].start, sl[0].stop
        x0, x1 = sl[1].start, sl[1].stop
        w, h = x1 - x0, y1 - y0
        if w * h < params.min_block_area:
            continue
        density = float(ink[y0:y1, x0:x1].sum()) / (w * h)
        box = BoundingBox(float(x0), float(y0), float(x1), float(y1))
        blocks.append((box, BlockStats(density, w / h, h)))
    blocks.sort(key=lambda b: (b[0].y_min, b[0].x_min))
    return blocks


def classify_blocks(
    page_id: str,
    blocks: list[tuple[BoundingBox, BlockStats]],
    page_w: int,
) -> DetectorOutput:
    """Rule classification of segmented blocks.

    Full-text-width blocks become H1 when clearly taller than a line, else
    BigParagraph; column-width blocks default to Paragraph, short centered
    ones to H2. Confidence is a flat 0.5: deliberately below typical neural
    confidences so mixed pipelines prefer those detections.
    """
    if not blocks:
        return DetectorOutput(page_id, [])
    full = [i for i, (box, _) in enumerate(blocks) if box.width > FULL_WIDTH_FRACTION * page_w]
    column = [i for i in range(len(blocks)) if i not in set(full)]
    heights = [blocks[i][1].height for i in (column or range(len(blocks)))]
    line_h = statistics.median(heights)

    clusters = _cluster_columns([blocks[i][0] for i in column])
    col_bounds: dict[int, tuple[float, float]] = {}
    for cluster in clusters:
        lo = min(blocks[column[k]][0].x_min for k in cluster)
        hi = max(blocks[column[k]][0].x_max for k in cluster)
        for k in cluster:
            col_bounds[column[k]] = (lo, hi)

    dets = []
    for i, (box, stats) in enumerate(blocks):
        if i in set(full):
            label = LayoutClass.H1 if stats.height >= 1.5 * line_h else LayoutClass.BIG_PARAGRAPH
        else:
            lo, hi = col_bounds[i]
            col_w = hi - lo
            left, right = box.x_min - lo, hi - box.x_max
            centered = abs(left - right) <= 0.25 * col_w and box.width <= 0.8 * col_w
            short = stats.height < 1.5 * line_h
            label = LayoutClass.H2 if (short and centered) else LayoutClass.PARAGRAPH
        dets.append(Detection(box, label, RLSA_RULE_CONFIDENCE))
    return DetectorOutput(page_id, dets)


def _cluster_columns(boxes: list[BoundingBox]) -> list[list[int]]:
    """1-D clustering of boxes by x-center; gap threshold is half the median
    box width."""
    if not boxes:
        return []
    order = sorted(range(len(boxes)), key=lambda i: boxes[i].center[0])
    threshold = 0.5 * statistics.median(b.width for b in boxes)
    clusters = [[order[0]]]
    for i in order[1:]:
        prev = clusters[-1][-1]
        if boxes[i].center[0] - boxes[prev].center[0] > threshold:
            clusters.append([i])
        else:
            clusters[-1].append(i)
    return clusters


class RlsaDetector:
    """Segmenter + rule classifier behind the detector contract."""

    def __init__(self, params: RlsaParams | None = None):
        self.params = params

    def detect(self, page: PageImage, page_id: str) -> DetectorOutput:
        blocks = rlsa_segment(page, self.params)
        return classify_blocks(page_id, blocks, page.width)
