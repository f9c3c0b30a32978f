"""Reading-order reconstruction and snippet extraction for OCR.

Pages are cut into horizontal bands at each full-width element; inside a
band, elements cluster into columns by x-center and are read top-to-bottom,
columns left-to-right. A Curly group is ordered by its top edge with its
members immediately after it.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from pathlib import Path

from schematik.corpus import Detection, LayoutClass
from schematik.geometry import BoundingBox, pad_and_clip, round_half_away
from schematik.raster import PageImage, crop, resize_bilinear, write_png

FULL_WIDTH_FRACTION = 0.8
DEFAULT_PADDING = 4
DEFAULT_SCALE = 1.6


@dataclass
class Snippet:
    image: PageImage
    source_box: BoundingBox
    label: LayoutClass
    order_index: int
    page_id: str

    def __post_init__(self):
        if self.order_index < 0:
            raise ValueError("order_index must be >= 0")
        if self.image.width < 1 or self.image.height < 1:
            raise ValueError("snippet image is empty")


def reading_order(
    elements: list[tuple[BoundingBox, LayoutClass]], page_w: float
) -> list[int]:
    """Permutation of element indices in reading order."""
    n = len(elements)
    if n == 0:
        return []
    boxes = [b for b, _ in elements]
    labels = [c for _, c in elements]

    # Band separators: full-width elements. The width test alone cannot tell
    # a full-width Paragraph on a single-column page from a BigParagraph, so
    # the classes that never sit inside a column are required too.
    separators = sorted(
        (
            i
            for i in range(n)
            if boxes[i].width > FULL_WIDTH_FRACTION * page_w
            and labels[i] in (LayoutClass.H1, LayoutClass.BIG_PARAGRAPH)
        ),
        key=lambda i: boxes[i].y_min,
    )
    sep_set = set(separators)
    sep_centers = [boxes[i].center[1] for i in separators]

    # Curly members leave the normal flow and follow their group.
    members: dict[int, list[int]] = {}
    taken: set[int] = set()
    for ci in sorted(
        (i for i in range(n) if labels[i] is LayoutClass.CURLY and i not in sep_set),
        key=lambda i: boxes[i].y_min,
    ):
        own = [
            j
            for j in range(n)
            if j != ci
            and j not in sep_set
            and j not in taken
            and labels[j] is not LayoutClass.CURLY
            and boxes[ci].contains(boxes[j])
        ]
        own.sort(key=lambda j: (boxes[j].y_min, boxes[j].x_min))
        members[ci] = own
        taken.update(own)

    def band_of(i: int) -> int:
        yc = boxes[i].center[1]
        return sum(1 for s in sep_centers if s < yc)

    order: list[int] = []
    for band in range(len(separators) + 1):
        items = [
            i
            for i in range(n)
            if i not in sep_set and i not in taken and band_of(i) == band
        ]
        for column in _cluster_by_x(boxes, items):
            column.sort(key=lambda i: (boxes[i].y_min, boxes[i].x_min))
            for i in column:
                order.append(i)
                order.extend(members.get(i, ()))
        if band < len(separators):
            order.append(separators[band])
    return order


def _cluster_by_x(boxes: list[BoundingBox], items: list[int]) -> list[list[int]]:
    if not items:
        return []
    threshold = 0.5 * statistics.median(boxes[i].width for i in items)
    ordered = sorted(items, key=lambda i: boxes[i].center[0])
    clusters = [[ordered[0]]]
    for i in ordered[1:]:
        if boxes[i].center[0] - boxes[clusters[-1][-1]].center[0] > threshold:
            clusters.append([i])
        else:
            clusters[-1].append(i)
    return clusters


def extract_snippet(
    page: PageImage,
    det: Detection,
    padding: float = DEFAULT_PADDING,
    scale: float = DEFAULT_SCALE,
    order_index: int = 0,
    page_id: str = "",
) -> Snippet:
    """Crop the padded detection box and rescale it for OCR.

    The crop is padded by ``padding`` pixels (clipped to the page), then
    resized so the output height is round(scale * crop height), width by the
    same factor, with bilinear interpolation. scale 1 with padding 0 is a
    byte-identical crop.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    padded = pad_and_clip(det.box, padding, page.width, page.height)
    cropped = crop(page, padded)
    out_h = max(1, round_half_away(scale * cropped.height))
    out_w = max(1, round_half_away(scale * cropped.width))
    resized = resize_bilinear(cropped, out_w, out_h)
    return Snippet(resized, det.box, det.label, order_index, page_id)


def extract_page_snippets(
    page: PageImage,
    detections: list[Detection],
    page_id: str,
    padding: float = DEFAULT_PADDING,
    scale: float = DEFAULT_SCALE,
) -> list[Snippet]:
    """Order detections by reading flow and extract one snippet per box."""
    order = reading_order([(d.box, d.label) for d in detections], page.width)
    return [
        extract_snippet(page, detections[i], padding, scale, order_index=k, page_id=page_id)
        for k, i in enumerate(order)
    ]


def export_snippets(snips: list[Snippet], out_dir: str | Path) -> list[Path]:
    """Write snippets as PNGs named {page_id}_{order_index}_{label}.png."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for s in snips:
        path = out / f"{s.page_id}_{s.order_index}_{s.label.value}.png"
        write_png(s.image, path)
        paths.append(path)
    return paths
