"""Axis-aligned rectangle arithmetic.

Boxes live in pixel space with the origin at the top-left corner and y
growing downward. Coordinates are real-valued; pixel discretisation
(half-away-from-zero rounding, closed min edge / open max edge) happens
only when a box is rasterised for cropping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class BoundingBox:
    """Rectangle with strictly positive area: x_min < x_max, y_min < y_max."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        for v in (self.x_min, self.y_min, self.x_max, self.y_max):
            if not math.isfinite(v):
                raise ValueError(f"non-finite box coordinate: {self!r}")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"degenerate box (needs x_min < x_max, y_min < y_max): {self!r}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0)

    def contains(self, other: "BoundingBox") -> bool:
        """True if ``other`` lies inside this box (edges may touch)."""
        return (
            self.x_min <= other.x_min
            and self.y_min <= other.y_min
            and other.x_max <= self.x_max
            and other.y_max <= self.y_max
        )

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x_min, self.y_min, self.x_max, self.y_max)


def area(b: BoundingBox) -> float:
    """Box area in square pixels."""
    return b.width * b.height


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two boxes; 0.0 when disjoint, 1.0 when equal."""
    ix_min = max(a.x_min, b.x_min)
    iy_min = max(a.y_min, b.y_min)
    ix_max = min(a.x_max, b.x_max)
    iy_max = min(a.y_max, b.y_max)
    if ix_min >= ix_max or iy_min >= iy_max:
        return 0.0
    inter = (ix_max - ix_min) * (iy_max - iy_min)
    union = area(a) + area(b) - inter
    return inter / union


def union_box(boxes: Sequence[BoundingBox] | Iterable[BoundingBox]) -> BoundingBox:
    """Smallest box containing every input box.

    Raises ValueError on an empty input.
    """
    boxes = list(boxes)
    if not boxes:
        raise ValueError("union_box needs at least one box")
    return BoundingBox(
        min(b.x_min for b in boxes),
        min(b.y_min for b in boxes),
        max(b.x_max for b in boxes),
        max(b.y_max for b in boxes),
    )


def pad_and_clip(b: BoundingBox, padding: float, page_w: float, page_h: float) -> BoundingBox:
    """Expand each side by ``padding`` pixels, then clip to the page.

    Raises ValueError if padding is negative or the clipped box is empty
    (box entirely outside the page).
    """
    if padding < 0:
        raise ValueError(f"padding must be >= 0, got {padding}")
    x_min = max(b.x_min - padding, 0.0)
    y_min = max(b.y_min - padding, 0.0)
    x_max = min(b.x_max + padding, float(page_w))
    y_max = min(b.y_max + padding, float(page_h))
    if x_min >= x_max or y_min >= y_max:
        raise ValueError(f"box {b.as_tuple()} clips to nothing on a {page_w}x{page_h} page")
    return BoundingBox(x_min, y_min, x_max, y_max)


def round_half_away(v: float) -> int:
    """Round half away from zero (crop-time pixel rounding rule)."""
    return int(math.floor(v + 0.5)) if v >= 0 else -int(math.floor(-v + 0.5))


def pixel_bounds(b: BoundingBox) -> tuple[int, int, int, int]:
    """Discretise a box to integer pixel bounds (min edges closed, max edges
    open): a box of width w covers w columns after rounding."""
    x0 = round_half_away(b.x_min)
    y0 = round_half_away(b.y_min)
    x1 = round_half_away(b.x_max)
    y1 = round_half_away(b.y_max)
    if x1 <= x0:
        x1 = x0 + 1
    if y1 <= y0:
        y1 = y0 + 1
    return x0, y0, x1, y1
