"""8-bit grayscale page rasters and the pixel operations on them.

Convention: 0 is black ink, 255 is white paper. Arrays are numpy uint8 with
shape (height, width).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from schematik.geometry import BoundingBox, pixel_bounds


@dataclass
class PageImage:
    width: int
    height: int
    pixels: np.ndarray = field(repr=False)

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.shape != (self.height, self.width):
            raise ValueError(
                f"pixel buffer shape {px.shape} does not match {self.height}x{self.width}"
            )
        self.pixels = px

    @classmethod
    def blank(cls, width: int, height: int, fill: int = 255) -> "PageImage":
        return cls(width, height, np.full((height, width), fill, dtype=np.uint8))

    def copy(self) -> "PageImage":
        return PageImage(self.width, self.height, self.pixels.copy())


def binarize(page: PageImage, threshold: int = 128) -> np.ndarray:
    """Ink mask: True where the pixel is darker than ``threshold``."""
    return page.pixels < threshold


def crop(page: PageImage, box: BoundingBox) -> PageImage:
    """Crop the pixel rectangle covered by ``box`` (rounded half away from
    zero, min edges closed / max edges open), clipped to the page."""
    x0, y0, x1, y1 = pixel_bounds(box)
    x0 = max(x0, 0)
    y0 = max(y0, 0)
    x1 = min(x1, page.width)
    y1 = min(y1, page.height)
    if x1 <= x0 or y1 <= y0:
        raise ValueError(f"crop box {box.as_tuple()} lies outside the page")
    region = page.pixels[y0:y1, x0:x1].copy()
    return PageImage(x1 - x0, y1 - y0, region)


def resize_bilinear(page: PageImage, new_w: int, new_h: int) -> PageImage:
    """Resize with bilinear interpolation. A no-op returns an identical copy."""
    if new_w < 1 or new_h < 1:
        raise ValueError(f"target size {new_w}x{new_h} is empty")
    if (new_w, new_h) == (page.width, page.height):
        return page.copy()
    im = Image.fromarray(page.pixels, mode="L").resize((new_w, new_h), Image.BILINEAR)
    return PageImage(new_w, new_h, np.asarray(im, dtype=np.uint8))


def write_png(page: PageImage, path: str | Path) -> None:
    Image.fromarray(page.pixels, mode="L").save(Path(path), format="PNG")


def read_png(path: str | Path) -> PageImage:
    im = Image.open(Path(path)).convert("L")
    px = np.asarray(im, dtype=np.uint8)
    return PageImage(im.width, im.height, px)


def write_pgm(page: PageImage, path: str | Path) -> None:
    """Binary PGM (P5), maxval 255."""
    header = f"P5\n{page.width} {page.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + page.pixels.tobytes())


def read_image(path: str | Path) -> PageImage:
    """Read PNG or PGM by extension."""
    return read_png(path)


def write_heatmap_png(matrix, path: str | Path, cell: int = 48) -> None:
    """Render a small numeric matrix as a grayscale heatmap PNG (higher
    values darker), one upscaled cell per entry with a 1px grid."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.size == 0:
        raise ValueError("heatmap needs a nonempty 2-D matrix")
    lo, hi = float(m.min()), float(m.max())
    norm = np.zeros_like(m) if hi <= lo else (m - lo) / (hi - lo)
    shades = (255 - np.rint(norm * 225)).astype(np.uint8)  # keep grid visible
    h, w = m.shape
    img = np.zeros((h * cell + 1, w * cell + 1), dtype=np.uint8)
    for r in range(h):
        for c in range(w):
            img[r * cell + 1 : (r + 1) * cell, c * cell + 1 : (c + 1) * cell] = shades[r, c]
    write_png(PageImage(img.shape[1], img.shape[0], img), path)
