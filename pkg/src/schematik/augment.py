"""Seeded geometric and photometric augmentation of (image, annotation) pairs.

Geometry (rotation, scaling, crop-zoom, flip) is one affine transform applied
identically to pixels and boxes. Optical distortion, blur and noise are
photometric only; distortion amplitude is capped so box drift stays under
two pixels.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from schematik.corpus import PageAnnotation
from schematik.geometry import BoundingBox
from schematik.raster import PageImage
from schematik.seeding import stable_seed

_MAX_DISTORTION_PX = 2.0


@dataclass
class AugmentParams:
    rotation_deg: float = 5.0
    scale_range: tuple[float, float] = (0.9, 1.1)
    crop_fraction_range: tuple[float, float] = (0.9, 1.0)
    distortion_strength: float = 1.5
    blur_px: int = 3
    noise_std: float = 8.0
    flip_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.rotation_deg < 0:
            raise ValueError("rotation_deg is a magnitude, must be >= 0")
        for name in ("scale_range", "crop_fraction_range"):
            lo, hi = getattr(self, name)
            if not (0 < lo <= hi):
                raise ValueError(f"{name} must satisfy 0 < lo <= hi")
        if self.crop_fraction_range[1] > 1.0:
            raise ValueError("crop fractions cannot exceed 1.0")
        if not (0.0 <= self.flip_prob <= 1.0):
            raise ValueError("flip_prob must be in [0, 1]")
        if self.distortion_strength < 0 or self.blur_px < 0 or self.noise_std < 0:
            raise ValueError("photometric strengths must be >= 0")

    def to_dict(self) -> dict:
        return {
            "rotation_deg": self.rotation_deg,
            "scale_range": list(self.scale_range),
            "crop_fraction_range": list(self.crop_fraction_range),
            "distortion_strength": self.distortion_strength,
            "blur_px": self.blur_px,
            "noise_std": self.noise_std,
            "flip_prob": self.flip_prob,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AugmentParams":
        d = dict(d)
        for name in ("scale_range", "crop_fraction_range"):
            if name in d:
                d[name] = tuple(d[name])
        return cls(**d)


def flip_matrix(page_w: float) -> np.ndarray:
    return np.array([[-1.0, 0.0, page_w], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])


def rotation_scale_matrix(angle_deg: float, scale: float, cx: float, cy: float) -> np.ndarray:
    a = math.radians(angle_deg)
    cos_a, sin_a = math.cos(a) * scale, math.sin(a) * scale
    # rotate/scale about (cx, cy)
    return np.array(
        [
            [cos_a, -sin_a, cx - cos_a * cx + sin_a * cy],
            [sin_a, cos_a, cy - sin_a * cx - cos_a * cy],
            [0.0, 0.0, 1.0],
        ]
    )


def crop_zoom_matrix(ox: float, oy: float, fraction: float) -> np.ndarray:
    s = 1.0 / fraction
    return np.array([[s, 0.0, -s * ox], [0.0, s, -s * oy], [0.0, 0.0, 1.0]])


def draw_transform(params: AugmentParams, page_w: int, page_h: int, rng: random.Random) -> np.ndarray:
    """Sample the affine transform for one page (3x3, input->output)."""
    angle = rng.uniform(-params.rotation_deg, params.rotation_deg)
    scale = rng.uniform(*params.scale_range)
    fraction = rng.uniform(*params.crop_fraction_range)
    ox = rng.uniform(0.0, page_w * (1.0 - fraction))
    oy = rng.uniform(0.0, page_h * (1.0 - fraction))
    do_flip = rng.random() < params.flip_prob
    m = rotation_scale_matrix(angle, scale, page_w / 2.0, page_h / 2.0)
    if do_flip:
        m = flip_matrix(page_w) @ m
    m = crop_zoom_matrix(ox, oy, fraction) @ m
    return m


def transform_bbox(
    b: BoundingBox, t: np.ndarray, page_w: float, page_h: float
) -> BoundingBox | None:
    """Axis-aligned hull of the box's four transformed corners, clipped to
    the page. None when less than 20% of the transformed area survives the
    clip. Raises on a singular transform."""
    t = np.asarray(t, dtype=float)
    if t.shape == (2, 3):
        t = np.vstack([t, [0.0, 0.0, 1.0]])
    if t.shape != (3, 3):
        raise ValueError(f"expected a 2x3 or 3x3 affine matrix, got {t.shape}")
    if abs(np.linalg.det(t[:2, :2])) < 1e-12:
        raise ValueError("singular transform")
    corners = np.array(
        [
            [b.x_min, b.y_min, 1.0],
            [b.x_max, b.y_min, 1.0],
            [b.x_min, b.y_max, 1.0],
            [b.x_max, b.y_max, 1.0],
        ]
    )
    moved = corners @ t.T
    xs, ys = moved[:, 0], moved[:, 1]
    hull = (xs.min(), ys.min(), xs.max(), ys.max())
    hull_area = (hull[2] - hull[0]) * (hull[3] - hull[1])
    x0 = max(hull[0], 0.0)
    y0 = max(hull[1], 0.0)
    x1 = min(hull[2], float(page_w))
    y1 = min(hull[3], float(page_h))
    if x1 <= x0 or y1 <= y0:
        return None
    if (x1 - x0) * (y1 - y0) < 0.2 * hull_area:
        return None
    return BoundingBox(x0, y0, x1, y1)


def warp_image(page: PageImage, t: np.ndarray, out_w: int, out_h: int) -> PageImage:
    """Apply the affine transform to pixels (bilinear, white fill)."""
    inv = np.linalg.inv(t)
    # ndimage maps output (row, col) indices to input indices; pixel centers
    # sit at index + 0.5 in box coordinates.
    a = np.array([[inv[1, 1], inv[1, 0]], [inv[0, 1], inv[0, 0]]])
    offset = np.array(
        [
            inv[1, 0] * 0.5 + inv[1, 1] * 0.5 + inv[1, 2] - 0.5,
            inv[0, 0] * 0.5 + inv[0, 1] * 0.5 + inv[0, 2] - 0.5,
        ]
    )
    warped = ndimage.affine_transform(
        page.pixels.astype(np.float32),
        a,
        offset=offset,
        output_shape=(out_h, out_w),
        order=1,
        mode="constant",
        cval=255.0,
    )
    return PageImage(out_w, out_h, np.clip(np.rint(warped), 0, 255).astype(np.uint8))


def _optical_distortion(px: np.ndarray, amplitude: float, rng: random.Random) -> np.ndarray:
    h, w = px.shape
    amp = min(amplitude, _MAX_DISTORTION_PX * 0.95)
    wave_x = rng.uniform(200.0, 500.0)
    wave_y = rng.uniform(200.0, 500.0)
    phase_x = rng.uniform(0.0, 2 * math.pi)
    phase_y = rng.uniform(0.0, 2 * math.pi)
    rows = np.arange(h, dtype=np.float32)
    cols = np.arange(w, dtype=np.float32)
    dx = amp * np.sin(2 * math.pi * rows / wave_y + phase_y)  # shift per row
    dy = amp * np.sin(2 * math.pi * cols / wave_x + phase_x)  # shift per column
    coord_r = rows[:, None] + dy[None, :]
    coord_c = cols[None, :] + dx[:, None]
    out = ndimage.map_coordinates(
        px.astype(np.float32),
        [coord_r, coord_c],
        order=1,
        mode="constant",
        cval=255.0,
    )
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def augment(
    image: PageImage, annotation: PageAnnotation, params: AugmentParams
) -> tuple[PageImage, PageAnnotation]:
    """Augment one (image, annotation) pair; deterministic per params.seed.

    Elements whose boxes mostly leave the page are dropped; labels of
    surviving elements are untouched.
    """
    if (image.width, image.height) != (annotation.width, annotation.height):
        raise ValueError("image and annotation disagree on the page size")
    rng = random.Random(stable_seed(params.seed, "augment", annotation.page_id))
    t = draw_transform(params, image.width, image.height, rng)

    identity = np.allclose(t, np.eye(3), atol=1e-12)
    out_image = image.copy() if identity else warp_image(image, t, image.width, image.height)

    elements = []
    for box, label in annotation.elements:
        moved = box if identity else transform_bbox(box, t, image.width, image.height)
        if moved is not None:
            elements.append((moved, label))

    px = out_image.pixels
    if params.distortion_strength > 0:
        px = _optical_distortion(px, params.distortion_strength, rng)
    if params.blur_px >= 2:
        px = ndimage.uniform_filter(px.astype(np.float32), size=params.blur_px, mode="nearest")
        px = np.clip(np.rint(px), 0, 255).astype(np.uint8)
    if params.noise_std > 0:
        noise_rng = np.random.default_rng(stable_seed(params.seed, "noise", annotation.page_id))
        noisy = px.astype(np.float32) + noise_rng.normal(0.0, params.noise_std, px.shape)
        px = np.clip(np.rint(noisy), 0, 255).astype(np.uint8)

    return (
        PageImage(out_image.width, out_image.height, px),
        PageAnnotation(annotation.page_id, annotation.width, annotation.height, elements),
    )
