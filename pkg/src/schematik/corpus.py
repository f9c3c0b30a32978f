"""Domain model for layout classes, annotations and detections, plus
dataset persistence: Pascal VOC XML, JSONL manifests, the detection
interchange format, stratified splitting, and bounding-box statistics.
"""

from __future__ import annotations

import enum
import json
import math
import random
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from schematik.geometry import BoundingBox


class LayoutClass(enum.Enum):
    """The eight structural roles a block on a page can have."""

    PARAGRAPH = "Paragraph"
    BIG_PARAGRAPH = "BigParagraph"
    H1 = "H1"
    H2 = "H2"
    H3 = "H3"
    H4 = "H4"
    NAME_ENTRY = "NameEntry"
    CURLY = "Curly"

    @classmethod
    def from_name(cls, name: str) -> "LayoutClass":
        for member in cls:
            if member.value == name:
                return member
        raise ValueError(f"unknown layout class name: {name!r}")


CLASS_ORDER: tuple[LayoutClass, ...] = tuple(LayoutClass)


@dataclass(frozen=True)
class Detection:
    box: BoundingBox
    label: LayoutClass
    confidence: float

    def __post_init__(self):
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")


@dataclass
class PageAnnotation:
    """Ground-truth labeled boxes for one page.

    ``elements`` keeps generator emission order, which for generated pages
    is the true reading order.
    """

    page_id: str
    width: int
    height: int
    elements: list[tuple[BoundingBox, LayoutClass]] = field(default_factory=list)

    def __post_init__(self):
        for box, label in self.elements:
            if box.x_min < 0 or box.y_min < 0 or box.x_max > self.width or box.y_max > self.height:
                raise ValueError(
                    f"element {label.value} box {box.as_tuple()} outside "
                    f"{self.width}x{self.height} page {self.page_id!r}"
                )

    def class_histogram(self) -> dict[LayoutClass, int]:
        hist: dict[LayoutClass, int] = {}
        for _, label in self.elements:
            hist[label] = hist.get(label, 0) + 1
        return hist


def check_containment(a: PageAnnotation) -> None:
    """Structural rule: only Curly boxes may fully contain sibling boxes."""
    for i, (box_i, label_i) in enumerate(a.elements):
        if label_i is LayoutClass.CURLY:
            continue
        for j, (box_j, label_j) in enumerate(a.elements):
            if i == j or label_j is LayoutClass.CURLY:
                continue
            if box_i.contains(box_j):
                raise ValueError(
                    f"non-Curly {label_i.value} box fully contains sibling "
                    f"{label_j.value} box on page {a.page_id!r}"
                )


# ---------------------------------------------------------------------------
# Pascal VOC XML


def write_voc(a: PageAnnotation, confidences: Sequence[float] | None = None) -> bytes:
    """Serialise an annotation to Pascal VOC XML.

    Coordinates are stored as integers: floor for min edges, ceil for max
    edges. ``confidences`` (optional, one per element) adds a confidence
    child to each object node, used when dumping detections.
    """
    if confidences is not None and len(confidences) != len(a.elements):
        raise ValueError("confidences length does not match element count")
    root = ET.Element("annotation")
    ET.SubElement(root, "folder").text = "images"
    ET.SubElement(root, "filename").text = f"{a.page_id}.png"
    size = ET.SubElement(root, "size")
    ET.SubElement(size, "width").text = str(int(a.width))
    ET.SubElement(size, "height").text = str(int(a.height))
    ET.SubElement(size, "depth").text = "1"
    for idx, (box, label) in enumerate(a.elements):
        obj = ET.SubElement(root, "object")
        ET.SubElement(obj, "name").text = label.value
        if confidences is not None:
            ET.SubElement(obj, "confidence").text = f"{confidences[idx]:.6f}"
        bnd = ET.SubElement(obj, "bndbox")
        ET.SubElement(bnd, "xmin").text = str(math.floor(box.x_min))
        ET.SubElement(bnd, "ymin").text = str(math.floor(box.y_min))
        ET.SubElement(bnd, "xmax").text = str(math.ceil(box.x_max))
        ET.SubElement(bnd, "ymax").text = str(math.ceil(box.y_max))
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


def read_voc(data: bytes) -> PageAnnotation:
    """Parse Pascal VOC XML back into a PageAnnotation.

    Rejects malformed XML, unknown class names and boxes outside the page.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise ValueError(f"malformed VOC XML: {exc}") from exc
    filename = root.findtext("filename", default="")
    page_id = Path(filename).stem if filename else ""
    size = root.find("size")
    if size is None:
        raise ValueError("VOC XML is missing the size node")
    width = int(size.findtext("width"))
    height = int(size.findtext("height"))
    elements: list[tuple[BoundingBox, LayoutClass]] = []
    for obj in root.findall("object"):
        name = obj.findtext("name")
        label = LayoutClass.from_name(name if name is not None else "")
        bnd = obj.find("bndbox")
        if bnd is None:
            raise ValueError(f"object {name!r} has no bndbox")
        box = BoundingBox(
            float(int(bnd.findtext("xmin"))),
            float(int(bnd.findtext("ymin"))),
            float(int(bnd.findtext("xmax"))),
            float(int(bnd.findtext("ymax"))),
        )
        elements.append((box, label))
    return PageAnnotation(page_id, width, height, elements)


# ---------------------------------------------------------------------------
# Dataset manifest (JSON Lines)

SPLIT_TAGS = ("train", "val", "test", "none")


@dataclass(frozen=True)
class ManifestEntry:
    page_id: str
    image_path: str
    annotation_path: str
    split_tag: str = "none"
    class_histogram: dict[LayoutClass, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.split_tag not in SPLIT_TAGS:
            raise ValueError(f"unknown split tag {self.split_tag!r}")


@dataclass
class DatasetManifest:
    entries: list[ManifestEntry] = field(default_factory=list)

    def __post_init__(self):
        ids = [e.page_id for e in self.entries]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate page_id in manifest")

    def __len__(self) -> int:
        return len(self.entries)


def write_manifest(m: DatasetManifest, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in m.entries:
            fh.write(
                json.dumps(
                    {
                        "page_id": e.page_id,
                        "image_path": e.image_path,
                        "annotation_path": e.annotation_path,
                        "split": e.split_tag,
                        "class_histogram": {k.value: v for k, v in e.class_histogram.items()},
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def read_manifest(path: str | Path) -> DatasetManifest:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            hist = {LayoutClass.from_name(k): int(v) for k, v in rec["class_histogram"].items()}
            entries.append(
                ManifestEntry(
                    rec["page_id"],
                    rec["image_path"],
                    rec["annotation_path"],
                    rec.get("split", "none"),
                    hist,
                )
            )
    return DatasetManifest(entries)


# ---------------------------------------------------------------------------
# Detection interchange JSON


def detections_to_payload(per_page: dict[str, list[Detection]]) -> list[dict]:
    payload = []
    for page_id in sorted(per_page):
        for d in per_page[page_id]:
            payload.append(
                {
                    "page_id": page_id,
                    "label": d.label.value,
                    "confidence": d.confidence,
                    "box": [d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max],
                }
            )
    return payload


def validate_detections_payload(payload) -> None:
    """Validate the interchange schema; raises ValueError with the first
    offending record."""
    if not isinstance(payload, list):
        raise ValueError("detection interchange payload must be a JSON array")
    for i, rec in enumerate(payload):
        if not isinstance(rec, dict):
            raise ValueError(f"record {i}: not an object")
        for key in ("page_id", "label", "confidence", "box"):
            if key not in rec:
                raise ValueError(f"record {i}: missing key {key!r}")
        if not isinstance(rec["page_id"], str):
            raise ValueError(f"record {i}: page_id must be a string")
        LayoutClass.from_name(rec["label"])
        conf = rec["confidence"]
        if not isinstance(conf, (int, float)) or not (0.0 <= float(conf) <= 1.0):
            raise ValueError(f"record {i}: confidence {conf!r} not in [0, 1]")
        box = rec["box"]
        if (
            not isinstance(box, list)
            or len(box) != 4
            or not all(isinstance(v, (int, float)) and math.isfinite(v) for v in box)
        ):
            raise ValueError(f"record {i}: box must be [x_min, y_min, x_max, y_max]")
        if not (box[0] < box[2] and box[1] < box[3]):
            raise ValueError(f"record {i}: degenerate box {box}")


def payload_to_detections(payload) -> dict[str, list[Detection]]:
    validate_detections_payload(payload)
    out: dict[str, list[Detection]] = {}
    for rec in payload:
        det = Detection(
            BoundingBox(*[float(v) for v in rec["box"]]),
            LayoutClass.from_name(rec["label"]),
            float(rec["confidence"]),
        )
        out.setdefault(rec["page_id"], []).append(det)
    return out


def write_detections_json(per_page: dict[str, list[Detection]], path: str | Path) -> None:
    Path(path).write_text(json.dumps(detections_to_payload(per_page), indent=1), encoding="utf-8")


def read_detections_json(path: str | Path) -> dict[str, list[Detection]]:
    return payload_to_detections(json.loads(Path(path).read_text(encoding="utf-8")))


# ---------------------------------------------------------------------------
# Stratified split


def stratified_split(m: DatasetManifest, train_fraction: float, seed: int) -> DatasetManifest:
    """Tag every entry train or val, keeping per-class element proportions
    close to ``train_fraction``.

    Pages are assigned greedily, always working on the class with the most
    unassigned elements and giving its heaviest unassigned page to the side
    whose deficit for that class is larger. A page budget of
    round(train_fraction * n_pages) pins the page-count split. Deterministic
    for a given seed.
    """
    if not (0.0 < train_fraction < 1.0):
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = len(m.entries)
    if n < 2:
        raise ValueError("need at least 2 pages to split")

    budget_train = min(max(int(math.floor(train_fraction * n + 0.5)), 1), n - 1)
    totals: dict[LayoutClass, int] = {c: 0 for c in CLASS_ORDER}
    for e in m.entries:
        for c, k in e.class_histogram.items():
            totals[c] += k

    rng = random.Random(seed)
    tie_order = sorted(e.page_id for e in m.entries)
    rng.shuffle(tie_order)
    tie_rank = {pid: i for i, pid in enumerate(tie_order)}

    unassigned = {e.page_id: e for e in m.entries}
    train_cnt = {c: 0 for c in CLASS_ORDER}
    val_cnt = {c: 0 for c in CLASS_ORDER}
    n_train = n_val = 0
    tags: dict[str, str] = {}

    while unassigned:
        remaining = {
            c: totals[c] - train_cnt[c] - val_cnt[c]
            for c in CLASS_ORDER
        }
        focus = max(CLASS_ORDER, key=lambda c: remaining[c])
        if remaining[focus] <= 0:
            focus = None
            candidates = list(unassigned.values())
        else:
            candidates = [e for e in unassigned.values() if e.class_histogram.get(focus, 0) > 0]
        page = max(
            candidates,
            key=lambda e: (
                e.class_histogram.get(focus, 0) if focus else 0,
                -tie_rank[e.page_id],
            ),
        )

        if n_train >= budget_train:
            to_train = False
        elif n_val >= n - budget_train:
            to_train = True
        elif focus is None:
            to_train = (budget_train - n_train) >= ((n - budget_train) - n_val)
        else:
            deficit_train = train_fraction * totals[focus] - train_cnt[focus]
            deficit_val = (1.0 - train_fraction) * totals[focus] - val_cnt[focus]
            to_train = deficit_train >= deficit_val

        tags[page.page_id] = "train" if to_train else "val"
        if to_train:
            n_train += 1
            for c, k in page.class_histogram.items():
                train_cnt[c] += k
        else:
            n_val += 1
            for c, k in page.class_histogram.items():
                val_cnt[c] += k
        del unassigned[page.page_id]

    return DatasetManifest([replace(e, split_tag=tags[e.page_id]) for e in m.entries])


# ---------------------------------------------------------------------------
# Bounding-box statistics


@dataclass(frozen=True)
class BBoxStats:
    """Per-dataset aspect-ratio (width/height) and scale (sqrt area, px)
    statistics over every annotated element."""

    ratio_min: float
    ratio_mean: float
    ratio_max: float
    scale_min: float
    scale_mean: float
    scale_max: float

    def __post_init__(self):
        if not (self.ratio_min <= self.ratio_mean <= self.ratio_max):
            raise ValueError("ratio stats out of order")
        if not (self.scale_min <= self.scale_mean <= self.scale_max):
            raise ValueError("scale stats out of order")


def bbox_stats(annotations: Iterable[PageAnnotation]) -> BBoxStats:
    ratios: list[float] = []
    scales: list[float] = []
    for a in annotations:
        for box, _ in a.elements:
            ratios.append(box.width / box.height)
            scales.append(math.sqrt(box.width * box.height))
    if not ratios:
        raise ValueError("no elements in dataset")
    return BBoxStats(
        min(ratios),
        sum(ratios) / len(ratios),
        max(ratios),
        min(scales),
        sum(scales) / len(scales),
        max(scales),
    )


def load_annotations(m: DatasetManifest, root: str | Path) -> list[PageAnnotation]:
    """Read every annotation file referenced by a manifest (paths are
    relative to the dataset root)."""
    root = Path(root)
    return [read_voc((root / e.annotation_path).read_bytes()) for e in m.entries]


def dataset_bbox_stats(m: DatasetManifest, root: str | Path) -> BBoxStats:
    return bbox_stats(load_annotations(m, root))
