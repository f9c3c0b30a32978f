"""Detection cleanup: confidence filtering and IoU-driven box merging.

Merging runs to a fixpoint with a deterministic visit order, so the result
does not depend on the order detections arrive in. Curly detections never
participate: legitimately enclosing other boxes, they would swallow their
members.
"""

from __future__ import annotations

from typing import Sequence

from schematik.corpus import Detection, LayoutClass
from schematik.geometry import iou, union_box

CONFIDENCE_THRESHOLD = 0.1
MERGE_IOU_THRESHOLD = 0.3
_MAX_PASSES = 16


def filter_confidence(
    dets: Sequence[Detection], threshold: float = CONFIDENCE_THRESHOLD
) -> list[Detection]:
    """Drop detections with confidence strictly below ``threshold``;
    input order is preserved."""
    return [d for d in dets if d.confidence >= threshold]


def _canonical_key(d: Detection):
    return (-d.confidence, d.box.x_min, d.box.y_min, d.label.value)


def merge_overlapping(
    dets: Sequence[Detection], iou_threshold: float = MERGE_IOU_THRESHOLD
) -> list[Detection]:
    """Merge groups of non-Curly detections whose IoU is strictly above
    ``iou_threshold``.

    Detections are visited in descending confidence (ties by x_min, then
    y_min); each visit gathers every unconsumed detection overlapping the
    current one, replaces the group by its union box and keeps the group's
    highest-confidence label. Passes repeat until nothing merges. The output
    is canonically ordered, so any permutation of the input produces the
    same list.
    """
    curly = [d for d in dets if d.label is LayoutClass.CURLY]
    rest = [d for d in dets if d.label is not LayoutClass.CURLY]

    for _ in range(_MAX_PASSES):
        rest.sort(key=_canonical_key)
        consumed = [False] * len(rest)
        merged: list[Detection] = []
        changed = False
        for i, d in enumerate(rest):
            if consumed[i]:
                continue
            group = [i] + [
                j
                for j in range(len(rest))
                if j != i and not consumed[j] and iou(d.box, rest[j].box) > iou_threshold
            ]
            for j in group:
                consumed[j] = True
            if len(group) == 1:
                merged.append(d)
                continue
            changed = True
            members = [rest[j] for j in group]
            best = min(members, key=_canonical_key)
            merged.append(Detection(union_box([m.box for m in members]), best.label, best.confidence))
        rest = merged
        if not changed:
            break

    out = rest + curly
    out.sort(key=_canonical_key)
    return out
