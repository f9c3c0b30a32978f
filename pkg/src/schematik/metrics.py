"""Evaluation mathematics: edit-distance error rates, detection matching,
classification metrics, confusion matrices, confidence statistics, and
improvement percentages.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Sequence

import numpy as np

from schematik import kernels
from schematik.corpus import CLASS_ORDER, Detection, LayoutClass, PageAnnotation
from schematik.geometry import iou

MATCH_IOU_FLOOR = 0.25


# ---------------------------------------------------------------------------
# Edit distance, CER, WER


@dataclass(frozen=True)
class EditCounts:
    """Insertion/deletion/substitution counts of one minimal alignment,
    with the reference length the rates are normalised by."""

    insertions: int
    deletions: int
    substitutions: int
    ref_length: int

    def __post_init__(self):
        if min(self.insertions, self.deletions, self.substitutions, self.ref_length) < 0:
            raise ValueError("edit counts must be non-negative")
        if self.deletions + self.substitutions > self.ref_length:
            raise ValueError("deletions + substitutions cannot exceed the reference length")

    @property
    def total(self) -> int:
        return self.insertions + self.deletions + self.substitutions


def _token_ids(ref: Sequence[Hashable], hyp: Sequence[Hashable]) -> tuple[np.ndarray, np.ndarray]:
    vocab: dict[Hashable, int] = {}
    def ids(tokens):
        out = np.empty(len(tokens), dtype=np.int32)
        for i, t in enumerate(tokens):
            out[i] = vocab.setdefault(t, len(vocab))
        return out
    return ids(ref), ids(hyp)


def edit_counts(ref: Sequence[Hashable], hyp: Sequence[Hashable]) -> EditCounts:
    """Minimal-cost alignment counts between token sequences.

    Among the minimal alignments, the one with the most substitutions is
    reported; together with the fixed length difference this pins down the
    insertion and deletion counts, so results are deterministic and swapping
    the arguments swaps insertions with deletions.
    """
    ref_ids, hyp_ids = _token_ids(ref, hyp)
    total, subs = kernels.edit_costs(ref_ids, hyp_ids)
    total = int(total)
    subs = int(subs)
    delta = len(hyp) - len(ref)
    insertions = (total - subs + delta) // 2
    deletions = (total - subs - delta) // 2
    return EditCounts(insertions, deletions, subs, len(ref))


def cer(ref: str, hyp: str) -> float:
    """Character error rate (insertions + deletions + substitutions over
    reference character count). May exceed 1.0. Raises on an empty reference."""
    if len(ref) == 0:
        raise ValueError("CER needs a non-empty reference")
    return edit_counts(ref, hyp).total / len(ref)


def wer(ref: str, hyp: str) -> float:
    """Word error rate: CER arithmetic over whitespace-delimited tokens.
    Raises when the reference contains no words."""
    ref_words = ref.split()
    hyp_words = hyp.split()
    if not ref_words:
        raise ValueError("WER needs a reference with at least one word")
    return edit_counts(ref_words, hyp_words).total / len(ref_words)


# ---------------------------------------------------------------------------
# Detection matching


@dataclass
class MatchResult:
    """Greedy best-IoU matching between ground truth and predictions."""

    gt_labels: list[LayoutClass]
    pred_labels: list[LayoutClass]
    pred_confidences: list[float]
    pairs: list[tuple[int, int, float]]  # (gt index, pred index, IoU)
    unmatched_gt: list[int]
    unmatched_pred: list[int]

    @property
    def n_decisions(self) -> int:
        return len(self.pairs) + len(self.unmatched_gt) + len(self.unmatched_pred)


def match_detections(
    gt: PageAnnotation,
    preds: Sequence[Detection],
    iou_floor: float = MATCH_IOU_FLOOR,
) -> MatchResult:
    """Match each ground-truth box to its best unconsumed prediction,
    greedily over descending IoU; candidates below ``iou_floor`` stay
    unmatched (false negatives / false positives)."""
    candidates = []
    for gi, (gbox, _) in enumerate(gt.elements):
        for pi, det in enumerate(preds):
            score = iou(gbox, det.box)
            if score >= iou_floor:
                candidates.append((-score, gi, pi))
    candidates.sort()

    gt_free = set(range(len(gt.elements)))
    pred_free = set(range(len(preds)))
    pairs = []
    for neg_score, gi, pi in candidates:
        if gi in gt_free and pi in pred_free:
            pairs.append((gi, pi, -neg_score))
            gt_free.discard(gi)
            pred_free.discard(pi)
    return MatchResult(
        gt_labels=[label for _, label in gt.elements],
        pred_labels=[d.label for d in preds],
        pred_confidences=[d.confidence for d in preds],
        pairs=pairs,
        unmatched_gt=sorted(gt_free),
        unmatched_pred=sorted(pred_free),
    )


def bbox_accuracy(match: MatchResult) -> float:
    """Mean IoU of best matches over all ground-truth boxes; unmatched
    ground truth counts as 0."""
    n_gt = len(match.gt_labels)
    if n_gt == 0:
        raise ValueError("bbox accuracy needs at least one ground-truth element")
    return sum(score for _, _, score in match.pairs) / n_gt


# ---------------------------------------------------------------------------
# Classification metrics


@dataclass(frozen=True)
class ClassificationCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0


@dataclass(frozen=True)
class ClassificationScores:
    accuracy: float
    precision: float
    recall: float
    f1: float


def classification_counts(match: MatchResult) -> dict[LayoutClass, ClassificationCounts]:
    """One-vs-rest counts per class. Matched pairs contribute TP (labels
    agree) or FP+FN (disagree); unmatched predictions are FPs of their
    class, unmatched ground truth FNs of theirs."""
    total = match.n_decisions
    tp = {c: 0 for c in CLASS_ORDER}
    fp = {c: 0 for c in CLASS_ORDER}
    fn = {c: 0 for c in CLASS_ORDER}
    for gi, pi, _ in match.pairs:
        g, p = match.gt_labels[gi], match.pred_labels[pi]
        if g is p:
            tp[g] += 1
        else:
            fp[p] += 1
            fn[g] += 1
    for pi in match.unmatched_pred:
        fp[match.pred_labels[pi]] += 1
    for gi in match.unmatched_gt:
        fn[match.gt_labels[gi]] += 1
    return {
        c: ClassificationCounts(tp[c], fp[c], total - tp[c] - fp[c] - fn[c], fn[c])
        for c in CLASS_ORDER
    }


def classification_metrics(match: MatchResult) -> ClassificationScores:
    """Micro accuracy plus macro-averaged precision/recall/F1 over the
    classes present in the ground truth or the predictions."""
    if match.n_decisions == 0:
        raise ValueError("no decisions to score")
    correct = sum(
        1 for gi, pi, _ in match.pairs if match.gt_labels[gi] is match.pred_labels[pi]
    )
    accuracy = correct / match.n_decisions

    counts = classification_counts(match)
    present = [
        c
        for c in CLASS_ORDER
        if c in match.gt_labels or c in match.pred_labels
    ]
    precisions, recalls, f1s = [], [], []
    for c in present:
        k = counts[c]
        prec = k.tp / (k.tp + k.fp) if k.tp + k.fp else 0.0
        rec = k.tp / (k.tp + k.fn) if k.tp + k.fn else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        precisions.append(prec)
        recalls.append(rec)
        f1s.append(f1)
    n = len(present)
    return ClassificationScores(
        accuracy, sum(precisions) / n, sum(recalls) / n, sum(f1s) / n
    )


@dataclass
class ConfusionMatrix:
    """Row-normalised confusion over matched pairs: rows are ground-truth
    classes, columns predicted; each nonempty row sums to one."""

    classes: tuple[LayoutClass, ...]
    rows: list[list[float]]
    row_counts: list[int]

    def row(self, c: LayoutClass) -> list[float]:
        return self.rows[self.classes.index(c)]


def confusion_matrix(match: MatchResult) -> ConfusionMatrix:
    if not match.pairs:
        raise ValueError("confusion matrix needs at least one matched pair")
    index = {c: i for i, c in enumerate(CLASS_ORDER)}
    counts = [[0] * len(CLASS_ORDER) for _ in CLASS_ORDER]
    for gi, pi, _ in match.pairs:
        counts[index[match.gt_labels[gi]]][index[match.pred_labels[pi]]] += 1
    rows = []
    row_counts = []
    for row in counts:
        total = sum(row)
        row_counts.append(total)
        rows.append([v / total for v in row] if total else [0.0] * len(row))
    return ConfusionMatrix(CLASS_ORDER, rows, row_counts)


@dataclass(frozen=True)
class ConfidenceStats:
    """Average prediction confidence for one class: over any prediction,
    over correct ones, and over incorrect ones (None when absent)."""

    any: float | None = None
    correct: float | None = None
    incorrect: float | None = None


def confidence_stats(match: MatchResult) -> dict[LayoutClass, ConfidenceStats]:
    by_class: dict[LayoutClass, dict[str, list[float]]] = {}
    def bucket(c):
        return by_class.setdefault(c, {"any": [], "correct": [], "incorrect": []})

    for pi, label in enumerate(match.pred_labels):
        bucket(label)["any"].append(match.pred_confidences[pi])
    for gi, pi, _ in match.pairs:
        p = match.pred_labels[pi]
        key = "correct" if match.gt_labels[gi] is p else "incorrect"
        bucket(p)[key].append(match.pred_confidences[pi])

    def mean(v):
        return sum(v) / len(v) if v else None

    return {
        c: ConfidenceStats(mean(b["any"]), mean(b["correct"]), mean(b["incorrect"]))
        for c, b in by_class.items()
    }


def improvement(old_rate: float, new_rate: float) -> float:
    """Relative improvement in percent: 100 * (old - new) / old."""
    if old_rate <= 0:
        raise ValueError(f"improvement needs old_rate > 0, got {old_rate}")
    return 100.0 * (old_rate - new_rate) / old_rate


# ---------------------------------------------------------------------------
# Evaluation reports

_SCALAR_FIELDS = ("accuracy", "precision", "recall", "f1", "bbox_accuracy", "cer", "wer")


@dataclass
class EvalReport:
    """Scalar metrics of one page or one aggregated run, plus optional
    confusion/confidence detail."""

    accuracy: float | None = None
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None
    bbox_accuracy: float | None = None
    cer: float | None = None
    wer: float | None = None
    confusion: ConfusionMatrix | None = None
    confidence: dict[LayoutClass, ConfidenceStats] | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in _SCALAR_FIELDS}
        if self.confusion is not None:
            out["confusion"] = {
                "classes": [c.value for c in self.confusion.classes],
                "rows": self.confusion.rows,
                "row_counts": self.confusion.row_counts,
            }
        if self.confidence is not None:
            out["confidence"] = {
                c.value: [s.any, s.correct, s.incorrect] for c, s in self.confidence.items()
            }
        if self.extra:
            out["extra"] = self.extra
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        rep = cls(**{k: d.get(k) for k in _SCALAR_FIELDS})
        if "confusion" in d:
            rep.confusion = ConfusionMatrix(
                tuple(LayoutClass.from_name(c) for c in d["confusion"]["classes"]),
                d["confusion"]["rows"],
                d["confusion"]["row_counts"],
            )
        if "confidence" in d:
            rep.confidence = {
                LayoutClass.from_name(c): ConfidenceStats(*v) for c, v in d["confidence"].items()
            }
        rep.extra = d.get("extra", {})
        return rep


def evaluate_detections(gt: PageAnnotation, preds: Sequence[Detection]) -> EvalReport:
    """Full detection-side report for one page."""
    match = match_detections(gt, preds)
    scores = classification_metrics(match)
    return EvalReport(
        accuracy=scores.accuracy,
        precision=scores.precision,
        recall=scores.recall,
        f1=scores.f1,
        bbox_accuracy=bbox_accuracy(match),
        confusion=confusion_matrix(match) if match.pairs else None,
        confidence=confidence_stats(match),
    )


def mean_reports(reports: Sequence[EvalReport]) -> EvalReport:
    """Average the scalar metrics over pages (fields missing everywhere
    stay None; fields present on some pages average over those pages)."""
    if not reports:
        raise ValueError("nothing to aggregate")
    out = EvalReport()
    for name in _SCALAR_FIELDS:
        values = [getattr(r, name) for r in reports if getattr(r, name) is not None]
        if values:
            setattr(out, name, sum(values) / len(values))
    out.extra = {"pages": len(reports)}
    return out


def write_reports_json(reports: dict[str, EvalReport], path: str | Path) -> None:
    payload = {page_id: rep.to_dict() for page_id, rep in sorted(reports.items())}
    Path(path).write_text(json.dumps(payload, indent=1), encoding="utf-8")


def read_reports_json(path: str | Path) -> dict[str, EvalReport]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return {page_id: EvalReport.from_dict(d) for page_id, d in payload.items()}


def write_reports_csv(reports: dict[str, EvalReport], path: str | Path) -> None:
    """Per-page CSV for spreadsheet comparison."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["page_id", *_SCALAR_FIELDS])
        for page_id in sorted(reports):
            rep = reports[page_id]
            writer.writerow(
                [page_id]
                + [
                    "" if getattr(rep, k) is None else f"{getattr(rep, k):.6f}"
                    for k in _SCALAR_FIELDS
                ]
            )
