"""OCR engine abstraction.

Two engines ship here: a deterministic mock that corrupts known ground-truth
text through a character channel (closing the loop without a real engine),
and an external-process adapter driven by a command template, e.g. a
fine-tuned Tesseract via ``SCHEMATIK_OCR_CMD``.
"""

from __future__ import annotations

import os
import random
import shlex
import string
import subprocess
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

from schematik.corpus import LayoutClass
from schematik.geometry import BoundingBox, iou
from schematik.raster import write_png
from schematik.seeding import stable_seed
from schematik.snippets import Snippet
from schematik.synthgen.pagegen import TranscriptEntry

_ALPHABET = string.ascii_letters + string.digits + " .,-:;()"


class OcrEngineError(RuntimeError):
    pass


@dataclass
class OcrResult:
    page_id: str
    order_index: int
    label: LayoutClass
    text: str
    engine_id: str
    error: str | None = None


@dataclass(frozen=True)
class CorruptionModel:
    """Independent per-character channel: delete, substitute (uniform over a
    fixed alphabet minus the original), then insert after the position."""

    substitution_rate: float = 0.0
    insertion_rate: float = 0.0
    deletion_rate: float = 0.0
    scramble_full_pages: bool = False
    seed: int = 0

    def __post_init__(self):
        for name in ("substitution_rate", "insertion_rate", "deletion_rate"):
            v = getattr(self, name)
            if not (0.0 <= v < 1.0):
                raise ValueError(f"{name} must be in [0, 1), got {v}")


def mock_ocr(true_text: str, model: CorruptionModel, rng: random.Random | None = None) -> str:
    """Corrupt a string through the channel; deterministic per model seed."""
    if rng is None:
        rng = random.Random(stable_seed(model.seed, "mock", true_text))
    out: list[str] = []
    for ch in true_text:
        if rng.random() < model.deletion_rate:
            pass
        elif rng.random() < model.substitution_rate:
            pool = _ALPHABET.replace(ch, "") if ch in _ALPHABET else _ALPHABET
            out.append(rng.choice(pool))
        else:
            out.append(ch)
        if rng.random() < model.insertion_rate:
            out.append(rng.choice(_ALPHABET))
    return "".join(out)


def full_page_mock(
    blocks: Sequence[tuple[BoundingBox, str]],
    model: CorruptionModel,
    page_id: str = "",
) -> str:
    """Simulate full-page OCR: when scramble_full_pages is set, blocks are
    emitted row-major (line-interleaved across columns, sorted by y then x)
    instead of reading order, then the page text runs through the channel."""
    if not blocks:
        raise ValueError("full_page_mock needs at least one block")
    ordered = (
        sorted(blocks, key=lambda bt: (bt[0].y_min, bt[0].x_min))
        if model.scramble_full_pages
        else list(blocks)
    )
    text = "\n".join(t for _, t in ordered)
    return mock_ocr(text, model, random.Random(stable_seed(model.seed, "fullpage", page_id)))


class OcrEngine(Protocol):
    engine_id: str

    def recognize(self, snippet: Snippet) -> str: ...


class MockOcrEngine:
    """Looks up each snippet's true text by box overlap against the page
    transcript and passes it through the corruption channel. Snippets with
    no overlapping ground truth return an empty string."""

    engine_id = "mock"

    def __init__(self, truth: dict[str, list[TranscriptEntry]], model: CorruptionModel):
        self.truth = truth
        self.model = model

    def recognize(self, snippet: Snippet) -> str:
        entries = self.truth.get(snippet.page_id, [])
        best_text = ""
        best_iou = 0.0
        for entry in entries:
            score = iou(entry.box, snippet.source_box)
            if score > best_iou:
                best_iou = score
                best_text = entry.text
        rng = random.Random(
            stable_seed(self.model.seed, "snippet", snippet.page_id, snippet.order_index)
        )
        return mock_ocr(best_text, self.model, rng)


class ExternalOcrEngine:
    """Runs one external process per snippet from a command template with
    {input} and {output} placeholders; the engine must write UTF-8 plain
    text to {output}. Nonzero exit raises OcrEngineError for that snippet."""

    ENV_VAR = "SCHEMATIK_OCR_CMD"

    def __init__(self, command_template: str | None = None, engine_id: str = "external"):
        if command_template is None:
            command_template = os.environ.get(self.ENV_VAR)
        if not command_template:
            raise ValueError(
                f"no OCR command template (pass one or set {self.ENV_VAR})"
            )
        if "{input}" not in command_template or "{output}" not in command_template:
            raise ValueError("command template needs {input} and {output} placeholders")
        self.command_template = command_template
        self.engine_id = engine_id

    def recognize(self, snippet: Snippet) -> str:
        with tempfile.TemporaryDirectory(prefix="schematik_ocr_") as td:
            in_path = Path(td) / "snippet.png"
            out_path = Path(td) / "snippet.txt"
            write_png(snippet.image, in_path)
            cmd = [
                part.format(input=str(in_path), output=str(out_path))
                for part in shlex.split(self.command_template)
            ]
            proc = subprocess.run(cmd, capture_output=True, text=True)
            if proc.returncode != 0:
                raise OcrEngineError(
                    f"OCR command failed ({proc.returncode}): {proc.stderr.strip()[:500]}"
                )
            if not out_path.exists():
                raise OcrEngineError("OCR command produced no output file")
            return out_path.read_text(encoding="utf-8").rstrip("\n")


def ocr(snippets: Sequence[Snippet], engine: OcrEngine, workers: int = 1) -> list[OcrResult]:
    """Recognise an ordered snippet list; one result per snippet, order
    preserved. Per-snippet engine failures are reported in the result's
    error field and the run continues."""
    indices = [s.order_index for s in snippets]
    if indices != sorted(indices):
        raise ValueError("snippets must be ordered by order_index")

    def run(s: Snippet) -> OcrResult:
        try:
            text = engine.recognize(s)
            return OcrResult(s.page_id, s.order_index, s.label, text, engine.engine_id)
        except Exception as exc:  # engine/IO failure is a per-snippet event
            return OcrResult(s.page_id, s.order_index, s.label, "", engine.engine_id, str(exc))

    if workers > 1 and len(snippets) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, snippets))
    return [run(s) for s in snippets]


def write_results_jsonl(results: Sequence[OcrResult], path: str | Path) -> None:
    import json

    with open(path, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(
                json.dumps(
                    {
                        "page_id": r.page_id,
                        "order_index": r.order_index,
                        "label": r.label.value,
                        "text": r.text,
                        "engine_id": r.engine_id,
                        "error": r.error,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
