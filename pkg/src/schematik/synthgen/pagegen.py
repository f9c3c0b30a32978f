"""Deterministic page layout engine and dataset writer.

Pages are rendered bottom-up from sampled text: full-width elements (H1,
BigParagraph) cut the page into horizontal bands, column elements fill the
bands down-then-across. Every annotation box is the tight hull of the
element's rendered ink expanded by one pixel, and elements are emitted in
reading order.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from schematik.corpus import (
    DatasetManifest,
    LayoutClass,
    ManifestEntry,
    PageAnnotation,
    write_manifest,
    write_voc,
)
from schematik.geometry import BoundingBox
from schematik.raster import PageImage, write_png
from schematik.synthgen.glyphs import GlyphAtlas, SymbolMap, default_symbol_map
from schematik.synthgen.textgen import StyledRun, TextPools, run_text, sample_text


class LayoutFitError(ValueError):
    """Raised when the configured fonts cannot fit the configured geometry."""


DEFAULT_CLASS_WEIGHTS: dict[LayoutClass, float] = {
    LayoutClass.PARAGRAPH: 56.0,
    LayoutClass.NAME_ENTRY: 9.0,
    LayoutClass.H2: 7.0,
    LayoutClass.H3: 7.0,
    LayoutClass.H4: 5.0,
    LayoutClass.H1: 6.0,
    LayoutClass.BIG_PARAGRAPH: 4.0,
    LayoutClass.CURLY: 6.0,
}


@dataclass
class SynthConfig:
    page_w: int = 1405
    page_h: int = 1988
    column_count: int = 3
    margin: int = 72
    column_gap: int = 28
    h1_scale: int = 4
    h2_scale: int = 3
    body_scale: int = 2  # paragraphs, H3, H4, NameEntry
    hanging_indent: int = 24
    class_weights: dict[LayoutClass, float] = field(
        default_factory=lambda: dict(DEFAULT_CLASS_WEIGHTS)
    )
    seed: int = 0

    def __post_init__(self):
        if self.page_w < 100 or self.page_h < 100:
            raise ValueError("page too small")
        if not 1 <= self.column_count <= 4:
            raise ValueError("column_count must be between 1 and 4")
        if not (self.h1_scale > self.h2_scale > 0 and self.h2_scale > self.body_scale >= 1):
            raise ValueError("font scales must satisfy h1 > h2 > body >= 1")
        if self.margin < 4 or self.column_gap < 0 or self.hanging_indent < 0:
            raise ValueError("bad margins/gaps")
        if self.column_width < 8 * 6 * self.body_scale:
            raise ValueError("columns do not fit within the margins")
        weights = dict(self.class_weights)
        if any(w < 0 for w in weights.values()) or not any(w > 0 for w in weights.values()):
            raise ValueError("class weights must be nonnegative and not all zero")
        self.class_weights = weights

    @property
    def text_width(self) -> int:
        return self.page_w - 2 * self.margin

    @property
    def column_width(self) -> int:
        k = self.column_count
        return (self.text_width - (k - 1) * self.column_gap) // k

    def column_x(self, i: int) -> int:
        return self.margin + i * (self.column_width + self.column_gap)

    def to_dict(self) -> dict:
        d = {
            k: getattr(self, k)
            for k in (
                "page_w", "page_h", "column_count", "margin", "column_gap",
                "h1_scale", "h2_scale", "body_scale", "hanging_indent", "seed",
            )
        }
        d["class_weights"] = {c.value: w for c, w in self.class_weights.items()}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SynthConfig":
        d = dict(d)
        if "class_weights" in d:
            d["class_weights"] = {
                LayoutClass.from_name(k): float(v) for k, v in d["class_weights"].items()
            }
        return cls(**d)


def load_config(path: str | Path) -> SynthConfig:
    return SynthConfig.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# ---------------------------------------------------------------------------
# Canvas


class _Canvas:
    def __init__(self, w: int, h: int, capture: bool):
        self.w = w
        self.h = h
        self.px = np.full((h, w), 255, dtype=np.uint8)
        self.capture = capture
        self._bounds: list[int] | None = None
        self._blits: list[tuple[int, int, np.ndarray]] = []

    def begin(self):
        self._bounds = None
        self._blits = []

    def blit(self, x: int, y: int, bitmap: np.ndarray):
        if bitmap.size == 0 or not bitmap.any():
            return
        bh, bw = bitmap.shape
        if x < 0 or y < 0 or x + bw > self.w or y + bh > self.h:
            raise LayoutFitError(f"ink at ({x},{y}) size {bw}x{bh} leaves the page")
        self.px[y : y + bh, x : x + bw][bitmap] = 0
        rows = np.flatnonzero(bitmap.any(axis=1))
        cols = np.flatnonzero(bitmap.any(axis=0))
        x0, x1 = x + cols[0], x + cols[-1] + 1
        y0, y1 = y + rows[0], y + rows[-1] + 1
        if self._bounds is None:
            self._bounds = [x0, y0, x1, y1]
        else:
            b = self._bounds
            b[0] = min(b[0], x0)
            b[1] = min(b[1], y0)
            b[2] = max(b[2], x1)
            b[3] = max(b[3], y1)
        if self.capture:
            self._blits.append((x, y, bitmap))

    def end(self) -> tuple[tuple[int, int, int, int], np.ndarray | None]:
        if self._bounds is None:
            raise LayoutFitError("element produced no ink")
        x0, y0, x1, y1 = self._bounds
        mask = None
        if self.capture:
            # mask covers the annotation box (hull + 1px margin); blit
            # bitmaps may carry blank margins past the tight bounds, so clip
            mx0, my0 = x0 - 1, y0 - 1
            mask = np.zeros((y1 - y0 + 2, x1 - x0 + 2), dtype=bool)
            for bx, by, bm in self._blits:
                tx0, ty0 = max(bx, mx0), max(by, my0)
                tx1 = min(bx + bm.shape[1], x1 + 1)
                ty1 = min(by + bm.shape[0], y1 + 1)
                if tx1 <= tx0 or ty1 <= ty0:
                    continue
                mask[ty0 - my0 : ty1 - my0, tx0 - mx0 : tx1 - mx0] |= bm[
                    ty0 - by : ty1 - by, tx0 - bx : tx1 - bx
                ]
        return (x0, y0, x1, y1), mask


@dataclass
class _Element:
    label: LayoutClass
    box: BoundingBox
    text: str
    mask: np.ndarray | None


def _finish(canvas: _Canvas, label: LayoutClass, text: str) -> _Element:
    (x0, y0, x1, y1), mask = canvas.end()
    return _Element(label, BoundingBox(x0 - 1, y0 - 1, x1 + 1, y1 + 1), text, mask)


# ---------------------------------------------------------------------------
# Token layout

Token = tuple[str, str]  # (word, style)


def _tokens(runs: list[StyledRun]) -> list[Token]:
    return [(word, style) for text, style in runs for word in text.split()]


def _line_chars(line: list[Token]) -> list[tuple[str, str]]:
    chars: list[tuple[str, str]] = []
    for k, (word, style) in enumerate(line):
        if k:
            chars.append((" ", "regular"))
        chars.extend((ch, style) for ch in word)
    return chars


def _wrap(atlas: GlyphAtlas, tokens: list[Token], scale: int, first_w: int, rest_w: int) -> list[list[Token]]:
    lines: list[list[Token]] = []
    cur: list[Token] = []
    avail = first_w
    for word, style in tokens:
        w = atlas.text_width(word, style, scale)
        if w > max(first_w, rest_w):
            raise LayoutFitError(f"word {word!r} is wider than the column at this font size")
        trial = cur + [(word, style)]
        if cur and atlas.chars_width(_line_chars(trial), scale) > avail:
            lines.append(cur)
            cur = [(word, style)]
            avail = rest_w
            if w > avail:
                raise LayoutFitError(f"word {word!r} does not fit the continuation line")
        else:
            cur = trial
    if cur:
        lines.append(cur)
    return lines


def _render_chars(canvas: _Canvas, atlas: GlyphAtlas, chars, x: int, y: int, scale: int) -> int:
    for ch, style in chars:
        g = atlas.glyph(ch, style, scale)
        canvas.blit(x, y, g.bitmap)
        x += g.advance
    return x


def _render_line(
    canvas: _Canvas,
    atlas: GlyphAtlas,
    line: list[Token],
    x: int,
    y: int,
    scale: int,
    justify_to: int | None = None,
) -> None:
    """Render one wrapped line; when ``justify_to`` is set and the slack is
    moderate, stretch the inter-word gaps to fill that width exactly."""
    natural = atlas.chars_width(_line_chars(line), scale)
    gaps = len(line) - 1
    extra = 0
    if justify_to is not None and gaps > 0:
        slack = justify_to - natural
        if 0 < slack <= 0.25 * justify_to:
            extra = slack
    base, rem = (divmod(extra, gaps)) if gaps else (0, 0)
    space = atlas.glyph(" ", "regular", scale).advance
    cx = x
    for k, (word, style) in enumerate(line):
        if k:
            cx += space + base + (1 if k <= rem else 0)
        for ch in word:
            g = atlas.glyph(ch, style, scale)
            canvas.blit(cx, y, g.bitmap)
            cx += g.advance


# ---------------------------------------------------------------------------
# Element renderers (measure first, then draw at a fixed origin)


class _Renderer:
    def __init__(self, cfg: SynthConfig, atlas: GlyphAtlas, pools: TextPools, rng: random.Random, capture: bool):
        self.cfg = cfg
        self.atlas = atlas
        self.pools = pools
        self.rng = rng
        self.canvas = _Canvas(cfg.page_w, cfg.page_h, capture)
        self.symbols = atlas.symbol_map.characters()

    def line_height(self, scale: int) -> int:
        return self.atlas.line_height(scale)

    # -- measuring

    def paragraph_lines(self, tokens, width: int, scale: int, inverted: bool):
        indent = self.cfg.hanging_indent
        usable = width - 3  # keep the +1px hull inside the column
        first_w = (usable - indent) if inverted else usable
        rest_w = usable if inverted else (usable - indent)
        return _wrap(self.atlas, tokens, scale, first_w, rest_w)

    def heading_lines(self, tokens, width: int, scale: int):
        usable = width - 3
        return _wrap(self.atlas, tokens, scale, usable, usable)

    # -- drawing

    def draw_paragraph(self, tokens, x0: int, width: int, y0: int, scale: int, inverted: bool) -> int:
        lines = self.paragraph_lines(tokens, width, scale, inverted)
        lh = self.line_height(scale)
        indent = self.cfg.hanging_indent
        usable = width - 3
        for i, line in enumerate(lines):
            indented = (i == 0) if inverted else (i > 0)
            x = x0 + (indent if indented else 0)
            line_w = (usable - indent) if indented else usable
            last = i == len(lines) - 1
            _render_line(
                self.canvas, self.atlas, line, x, y0 + i * lh, scale,
                justify_to=None if last else line_w,
            )
        return len(lines) * lh

    def draw_heading(self, tokens, x0: int, width: int, y0: int, scale: int) -> int:
        lines = self.heading_lines(tokens, width, scale)
        lh = self.line_height(scale)
        for i, line in enumerate(lines):
            chars = _line_chars(line)
            w = self.atlas.chars_width(chars, scale)
            _render_chars(self.canvas, self.atlas, chars, x0 + (width - w) // 2, y0 + i * lh, scale)
        return len(lines) * lh

    def draw_h1(self, tokens, x0: int, width: int, y0: int) -> int:
        """Centered heading flanked by horizontal rules out to the text edges."""
        scale = self.cfg.h1_scale
        lines = self.heading_lines(tokens, width, scale)
        lh = self.line_height(scale)
        for i, line in enumerate(lines):
            chars = _line_chars(line)
            w = self.atlas.chars_width(chars, scale)
            tx = x0 + (width - w) // 2
            _render_chars(self.canvas, self.atlas, chars, tx, y0 + i * lh, scale)
            if i == 0:
                rule_y = y0 + (7 * scale) // 2
                rule = np.ones((max(2, scale // 2), 1), dtype=bool)
                pad = 3 * scale
                left_w = tx - pad - x0
                right_x = tx + w + pad
                right_w = x0 + width - right_x
                if left_w > 0:
                    self.canvas.blit(x0, rule_y, np.ones((rule.shape[0], left_w), dtype=bool))
                if right_w > 0:
                    self.canvas.blit(right_x, rule_y, np.ones((rule.shape[0], right_w), dtype=bool))
        return len(lines) * lh

    def draw_name_entry(self, name_tokens, num_tokens, x0: int, width: int, y0: int, scale: int) -> int:
        usable = width - 3
        lh = self.line_height(scale)
        name_chars = _line_chars(name_tokens)
        num_chars = _line_chars(num_tokens)
        name_w = self.atlas.chars_width(name_chars, scale)
        num_w = self.atlas.chars_width(num_chars, scale)
        space_w = self.atlas.glyph(" ", "regular", scale).advance
        _render_chars(self.canvas, self.atlas, name_chars, x0, y0, scale)
        if name_w + space_w + num_w <= usable:
            _render_chars(self.canvas, self.atlas, num_chars, x0 + usable - num_w, y0, scale)
            return lh
        _render_chars(self.canvas, self.atlas, num_chars, x0 + usable - num_w, y0 + lh, scale)
        return 2 * lh

    def name_entry_height(self, name_tokens, num_tokens, width: int, scale: int) -> int:
        usable = width - 3
        name_w = self.atlas.chars_width(_line_chars(name_tokens), scale)
        num_w = self.atlas.chars_width(_line_chars(num_tokens), scale)
        space_w = self.atlas.glyph(" ", "regular", scale).advance
        lh = self.line_height(scale)
        return lh if name_w + space_w + num_w <= usable else 2 * lh

    def draw_brace(self, x: int, y0: int, y1: int, scale: int):
        t = max(2, scale)
        hook = 4 * scale
        self.canvas.blit(x, y0, np.ones((y1 - y0, t), dtype=bool))
        self.canvas.blit(x - hook, y0, np.ones((t, hook), dtype=bool))
        self.canvas.blit(x - hook, y1 - t, np.ones((t, hook), dtype=bool))
        mid = y0 + (y1 - y0) // 2
        self.canvas.blit(x + t, mid - t // 2, np.ones((t, 3 * scale), dtype=bool))


# ---------------------------------------------------------------------------
# Page assembly


@dataclass
class GeneratedPage:
    image: PageImage
    annotation: PageAnnotation
    texts: list[str]  # aligned with annotation.elements, reading order
    inks: list[np.ndarray] | None  # per-element ink masks, box-local, when captured


def render_page(
    cfg: SynthConfig,
    page_id: str = "page",
    pools: TextPools | None = None,
    symbol_map: SymbolMap | None = None,
    capture_ink: bool = False,
) -> GeneratedPage:
    """Render one page. Fully determined by (cfg, pools, symbol map)."""
    pools = pools if pools is not None else TextPools()
    atlas = GlyphAtlas(symbol_map if symbol_map is not None else default_symbol_map())
    missing = atlas.missing(pools.all_text())
    if missing:
        raise ValueError(f"text pools use characters without glyphs: {sorted(missing)!r}")

    rng = random.Random(cfg.seed)
    r = _Renderer(cfg, atlas, pools, rng, capture_ink)

    body = cfg.body_scale
    lh_body = r.line_height(body)
    gap_elem = max(6, lh_body // 2)
    gap_band = lh_body

    kinds = [c for c, w in cfg.class_weights.items() if w > 0]
    weights = [cfg.class_weights[c] for c in kinds]

    bottom_limit = cfg.page_h - cfg.margin
    band_top = cfg.margin
    band_max_y = cfg.margin  # lowest ink bottom of the current band
    col = 0
    col_y = cfg.margin
    elements: list[_Element] = []
    full = False

    def place_column_element(kind: LayoutClass) -> bool:
        """Returns False when the page is full (element discarded)."""
        nonlocal col, col_y, band_max_y
        x_width = cfg.column_width
        if kind is LayoutClass.CURLY:
            produced = _make_curly(r, rng, pools, x_width)
        else:
            produced = _make_column_element(r, rng, pools, kind, x_width)
        height = produced.height
        while True:
            if col_y + height <= bottom_limit:
                new_elems = produced.draw(cfg.column_x(col), col_y)
                elements.extend(new_elems)
                col_y += height + gap_elem
                band_max_y = max(band_max_y, max(e.box.y_max for e in new_elems))
                return True
            col += 1
            col_y = band_top
            if col >= cfg.column_count:
                return False

    def place_full_width(kind: LayoutClass) -> bool:
        nonlocal band_top, band_max_y, col, col_y
        y = band_max_y + (gap_band if elements else 0)
        # BigParagraph must always wrap so its justified first line spans the
        # text width (it is a reading-order band separator).
        min_chars = (
            int(1.35 * (cfg.text_width - 3 - cfg.hanging_indent) / (6 * body))
            if kind is LayoutClass.BIG_PARAGRAPH
            else 0
        )
        runs = sample_text(pools, kind, rng, r.symbols, min_chars=min_chars)
        tokens = _tokens(runs)
        r.canvas.begin()
        if kind is LayoutClass.H1:
            lines = r.heading_lines(tokens, cfg.text_width, cfg.h1_scale)
            height = len(lines) * r.line_height(cfg.h1_scale)
            if y + height > bottom_limit:
                return False
            r.draw_h1(tokens, cfg.margin, cfg.text_width, y)
        else:  # BigParagraph
            lines = r.paragraph_lines(tokens, cfg.text_width, body, inverted=True)
            height = len(lines) * lh_body
            if y + height > bottom_limit:
                return False
            r.draw_paragraph(tokens, cfg.margin, cfg.text_width, y, body, inverted=True)
        elements.append(_finish(r.canvas, kind, run_text(runs)))
        band_top = int(elements[-1].box.y_max) + gap_band
        band_max_y = band_top
        col = 0
        col_y = band_top
        return True

    while not full:
        kind = rng.choices(kinds, weights)[0]
        if kind in (LayoutClass.H1, LayoutClass.BIG_PARAGRAPH):
            if not place_full_width(kind):
                full = True
        else:
            if not place_column_element(kind):
                full = True

    if not elements:
        raise LayoutFitError("configuration cannot fit a single element on the page")

    annotation = PageAnnotation(
        page_id,
        cfg.page_w,
        cfg.page_h,
        [(e.box, e.label) for e in elements],
    )
    image = PageImage(cfg.page_w, cfg.page_h, r.canvas.px)
    inks = [e.mask for e in elements] if capture_ink else None
    return GeneratedPage(image, annotation, [e.text for e in elements], inks)


def generate_page(cfg: SynthConfig) -> tuple[PageImage, PageAnnotation]:
    page = render_page(cfg)
    return page.image, page.annotation


@dataclass
class _Pending:
    height: int
    draw: object  # callable (x0, y0) -> list[_Element]


def _make_column_element(r: _Renderer, rng: random.Random, pools: TextPools, kind: LayoutClass, width: int) -> _Pending:
    cfg = r.cfg
    runs = sample_text(pools, kind, rng, r.symbols)
    text = run_text(runs)

    if kind is LayoutClass.PARAGRAPH:
        tokens = _tokens(runs)
        height = len(r.paragraph_lines(tokens, width, cfg.body_scale, False)) * r.line_height(cfg.body_scale)

        def draw(x0, y0):
            r.canvas.begin()
            r.draw_paragraph(tokens, x0, width, y0, cfg.body_scale, inverted=False)
            return [_finish(r.canvas, kind, text)]

    elif kind in (LayoutClass.H2, LayoutClass.H3, LayoutClass.H4):
        scale = cfg.h2_scale if kind is LayoutClass.H2 else cfg.body_scale
        tokens = _tokens(runs)
        height = len(r.heading_lines(tokens, width, scale)) * r.line_height(scale)

        def draw(x0, y0):
            r.canvas.begin()
            r.draw_heading(tokens, x0, width, y0, scale)
            return [_finish(r.canvas, kind, text)]

    elif kind is LayoutClass.NAME_ENTRY:
        name_tokens = _tokens(runs[:1])
        num_tokens = _tokens(runs[1:])
        height = r.name_entry_height(name_tokens, num_tokens, width, cfg.body_scale)

        def draw(x0, y0):
            r.canvas.begin()
            r.draw_name_entry(name_tokens, num_tokens, x0, width, y0, cfg.body_scale)
            return [_finish(r.canvas, kind, text)]

    else:
        raise ValueError(f"{kind} is not a column element")

    return _Pending(height, draw)


def _make_curly(r: _Renderer, rng: random.Random, pools: TextPools, width: int) -> _Pending:
    """A brace grouping 2-3 paragraphs with one H3 keyword at its right."""
    cfg = r.cfg
    body = cfg.body_scale
    lh = r.line_height(body)
    usable = width - 3
    hook = 4 * body
    spur = 3 * body
    brace_t = max(2, body)
    para_w = int(usable * 0.58)
    brace_x_off = para_w + hook + 2
    h3_x_off = brace_x_off + brace_t + spur + 2 * body
    h3_w = usable - h3_x_off

    member_runs = [sample_text(pools, LayoutClass.PARAGRAPH, rng, r.symbols) for _ in range(rng.randint(2, 3))]
    h3_runs = sample_text(pools, LayoutClass.H3, rng, r.symbols)
    member_tokens = [_tokens(runs) for runs in member_runs]
    h3_tokens = _tokens(h3_runs)

    member_gap = max(4, lh // 3)
    member_heights = [
        len(r.paragraph_lines(t, para_w + 3, body, False)) * lh for t in member_tokens
    ]
    h3_height = len(r.heading_lines(h3_tokens, h3_w + 3, body)) * lh
    group_h = sum(member_heights) + member_gap * (len(member_heights) - 1)
    height = max(group_h, h3_height)

    def draw(x0, y0):
        produced: list[_Element] = []
        y = y0
        for tokens, runs, h in zip(member_tokens, member_runs, member_heights):
            r.canvas.begin()
            r.draw_paragraph(tokens, x0, para_w + 3, y, body, inverted=False)
            produced.append(_finish(r.canvas, LayoutClass.PARAGRAPH, run_text(runs)))
            y += h + member_gap
        ink_top = int(min(e.box.y_min for e in produced)) + 1
        ink_bot = int(max(e.box.y_max for e in produced)) - 1
        r.canvas.begin()
        r.draw_brace(x0 + brace_x_off, ink_top, ink_bot, body)
        brace = _finish(r.canvas, LayoutClass.CURLY, "")
        r.canvas.begin()
        h3_y = y0 + max(0, (group_h - h3_height) // 2)
        r.draw_heading(h3_tokens, x0 + h3_x_off, h3_w + 3, h3_y, body)
        produced.append(_finish(r.canvas, LayoutClass.H3, run_text(h3_runs)))
        members = sorted(produced, key=lambda e: (e.box.y_min, e.box.x_min))
        curly_box = BoundingBox(
            min(brace.box.x_min, *(e.box.x_min for e in members)),
            min(brace.box.y_min, *(e.box.y_min for e in members)),
            max(brace.box.x_max, *(e.box.x_max for e in members)),
            max(brace.box.y_max, *(e.box.y_max for e in members)),
        )
        curly = _Element(LayoutClass.CURLY, curly_box, "", brace.mask)
        return [curly] + members

    return _Pending(height, draw)


# ---------------------------------------------------------------------------
# Dataset generation


@dataclass(frozen=True)
class TranscriptEntry:
    order_index: int
    label: LayoutClass
    box: BoundingBox
    text: str


def write_transcripts(pages: dict[str, list[TranscriptEntry]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for page_id in sorted(pages):
            for t in pages[page_id]:
                fh.write(
                    json.dumps(
                        {
                            "page_id": page_id,
                            "order_index": t.order_index,
                            "label": t.label.value,
                            "box": list(t.box.as_tuple()),
                            "text": t.text,
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )


def load_transcripts(path: str | Path) -> dict[str, list[TranscriptEntry]]:
    pages: dict[str, list[TranscriptEntry]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            pages.setdefault(rec["page_id"], []).append(
                TranscriptEntry(
                    int(rec["order_index"]),
                    LayoutClass.from_name(rec["label"]),
                    BoundingBox(*rec["box"]),
                    rec["text"],
                )
            )
    for entries in pages.values():
        entries.sort(key=lambda t: t.order_index)
    return pages


def generate_dataset(
    cfg: SynthConfig,
    n_pages: int,
    out_dir: str | Path,
    pools: TextPools | None = None,
    emit_pgm: bool = False,
) -> DatasetManifest:
    """Write n pages (PNG + VOC XML), a transcripts JSONL and a manifest.

    Page i uses seed cfg.seed + i, so reruns are byte-identical.
    """
    if n_pages < 1:
        raise ValueError("n_pages must be >= 1")
    out = Path(out_dir)
    (out / "images").mkdir(parents=True, exist_ok=True)
    (out / "annotations").mkdir(parents=True, exist_ok=True)

    entries = []
    transcripts: dict[str, list[TranscriptEntry]] = {}
    for i in range(n_pages):
        page_id = f"page_{i:05d}"
        page_cfg = replace(cfg, seed=cfg.seed + i)
        page = render_page(page_cfg, page_id=page_id, pools=pools)
        image_rel = f"images/{page_id}.png"
        ann_rel = f"annotations/{page_id}.xml"
        write_png(page.image, out / image_rel)
        if emit_pgm:
            from schematik.raster import write_pgm

            write_pgm(page.image, out / "images" / f"{page_id}.pgm")
        (out / ann_rel).write_bytes(write_voc(page.annotation))
        transcripts[page_id] = [
            TranscriptEntry(k, label, box, text)
            for k, ((box, label), text) in enumerate(
                zip(page.annotation.elements, page.texts)
            )
        ]
        entries.append(
            ManifestEntry(
                page_id,
                image_rel,
                ann_rel,
                "none",
                page.annotation.class_histogram(),
            )
        )

    manifest = DatasetManifest(entries)
    write_manifest(manifest, out / "manifest.jsonl")
    write_transcripts(transcripts, out / "transcripts.jsonl")
    (out / "generation.json").write_text(
        json.dumps({"n_pages": n_pages, "config": cfg.to_dict()}, indent=1, sort_keys=True),
        encoding="utf-8",
    )
    return manifest
