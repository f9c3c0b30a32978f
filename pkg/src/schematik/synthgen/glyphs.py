"""Embedded glyph atlas for the page renderer.

Glyphs are 5x7 dot-matrix patterns, upscaled by an integer factor per font
size. Bold widens strokes by one base pixel, italic shears rows. Decoration
symbols live in the private-use area (U+E000..) and are wired up through a
SymbolMap. Visual fidelity to the historical typeface is a non-goal; the
contract is deterministic, measurable ink.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

STYLES = ("regular", "bold", "italic")

# fmt: off
_P = {
    "A": ("..#..", ".#.#.", "#...#", "#...#", "#####", "#...#", "#...#"),
    "B": ("####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."),
    "C": (".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."),
    "D": ("####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####."),
    "E": ("#####", "#....", "#....", "####.", "#....", "#....", "#####"),
    "F": ("#####", "#....", "#....", "####.", "#....", "#....", "#...."),
    "G": (".####", "#....", "#....", "#.###", "#...#", "#...#", ".###."),
    "H": ("#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "I": (".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "J": ("..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."),
    "K": ("#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"),
    "L": ("#....", "#....", "#....", "#....", "#....", "#....", "#####"),
    "M": ("#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"),
    "N": ("#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#", "#...#"),
    "O": (".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "P": ("####.", "#...#", "#...#", "####.", "#....", "#....", "#...."),
    "Q": (".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"),
    "R": ("####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"),
    "S": (".####", "#....", "#....", ".###.", "....#", "....#", "####."),
    "T": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."),
    "U": ("#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "V": ("#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."),
    "W": ("#...#", "#...#", "#...#", "#.#.#", "#.#.#", "##.##", "#...#"),
    "X": ("#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"),
    "Y": ("#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."),
    "Z": ("#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"),
    "a": (".....", ".....", ".###.", "....#", ".####", "#...#", ".####"),
    "b": ("#....", "#....", "####.", "#...#", "#...#", "#...#", "####."),
    "c": (".....", ".....", ".###.", "#....", "#....", "#...#", ".###."),
    "d": ("....#", "....#", ".####", "#...#", "#...#", "#...#", ".####"),
    "e": (".....", ".....", ".###.", "#...#", "#####", "#....", ".###."),
    "f": ("..##.", ".#...", "####.", ".#...", ".#...", ".#...", ".#..."),
    "g": (".....", ".####", "#...#", "#...#", ".####", "....#", ".###."),
    "h": ("#....", "#....", "####.", "#...#", "#...#", "#...#", "#...#"),
    "i": ("..#..", ".....", ".##..", "..#..", "..#..", "..#..", ".###."),
    "j": ("...#.", ".....", "..##.", "...#.", "...#.", "#..#.", ".##.."),
    "k": ("#....", "#....", "#..#.", "#.#..", "##...", "#.#..", "#..#."),
    "l": (".##..", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "m": (".....", ".....", "##.#.", "#.#.#", "#.#.#", "#.#.#", "#...#"),
    "n": (".....", ".....", "####.", "#...#", "#...#", "#...#", "#...#"),
    "o": (".....", ".....", ".###.", "#...#", "#...#", "#...#", ".###."),
    "p": (".....", "####.", "#...#", "#...#", "####.", "#....", "#...."),
    "q": (".....", ".####", "#...#", "#...#", ".####", "....#", "....#"),
    "r": (".....", ".....", "#.##.", "##...", "#....", "#....", "#...."),
    "s": (".....", ".....", ".####", "#....", ".###.", "....#", "####."),
    "t": (".#...", ".#...", "####.", ".#...", ".#...", ".#..#", "..##."),
    "u": (".....", ".....", "#...#", "#...#", "#...#", "#..##", ".##.#"),
    "v": (".....", ".....", "#...#", "#...#", "#...#", ".#.#.", "..#.."),
    "w": (".....", ".....", "#...#", "#.#.#", "#.#.#", "#.#.#", ".#.#."),
    "x": (".....", ".....", "#...#", ".#.#.", "..#..", ".#.#.", "#...#"),
    "y": (".....", "#...#", "#...#", ".#.#.", "..#..", ".#...", "#...."),
    "z": (".....", ".....", "#####", "...#.", "..#..", ".#...", "#####"),
    "0": (".###.", "#..##", "#.#.#", "##..#", "#...#", "#...#", ".###."),
    "1": ("..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "2": (".###.", "#...#", "....#", "..##.", ".#...", "#....", "#####"),
    "3": ("#####", "...#.", "..#..", "...#.", "....#", "#...#", ".###."),
    "4": ("...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."),
    "5": ("#####", "#....", "####.", "....#", "....#", "#...#", ".###."),
    "6": ("..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."),
    "7": ("#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."),
    "8": (".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."),
    "9": (".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."),
    ".": (".....", ".....", ".....", ".....", ".....", ".##..", ".##.."),
    ",": (".....", ".....", ".....", ".....", ".##..", "..#..", ".#..."),
    "-": (".....", ".....", ".....", ".###.", ".....", ".....", "....."),
    "'": ("..#..", "..#..", ".....", ".....", ".....", ".....", "....."),
    ":": (".....", ".##..", ".##..", ".....", ".##..", ".##..", "....."),
    ";": (".....", ".##..", ".##..", ".....", ".##..", "..#..", ".#..."),
    "(": ("...#.", "..#..", ".#...", ".#...", ".#...", "..#..", "...#."),
    ")": (".#...", "..#..", "...#.", "...#.", "...#.", "..#..", ".#..."),
    "/": ("....#", "...#.", "...#.", "..#..", ".#...", ".#...", "#...."),
    "&": (".##..", "#..#.", "#..#.", ".##..", "#.#.#", "#..#.", ".##.#"),
    "Ä": (".#.#.", ".###.", "#...#", "#####", "#...#", "#...#", "#...#"),
    "Ö": (".#.#.", ".###.", "#...#", "#...#", "#...#", "#...#", ".###."),
    "Ü": (".#.#.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "ä": (".#.#.", ".....", ".###.", "....#", ".####", "#...#", ".####"),
    "ö": (".#.#.", ".....", ".###.", "#...#", "#...#", "#...#", ".###."),
    "ü": (".#.#.", ".....", "#...#", "#...#", "#...#", "#..##", ".##.#"),
    "ß": (".##..", "#..#.", "#.#..", "#..#.", "#...#", "#...#", "#.##."),
    "á": ("...#.", "..#..", ".###.", "....#", ".####", "#...#", ".####"),
    "é": ("...#.", "..#..", ".###.", "#...#", "#####", "#....", ".###."),
    "í": ("...#.", "..#..", ".##..", "..#..", "..#..", "..#..", ".###."),
    "ó": ("...#.", "..#..", ".###.", "#...#", "#...#", "#...#", ".###."),
    # decoration symbols, private-use area
    "": ("..#..", "..#..", "#####", "..#..", "..#..", "..#..", "....."),
    "": ("..#..", "#.#.#", ".###.", "#####", ".###.", "#.#.#", "..#.."),
    "": ("..#..", ".#.#.", "#...#", ".#.#.", "..#..", ".....", "....."),
    "": (".###.", "#...#", "#.#.#", "#...#", ".###.", ".....", "....."),
    "": (".#.#.", "#####", ".#.#.", "#####", ".#.#.", ".....", "....."),
    "": ("#.#.#", "#####", ".###.", ".###.", "#####", ".....", "....."),
}
# fmt: on

for _ch, _rows in _P.items():
    if len(_rows) != 7 or any(len(r) != 5 for r in _rows):
        raise AssertionError(f"malformed glyph pattern for {_ch!r}")

BASE_HEIGHT = 7
BASE_WIDTH = 5
_LEADING = 3  # base pixels between lines
_TRACKING = 1  # base pixels between glyphs


@dataclass(frozen=True)
class SymbolMap:
    """Decoration-symbol identifiers mapped to private-use code points."""

    mapping: dict[str, str]

    def __post_init__(self):
        targets = list(self.mapping.values())
        if len(set(targets)) != len(targets):
            raise ValueError("symbol map must be injective")
        for name, ch in self.mapping.items():
            if ch not in _P:
                raise ValueError(f"symbol {name!r} maps to unrenderable {ch!r}")

    def characters(self) -> tuple[str, ...]:
        return tuple(self.mapping[k] for k in sorted(self.mapping))


def default_symbol_map() -> SymbolMap:
    return SymbolMap(
        {
            "cross": "",
            "star": "",
            "diamond": "",
            "orb": "",
            "lattice": "",
            "crown": "",
        }
    )


@dataclass(frozen=True)
class Glyph:
    bitmap: np.ndarray  # bool, shape (height, width); may be empty for space
    advance: int


class GlyphAtlas:
    """Renders code points to monochrome bitmaps at integer scales."""

    def __init__(self, symbol_map: SymbolMap | None = None):
        self.symbol_map = symbol_map if symbol_map is not None else default_symbol_map()
        self._cache: dict[tuple[str, str, int], Glyph] = {}

    def has(self, ch: str) -> bool:
        return ch == " " or ch in _P

    def missing(self, text: str) -> set[str]:
        return {ch for ch in text if not self.has(ch)}

    def line_height(self, scale: int) -> int:
        return (BASE_HEIGHT + _LEADING) * scale

    def glyph(self, ch: str, style: str, scale: int) -> Glyph:
        if style not in STYLES:
            raise ValueError(f"unknown style {style!r}")
        if scale < 1:
            raise ValueError("scale must be >= 1")
        key = (ch, style, scale)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        if ch == " ":
            g = Glyph(np.zeros((BASE_HEIGHT * scale, 0), dtype=bool), (BASE_WIDTH - 1) * scale)
        else:
            rows = _P.get(ch)
            if rows is None:
                raise KeyError(f"no glyph for {ch!r}")
            base = np.array([[c == "#" for c in r] for r in rows], dtype=bool)
            if style == "bold":
                widened = np.zeros((BASE_HEIGHT, BASE_WIDTH + 1), dtype=bool)
                widened[:, :BASE_WIDTH] |= base
                widened[:, 1:] |= base
                base = widened
            elif style == "italic":
                sheared = np.zeros((BASE_HEIGHT, BASE_WIDTH + 2), dtype=bool)
                for r in range(BASE_HEIGHT):
                    shift = (BASE_HEIGHT - 1 - r) // 3
                    sheared[r, shift : shift + BASE_WIDTH] = base[r]
                base = sheared
            bitmap = np.kron(base, np.ones((scale, scale), dtype=bool))
            g = Glyph(bitmap, (base.shape[1] + _TRACKING) * scale)
        self._cache[key] = g
        return g

    def text_width(self, text: str, style: str, scale: int) -> int:
        if not text:
            return 0
        width = 0
        for ch in text:
            width += self.glyph(ch, style, scale).advance
        return width - _TRACKING * scale  # no tracking after the last glyph

    def chars_width(self, chars: list[tuple[str, str]], scale: int) -> int:
        """Width of a styled character sequence [(char, style), ...]."""
        if not chars:
            return 0
        width = 0
        for ch, style in chars:
            width += self.glyph(ch, style, scale).advance
        return width - _TRACKING * scale
