from schematik.synthgen.glyphs import GlyphAtlas, SymbolMap, default_symbol_map
from schematik.synthgen.pagegen import (
    GeneratedPage,
    LayoutFitError,
    SynthConfig,
    TranscriptEntry,
    generate_dataset,
    generate_page,
    load_transcripts,
    render_page,
)
from schematik.synthgen.textgen import TextPools, run_text, sample_text

__all__ = [
    "GeneratedPage",
    "GlyphAtlas",
    "LayoutFitError",
    "SymbolMap",
    "SynthConfig",
    "TextPools",
    "TranscriptEntry",
    "default_symbol_map",
    "generate_dataset",
    "generate_page",
    "load_transcripts",
    "render_page",
    "run_text",
    "sample_text",
]
