"""Text sampling for generated pages.

Pools mimic the source material: Central European surnames and forenames,
abbreviation fragments of the kind explained in the 1910 abbreviation list,
order/decoration names for large headings, municipality names and years for
small ones.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from schematik.corpus import LayoutClass

_SURNAMES = [
    "Aigner", "Bauer", "Berger", "Binder", "Brandstätter", "Czerny", "Deák",
    "Ebner", "Eder", "Egger", "Fekete", "Fischer", "Fuchs", "Gruber",
    "Haas", "Haider", "Horváth", "Huber", "Jelinek", "Kovács", "Krainer",
    "Lang", "Lehner", "Leitner", "Maier", "Mayrhofer", "Moser", "Müller",
    "Nagy", "Novak", "Pichler", "Pucher", "Reiter", "Schmid", "Schneider",
    "Schwarz", "Steiner", "Szabó", "Tóth", "Unger", "Wagner", "Wallner",
    "Weber", "Wieser", "Wimmer", "Winkler", "Wolf", "Zimmermann",
]

_FORENAMES = [
    "Adolf", "Alois", "Anton", "Béla", "Carl", "Eduard", "Emil", "Ferenc",
    "Franz", "Friedrich", "Georg", "Gustav", "Heinrich", "Hermann", "Hugo",
    "Ignaz", "István", "Johann", "Josef", "Karl", "Lajos", "Leopold",
    "Ludwig", "Moritz", "Otto", "Rudolf", "Theodor", "Viktor", "Wilhelm",
]

_ABBREVIATIONS = [
    "k. u. k. wirkl. geh. Rath", "Ritter d. eis. Krone", "Komthur d. Leop.-O.",
    "Gr.-Kr. d. St. Stephans-O.", "Inh. d. gold. Verd.-Kr.", "k. k. Hofrath",
    "Min.-Sekr. im Min. d. Inn.", "Landes-Ger.-Rath", "Bez.-Hauptm.",
    "Sekt.-Chef", "Statth.-Rath", "Ob.-Finanzrath", "Reg.-Rath", "Hofsekr.",
    "Präs. d. Land.-Ger.", "Vorst. d. Hilfsämter", "Adj. d. Staatsb.",
    "Dir. d. k. k. Staatsdr.", "Kanzl.-Offizial", "Rechn.-Revident",
    "em. Prof. d. Univ.", "Mitgl. d. Akad. d. Wiss.", "Dr. d. Rechte",
    "Ehrenbürger v. Wien", "Bes. d. Kriegsmed.", "Oberst d. R.",
    "Gen.-Major a. D.", "Konsist.-Rath", "Dompropst", "Landtagsabg.",
]

_ORDER_NAMES = [
    "Orden der Eisernen Krone", "Leopold-Orden", "Sankt Stephans-Orden",
    "Franz Joseph-Orden", "Verdienstkreuz mit der Krone",
    "Militär-Maria-Theresien-Orden", "Elisabeth-Orden",
    "Goldenes Verdienstkreuz", "Hofstaat Seiner Majestät",
    "Ministerium des Innern", "Ministerium der Finanzen",
    "Justiz-Ministerium",
]

_MUNICIPALITIES = [
    "Wien", "Graz", "Linz", "Salzburg", "Innsbruck", "Klagenfurt", "Brünn",
    "Prag", "Budapest", "Pressburg", "Lemberg", "Krakau", "Triest", "Laibach",
    "Czernowitz", "Agram", "Bozen", "Meran", "Steyr", "Wels", "Villach",
    "Leoben", "Baden", "Krems", "Eger", "Pilsen", "Olmütz", "Troppau",
]


@dataclass
class TextPools:
    surnames: list[str] = field(default_factory=lambda: list(_SURNAMES))
    forenames: list[str] = field(default_factory=lambda: list(_FORENAMES))
    abbreviations: list[str] = field(default_factory=lambda: list(_ABBREVIATIONS))
    order_names: list[str] = field(default_factory=lambda: list(_ORDER_NAMES))
    municipality_names: list[str] = field(default_factory=lambda: list(_MUNICIPALITIES))
    years: range = field(default_factory=lambda: range(1850, 1911))

    def __post_init__(self):
        for name in ("surnames", "forenames", "abbreviations", "order_names", "municipality_names"):
            pool = getattr(self, name)
            if not pool or any(not s for s in pool):
                raise ValueError(f"pool {name} must be a nonempty list of nonempty strings")
        if len(self.years) == 0:
            raise ValueError("years range is empty")

    def all_text(self) -> str:
        return "".join(
            "".join(pool)
            for pool in (
                self.surnames,
                self.forenames,
                self.abbreviations,
                self.order_names,
                self.municipality_names,
            )
        ) + "0123456789"


# A styled run: (text, style) with style in glyphs.STYLES.
StyledRun = tuple[str, str]


def sample_text(
    pools: TextPools,
    kind: LayoutClass,
    rng: random.Random,
    symbols: tuple[str, ...] = (),
    min_chars: int = 0,
) -> list[StyledRun]:
    """Draw styled text runs for one element of the given class.

    Paragraph-family samples start with a bold name and end with a period;
    name entries carry trailing page numbers. ``min_chars`` keeps drawing
    abbreviation fragments until the body reaches that length (used to force
    full-width paragraphs to wrap). Deterministic for a given rng state.
    """
    if kind in (LayoutClass.PARAGRAPH, LayoutClass.BIG_PARAGRAPH):
        name = rng.choice(pools.surnames)
        if rng.random() < 0.7:
            name += " " + rng.choice(pools.forenames)
        fragments = []
        for _ in range(rng.randint(1, 6)):
            frag = rng.choice(pools.abbreviations)
            if symbols and rng.random() < 0.25:
                frag = rng.choice(symbols) + " " + frag
            fragments.append(frag)
        while min_chars and len(name) + sum(len(f) + 2 for f in fragments) < min_chars:
            fragments.append(rng.choice(pools.abbreviations))
        body = ", ".join(fragments).rstrip(".,") + "."
        return [(name + ",", "bold"), (body, "regular")]
    if kind is LayoutClass.H1:
        return [(rng.choice(pools.order_names), "bold")]
    if kind is LayoutClass.H2:
        if rng.random() < 0.5:
            return [(str(rng.choice(list(pools.years))), "bold")]
        return [(rng.choice(pools.municipality_names), "bold")]
    if kind is LayoutClass.H3:
        return [(rng.choice(pools.municipality_names), "bold")]
    if kind is LayoutClass.H4:
        return [("(" + rng.choice(pools.municipality_names) + ")", "italic")]
    if kind is LayoutClass.NAME_ENTRY:
        name = rng.choice(pools.surnames)
        numbers = ", ".join(str(rng.randint(1, 999)) for _ in range(rng.randint(1, 3)))
        return [(name, "bold"), (numbers, "regular")]
    raise ValueError(f"no direct text sample for {kind}")


def run_text(runs: list[StyledRun]) -> str:
    """Plain transcription of styled runs (the OCR ground truth):
    whitespace-normalised words joined by single spaces."""
    words: list[str] = []
    for text, _ in runs:
        words.extend(text.split())
    return " ".join(words)
