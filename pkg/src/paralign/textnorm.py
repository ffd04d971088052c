"""Turn raw extracted plain text into clean, paragraph-segmented, tokenized documents.

The cleaning contract is deliberately small: format-control characters are
stripped, paragraphs are split on blank lines, and tokens are case-folded
words with their letter counts. Everything downstream (table flattening,
LCS matching, hit rates) relies on this one normalization.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field

_PARA_SPLIT = re.compile(r"\n{2,}")


def normalize_newlines(text: str) -> str:
    """Map CRLF and lone CR to LF."""
    return text.replace("\r\n", "\n").replace("\r", "\n")


def strip_format_controls(text: str) -> str:
    """Remove Unicode format-control characters (category Cf).

    Covers zero-width space/joiner/non-joiner, directional marks such as
    U+200E, soft hyphens, and byte-order marks. All other characters are
    preserved in order. Idempotent.
    """
    drop = {ord(ch): None for ch in set(text) if unicodedata.category(ch) == "Cf"}
    return text.translate(drop) if drop else text


def split_paragraphs(text: str) -> list[str]:
    """Split on runs of two or more newlines, trim pieces, drop empties."""
    return [piece for _, piece in split_paragraphs_indexed(text)]


def split_paragraphs_indexed(text: str) -> list[tuple[int, str]]:
    """Like split_paragraphs, but each piece keeps its pre-drop ordinal.

    The ordinal counts every piece produced by the split, including ones
    later dropped for being empty, so callers can trace a dense paragraph
    index back to its position in the raw text.
    """
    if not text:
        return []
    out = []
    for ordinal, piece in enumerate(_PARA_SPLIT.split(normalize_newlines(text))):
        piece = piece.strip()
        if piece:
            out.append((ordinal, piece))
    return out


@dataclass(frozen=True, slots=True)
class Token:
    """A normalized word and its letter count (the L(w) of the hit-rate formula)."""

    surface: str
    letters: int


def _letter_count(s: str) -> int:
    return sum(1 for ch in s if unicodedata.category(ch).startswith("L"))


def tokenize(paragraph_text: str) -> list[Token]:
    """Whitespace-split, case-fold, trim edge punctuation, drop letterless pieces.

    Letter counts use Unicode letter categories only, so digits and symbols
    never inflate them; pieces with zero letters (numbers, bare punctuation)
    produce no token at all.
    """
    tokens = []
    for piece in paragraph_text.split():
        piece = piece.casefold()
        start, end = 0, len(piece)
        while start < end and unicodedata.category(piece[start]).startswith("P"):
            start += 1
        while end > start and unicodedata.category(piece[end - 1]).startswith("P"):
            end -= 1
        surface = piece[start:end]
        if not surface:
            continue
        letters = _letter_count(surface)
        if letters:
            tokens.append(Token(surface, letters))
    return tokens


@dataclass
class Paragraph:
    index: int
    text: str
    tokens: list[Token] = field(default_factory=list)

    @property
    def letter_total(self) -> int:
        return sum(t.letters for t in self.tokens)


@dataclass
class Document:
    """One language version of one record symbol, as ordered paragraphs.

    Paragraph indices are dense 0..m-1. ``source_indices`` maps each dense
    index back to the raw split ordinal (paragraphs that normalized to
    nothing are dropped, so the two numberings can differ).
    """

    symbol: str
    lang: str
    paragraphs: list[Paragraph]
    source_indices: list[int] = field(default_factory=list)

    @classmethod
    def from_text(cls, symbol: str, lang: str, raw: str) -> "Document":
        cleaned = strip_format_controls(raw)
        paragraphs = []
        source_indices = []
        for ordinal, piece in split_paragraphs_indexed(cleaned):
            paragraphs.append(Paragraph(len(paragraphs), piece, tokenize(piece)))
            source_indices.append(ordinal)
        return cls(symbol, lang, paragraphs, source_indices)

    @classmethod
    def from_paragraph_texts(cls, symbol: str, lang: str, texts: list[str]) -> "Document":
        """Build a document from pre-segmented paragraphs, one per entry.

        Used for translated documents where the 1:1 paragraph correspondence
        with the original must be preserved; empty entries are kept as
        empty placeholder paragraphs rather than dropped.
        """
        paragraphs = [
            Paragraph(i, text, tokenize(text)) for i, text in enumerate(texts)
        ]
        return cls(symbol, lang, paragraphs, list(range(len(texts))))

    def __len__(self) -> int:
        return len(self.paragraphs)
