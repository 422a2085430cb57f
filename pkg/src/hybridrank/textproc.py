"""Deterministic text processing: tokenizer and rule-based sentence splitter.

One tokenizer is shared by BM25, DFR, and RM3 so scores stay comparable
across runs. Sentence segmentation is rule-based: split at sentence-final
punctuation followed by whitespace and an uppercase letter or digit, never
inside a decimal number.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

# Small standard English stopword list; callers may override with their own
# (including the empty set) via the stopwords argument.
DEFAULT_STOPWORDS = frozenset(
    """a an and are as at be but by for if in into is it no not of on or
    such that the their then there these they this to was will with""".split()
)

_TOKEN_RE = re.compile(r"[0-9a-z]+")

# Boundary: . ! or ? (optionally followed by closing quotes/brackets), then
# whitespace, then an uppercase letter or digit. Decimal points never match:
# inside a number the '.' is followed by a digit, not whitespace.
_BOUNDARY_RE = re.compile(r"[.!?]['\")\]]*(?=\s+[A-Z0-9])")


def tokenize(text: str, stopwords: frozenset[str] = DEFAULT_STOPWORDS) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop stopwords."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if t not in stopwords]


@dataclass(frozen=True)
class Sentence:
    """A contiguous facet substring with its (start, end) character span."""

    text: str
    start: int
    end: int


def segment_sentences(text: str) -> list[Sentence]:
    """Split facet text into sentences at rule-based boundaries.

    Returns the whole text as one sentence when no boundary is found and
    an empty list for empty/whitespace-only input. Spans index into the
    original text; joining span texts with the skipped separators restores
    the input.
    """
    if not text.strip():
        return []
    sentences: list[Sentence] = []
    start = 0
    for match in _BOUNDARY_RE.finditer(text):
        end = match.end()
        piece = text[start:end]
        if piece.strip():
            s, e = _trim_span(text, start, end)
            sentences.append(Sentence(text[s:e], s, e))
        start = end
    if start < len(text) and text[start:].strip():
        s, e = _trim_span(text, start, len(text))
        sentences.append(Sentence(text[s:e], s, e))
    return sentences


def _trim_span(text: str, start: int, end: int) -> tuple[int, int]:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    return start, end


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read a stopword file: one lowercase term per line, '#' comments allowed."""
    terms = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            terms.add(line.lower())
    return frozenset(terms)
