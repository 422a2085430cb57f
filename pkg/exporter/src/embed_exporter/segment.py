"""Rule-based sentence segmentation for scientific prose.

Independent of any segmenter used downstream: the vector-file format
carries per-facet sentence counts, so consumers never need to agree on
boundaries.
"""

import re

# A boundary is terminal punctuation (plus optional closing quotes or
# brackets) followed by whitespace and an upper-case letter or digit.
_BOUNDARY = re.compile(r"(?<=[.!?])[\"')\]]*\s+(?=[\"'(\[]?[A-Z0-9])")

# Common abbreviations whose trailing period should not end a sentence.
_ABBREVIATIONS = frozenset(
    "al e.g i.e etc fig figs eq eqs no vs cf dr prof st mr mrs ms".split()
)


def _ends_with_abbreviation(chunk: str) -> bool:
    tail = chunk.rstrip("\"')]")
    if not tail.endswith("."):
        return False
    word = tail[:-1].rsplit(None, 1)[-1] if tail[:-1].split() else ""
    return word.lower().rstrip(".") in _ABBREVIATIONS


def split_sentences(text: str) -> list[str]:
    """Split ``text`` into sentences; whitespace-only input yields []."""
    stripped = text.strip()
    if not stripped:
        return []
    pieces = _BOUNDARY.split(stripped)
    sentences: list[str] = []
    for piece in pieces:
        piece = piece.strip()
        if not piece:
            continue
        if sentences and _ends_with_abbreviation(sentences[-1]):
            sentences[-1] = f"{sentences[-1]} {piece}"
        else:
            sentences.append(piece)
    return sentences
