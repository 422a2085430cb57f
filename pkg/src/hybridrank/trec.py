"""TREC wire formats: topic XML, qrels, and run files.

Parsers reject structural violations rather than repairing them, with two
documented lenient cases: a topic missing its narrative (kept, warned) and
duplicate qrel pairs (last occurrence wins, warned).
"""

from __future__ import annotations

import logging
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

log = logging.getLogger(__name__)

TOPIC_FIELDS = ("query", "question", "narrative")


class TrecFormatError(Exception):
    """Malformed topic, qrels, or run file."""


@dataclass(frozen=True)
class Topic:
    """A search topic: number plus query/question/narrative fields."""

    number: int
    query: str
    question: str = ""
    narrative: str = ""

    def field(self, name: str) -> str:
        if name not in TOPIC_FIELDS:
            raise KeyError(f"unknown topic field {name!r}")
        return getattr(self, name)


@dataclass(frozen=True)
class Qrel:
    """Graded relevance judgement: 0 irrelevant, 1 partial, 2 relevant."""

    topic: int
    doc_id: str
    grade: int


@dataclass(frozen=True)
class RunEntry:
    """One line of a TREC run: topic, doc, 1-based rank, score, tag."""

    topic: int
    doc_id: str
    rank: int
    score: float
    run_tag: str


_WS = re.compile(r"\s+")


def _clean(text: str | None) -> str:
    return _WS.sub(" ", text or "").strip()


def parse_topics(path: str | Path) -> list[Topic]:
    """Parse topic XML: `topic` elements with a `number` attribute and
    query/question/narrative children."""
    path = Path(path)
    try:
        tree = ET.parse(path)
    except ET.ParseError as exc:
        raise TrecFormatError(f"{path}: malformed XML: {exc}") from exc
    topics = []
    for elem in tree.getroot().iter("topic"):
        number_raw = elem.get("number")
        if number_raw is None:
            raise TrecFormatError(f"{path}: topic element missing 'number' attribute")
        try:
            number = int(number_raw)
        except ValueError as exc:
            raise TrecFormatError(f"{path}: non-integer topic number {number_raw!r}") from exc
        query_elem = elem.find("query")
        if query_elem is None:
            raise TrecFormatError(f"{path}: topic {number} missing 'query' element")
        narrative_elem = elem.find("narrative")
        if narrative_elem is None:
            log.warning("topic %d has no narrative element", number)
        topics.append(
            Topic(
                number=number,
                query=_clean(query_elem.text),
                question=_clean(elem.findtext("question")),
                narrative=_clean(elem.findtext("narrative")),
            )
        )
    return topics


def parse_qrels(path: str | Path) -> list[Qrel]:
    """Parse whitespace-separated qrels lines `topic 0 doc_id grade`.

    Duplicate (topic, doc) pairs keep the last occurrence with a warning;
    grades outside {0, 1, 2} are fatal.
    """
    path = Path(path)
    seen: dict[tuple[int, str], int] = {}
    order: list[tuple[int, str]] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 4:
                raise TrecFormatError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
            try:
                topic = int(parts[0])
                grade = int(parts[3])
            except ValueError as exc:
                raise TrecFormatError(f"{path}:{lineno}: non-integer topic or grade") from exc
            if grade not in (0, 1, 2):
                raise TrecFormatError(f"{path}:{lineno}: grade {grade} outside {{0,1,2}}")
            key = (topic, parts[2])
            if key in seen:
                log.warning("%s:%d: duplicate qrel for topic %d doc %r; last wins", path, lineno, topic, parts[2])
            else:
                order.append(key)
            seen[key] = grade
    return [Qrel(topic, doc_id, seen[(topic, doc_id)]) for topic, doc_id in order]


def validate_run(entries: Sequence[RunEntry]) -> None:
    """Check RunEntry invariants: per topic, ranks contiguous from 1, scores
    non-increasing with rank, doc_ids unique."""
    by_topic: dict[int, list[RunEntry]] = {}
    for entry in entries:
        by_topic.setdefault(entry.topic, []).append(entry)
    for topic, group in by_topic.items():
        group = sorted(group, key=lambda e: e.rank)
        seen_docs = set()
        for i, entry in enumerate(group, start=1):
            if entry.rank != i:
                raise TrecFormatError(f"topic {topic}: ranks not contiguous from 1 (rank {entry.rank} at position {i})")
            if entry.doc_id in seen_docs:
                raise TrecFormatError(f"topic {topic}: duplicate doc_id {entry.doc_id!r}")
            seen_docs.add(entry.doc_id)
            if i > 1 and entry.score > group[i - 2].score:
                raise TrecFormatError(f"topic {topic}: scores increase at rank {entry.rank}")


def write_run(entries: Sequence[RunEntry], path: str | Path) -> None:
    """Write run lines `topic Q0 doc_id rank score run_tag`, scores at 6
    decimals. Invariant violations are fatal (protects submissions)."""
    validate_run(entries)
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for entry in sorted(entries, key=lambda e: (e.topic, e.rank)):
            fh.write(f"{entry.topic} Q0 {entry.doc_id} {entry.rank} {entry.score:.6f} {entry.run_tag}\n")


def read_run(path: str | Path) -> list[RunEntry]:
    """Inverse of write_run; malformed lines are fatal."""
    path = Path(path)
    entries = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 6 or parts[1] != "Q0":
                raise TrecFormatError(f"{path}:{lineno}: malformed run line")
            try:
                entries.append(
                    RunEntry(
                        topic=int(parts[0]),
                        doc_id=parts[2],
                        rank=int(parts[3]),
                        score=float(parts[4]),
                        run_tag=parts[5],
                    )
                )
            except ValueError as exc:
                raise TrecFormatError(f"{path}:{lineno}: malformed run line: {exc}") from exc
    validate_run(entries)
    return entries
