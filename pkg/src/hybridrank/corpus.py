"""Corpus loading: CORD-19-style records into the canonical Document model.

Two input formats are supported:

* JSONL: one object per line with keys ``id``, ``title``, ``abstract``,
  ``fulltext``, ``date`` (ISO ``YYYY-MM-DD`` or empty).
* CSV metadata: header ``id,title,abstract,date,fulltext_file`` where
  ``fulltext_file`` names a UTF-8 file relative to a sidecar directory
  (empty if the document has no full text).
"""

from __future__ import annotations

import csv
import datetime
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

log = logging.getLogger(__name__)

FACETS = ("title", "abstract", "fulltext")

_WS_RUN = re.compile(r"\s+")


class CorpusError(Exception):
    """Malformed corpus input (bad record, duplicate id, unreadable path)."""


def _normalize_ws(text: str) -> str:
    return _WS_RUN.sub(" ", text).strip()


def _parse_date(raw: str, context: str) -> Optional[datetime.date]:
    """Parse an ISO date, returning None (with a warning) when invalid."""
    raw = raw.strip()
    if not raw:
        return None
    try:
        return datetime.date.fromisoformat(raw)
    except ValueError:
        log.warning("unparseable date %r (%s); treating as absent", raw, context)
        return None


@dataclass(frozen=True)
class Document:
    """One article: three text facets plus an optional publication date."""

    doc_id: str
    title: str = ""
    abstract: str = ""
    fulltext: str = ""
    pub_date: Optional[datetime.date] = None

    def facet(self, name: str) -> str:
        if name not in FACETS:
            raise KeyError(f"unknown facet {name!r}")
        return getattr(self, name)


@dataclass
class Corpus:
    """Ordered, immutable-after-build collection of documents."""

    documents: list[Document] = field(default_factory=list)
    id_lookup: dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    def __getitem__(self, pos: int) -> Document:
        return self.documents[pos]

    def get(self, doc_id: str) -> Optional[Document]:
        pos = self.id_lookup.get(doc_id)
        return None if pos is None else self.documents[pos]

    @classmethod
    def from_documents(cls, docs: Iterable[Document]) -> "Corpus":
        corpus = cls()
        for doc in docs:
            if not doc.doc_id:
                raise CorpusError("empty doc_id")
            if doc.doc_id in corpus.id_lookup:
                raise CorpusError(f"duplicate doc_id {doc.doc_id!r}")
            corpus.id_lookup[doc.doc_id] = len(corpus.documents)
            corpus.documents.append(doc)
        return corpus


def _doc_from_fields(
    doc_id: str, title: str, abstract: str, fulltext: str, date_raw: str, context: str
) -> Document:
    return Document(
        doc_id=doc_id,
        title=_normalize_ws(title),
        abstract=_normalize_ws(abstract),
        fulltext=_normalize_ws(fulltext),
        pub_date=_parse_date(date_raw, context),
    )


def _load_jsonl(path: Path) -> Iterator[Document]:
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(rec, dict) or not rec.get("id"):
                raise CorpusError(f"{path}:{lineno}: record must be an object with a non-empty 'id'")
            yield _doc_from_fields(
                str(rec["id"]),
                str(rec.get("title") or ""),
                str(rec.get("abstract") or ""),
                str(rec.get("fulltext") or ""),
                str(rec.get("date") or ""),
                f"{path}:{lineno}",
            )


def _load_csv(path: Path, sidecar_dir: Optional[Path]) -> Iterator[Document]:
    sidecar = sidecar_dir if sidecar_dir is not None else path.parent
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"id", "title", "abstract", "date", "fulltext_file"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise CorpusError(f"{path}: CSV header must contain {sorted(required)}")
        for lineno, row in enumerate(reader, start=2):
            doc_id = (row.get("id") or "").strip()
            if not doc_id:
                raise CorpusError(f"{path}:{lineno}: empty id")
            fulltext = ""
            ft_name = (row.get("fulltext_file") or "").strip()
            if ft_name:
                ft_path = sidecar / ft_name
                try:
                    fulltext = ft_path.read_text(encoding="utf-8")
                except OSError as exc:
                    raise CorpusError(f"{path}:{lineno}: cannot read fulltext file {ft_path}: {exc}") from exc
            yield _doc_from_fields(
                doc_id,
                row.get("title") or "",
                row.get("abstract") or "",
                fulltext,
                row.get("date") or "",
                f"{path}:{lineno}",
            )


def load_corpus(path: str | Path, format: str = "jsonl", sidecar_dir: str | Path | None = None) -> Corpus:
    """Load a corpus file into a Corpus.

    ``format`` is ``jsonl`` or ``csv-metadata``. Missing facets become empty
    strings; unparseable dates become absent (with a warning); duplicate
    doc_ids are an error.
    """
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"unreadable corpus path: {path}")
    if format == "jsonl":
        docs = _load_jsonl(path)
    elif format == "csv-metadata":
        docs = _load_csv(path, Path(sidecar_dir) if sidecar_dir else None)
    else:
        raise CorpusError(f"unknown corpus format {format!r}")
    return Corpus.from_documents(docs)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus back out in the JSONL format (round-trip inverse of load)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for doc in corpus:
            rec = {
                "id": doc.doc_id,
                "title": doc.title,
                "abstract": doc.abstract,
                "fulltext": doc.fulltext,
                "date": doc.pub_date.isoformat() if doc.pub_date else "",
            }
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def filter_by_date(corpus: Corpus, cutoff: datetime.date) -> Corpus:
    """Keep documents dated on/after ``cutoff``; undated documents are retained."""
    return Corpus.from_documents(
        doc for doc in corpus if doc.pub_date is None or doc.pub_date >= cutoff
    )
