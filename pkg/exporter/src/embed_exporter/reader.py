"""Faceted-corpus readers for the documented JSONL and CSV layouts.

JSONL: one object per line with a required ``id`` and optional ``title``,
``abstract``, ``fulltext`` string fields. CSV: columns ``id``, ``title``,
``abstract``, ``date``, ``fulltext_file``, where ``fulltext_file`` names a
plain-text file in a sidecar directory (empty means no fulltext).
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

FACETS = ("title", "abstract", "fulltext")


class CorpusReadError(Exception):
    """The corpus file does not follow the documented layout."""


@dataclass(frozen=True)
class FacetedDoc:
    doc_id: str
    title: str
    abstract: str
    fulltext: str

    def facet(self, name: str) -> str:
        if name not in FACETS:
            raise KeyError(name)
        return getattr(self, name)


def _iter_jsonl(path: Path) -> Iterator[FacetedDoc]:
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusReadError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(rec, dict) or not rec.get("id"):
                raise CorpusReadError(
                    f"{path}:{lineno}: record must be an object with a non-empty 'id'"
                )
            yield FacetedDoc(
                doc_id=str(rec["id"]),
                title=str(rec.get("title") or ""),
                abstract=str(rec.get("abstract") or ""),
                fulltext=str(rec.get("fulltext") or ""),
            )


def _iter_csv(path: Path, sidecar_dir: Path | None) -> Iterator[FacetedDoc]:
    sidecar = sidecar_dir if sidecar_dir is not None else path.parent
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"id", "title", "abstract", "date", "fulltext_file"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise CorpusReadError(f"{path}: CSV header must contain {sorted(required)}")
        for lineno, row in enumerate(reader, start=2):
            doc_id = (row.get("id") or "").strip()
            if not doc_id:
                raise CorpusReadError(f"{path}:{lineno}: empty id")
            fulltext = ""
            ft_name = (row.get("fulltext_file") or "").strip()
            if ft_name:
                ft_path = sidecar / ft_name
                try:
                    fulltext = ft_path.read_text(encoding="utf-8")
                except OSError as exc:
                    raise CorpusReadError(
                        f"{path}:{lineno}: cannot read fulltext file {ft_path}: {exc}"
                    ) from exc
            yield FacetedDoc(
                doc_id=doc_id,
                title=row.get("title") or "",
                abstract=row.get("abstract") or "",
                fulltext=fulltext,
            )


def read_corpus(
    path: str | Path, format: str = "jsonl", sidecar_dir: str | Path | None = None
) -> list[FacetedDoc]:
    """Read a corpus file; duplicate or missing ids are fatal."""
    path = Path(path)
    if format == "jsonl":
        docs = list(_iter_jsonl(path))
    elif format == "csv-metadata":
        docs = list(_iter_csv(path, Path(sidecar_dir) if sidecar_dir else None))
    else:
        raise CorpusReadError(f"unknown corpus format {format!r}")
    seen: set[str] = set()
    for doc in docs:
        if doc.doc_id in seen:
            raise CorpusReadError(f"{path}: duplicate doc_id {doc.doc_id!r}")
        seen.add(doc.doc_id)
    return docs
