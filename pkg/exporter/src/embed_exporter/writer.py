"""Writer for the HYBRIDVEC 1 text format.

Header line ``HYBRIDVEC 1 <D>``; then per document a ``doc_id`` line,
then for each facet a marker ``facet <name> <count>`` followed by
``count`` lines of D space-separated decimal reals (sentence vectors in
sentence order). Values use shortest round-trip decimal repr so reload
is bit-exact. Records are written in sorted doc_id order so output is
deterministic regardless of corpus order.
"""

from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

FORMAT_NAME = "HYBRIDVEC"
FORMAT_VERSION = 1


class VectorWriteError(Exception):
    """Vectors are malformed (wrong shape or non-finite)."""


def write_hybridvec(
    path: str | Path,
    dimension: int,
    records: Iterable[tuple[str, Mapping[str, np.ndarray]]],
    facet_names: Sequence[str] = ("title", "abstract", "fulltext"),
) -> int:
    """Write records of (doc_id, facet -> (n, dimension) array); return doc count."""
    rows = sorted(records, key=lambda item: item[0])
    written = 0
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"{FORMAT_NAME} {FORMAT_VERSION} {dimension}\n")
        for doc_id, facets in rows:
            fh.write(doc_id + "\n")
            for facet in facet_names:
                vectors = np.asarray(facets.get(facet, np.empty((0, dimension))))
                if vectors.ndim != 2 or vectors.shape[1:] != (dimension,):
                    raise VectorWriteError(
                        f"doc {doc_id!r} facet {facet!r}: expected (n, {dimension}) "
                        f"array, got shape {vectors.shape}"
                    )
                if not np.all(np.isfinite(vectors)):
                    raise VectorWriteError(f"doc {doc_id!r} facet {facet!r}: non-finite values")
                fh.write(f"facet {facet} {len(vectors)}\n")
                for vec in vectors:
                    fh.write(" ".join(repr(float(x)) for x in vec) + "\n")
            written += 1
    return written
