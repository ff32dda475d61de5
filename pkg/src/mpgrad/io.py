"""Plain-text formats: complexes, filtrations, point clouds, measures.

Complex file: one simplex per line as comma-separated vertex ids; ``#``
comments and blank lines are skipped. Filtration file: one line per simplex,
in the same order as the complex file, with ``n`` comma-separated reals.
Measure file: CSV with header ``loc_1..loc_n,multiplicity`` or
``birth_1..birth_n,death_1..death_n,multiplicity`` (``inf`` allowed in
death columns).
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .complex import SimplicialComplex, validate_complex
from .errors import DimensionMismatch, MpgradError
from .filtrations import Filtration, validate_filtration
from .measures import BARS, RN, SignedMeasure


class ParseError(MpgradError):
    def __init__(self, path, line: int, message: str):
        self.path, self.line = str(path), line
        super().__init__(f"{path}:{line}: {message}")


def _rows(path):
    """Non-empty, non-comment lines with their 1-based line numbers."""
    with open(path) as fh:
        for no, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if text:
                yield no, [t.strip() for t in text.split(",")]


def _vertex(token: str):
    try:
        return int(token)
    except ValueError:
        return token


def read_complex(path) -> tuple[SimplicialComplex, list[int]]:
    """The complex and, for each file line, the index of its simplex in the complex."""
    raw, lines = [], []
    for no, toks in _rows(path):
        if any(t == "" for t in toks):
            raise ParseError(path, no, "empty vertex id")
        raw.append([_vertex(t) for t in toks])
        lines.append(no)
    if not raw:
        raise ParseError(path, 0, "no simplices")
    K = validate_complex(raw)
    pos = {v: k for k, v in enumerate(K.vertices)}
    order = [K.index[tuple(sorted(pos[v] for v in s))] for s in raw]
    return K, order


def read_filtration(path, K: SimplicialComplex, order: list[int], n: int | None = None) -> Filtration:
    rows = []
    for no, toks in _rows(path):
        try:
            rows.append([float(t) for t in toks])
        except ValueError:
            raise ParseError(path, no, f"not a number in {toks}") from None
        if n is not None and len(rows[-1]) != n:
            raise DimensionMismatch(f"{path}:{no}: expected {n} values, found {len(rows[-1])}")
        if len(rows[-1]) != len(rows[0]):
            raise DimensionMismatch(f"{path}:{no}: inconsistent number of values")
        if not all(math.isfinite(x) for x in rows[-1]):
            raise ParseError(path, no, "values must be finite")
    if len(rows) != len(order):
        raise DimensionMismatch(f"{path}: {len(rows)} rows for {len(order)} simplices")
    values = np.empty((len(K), len(rows[0])))
    values[order] = rows
    return validate_filtration(Filtration(K, values))


def read_points(path) -> np.ndarray:
    rows = []
    for no, toks in _rows(path):
        try:
            rows.append([float(t) for t in toks])
        except ValueError:
            raise ParseError(path, no, f"not a number in {toks}") from None
    if not rows:
        raise ParseError(path, 0, "no points")
    if len({len(r) for r in rows}) != 1:
        raise DimensionMismatch(f"{path}: rows have different lengths")
    return np.array(rows)


def write_points(path, X) -> None:
    np.savetxt(path, np.asarray(X), delimiter=",", fmt="%.17g")


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else repr(float(x))


def write_measure(path, mu: SignedMeasure) -> None:
    """Write to a path, or to an open text stream."""
    if hasattr(path, "write"):
        _write_measure(path, mu)
        return
    with open(path, "w", newline="") as fh:
        _write_measure(fh, mu)


def _write_measure(fh, mu: SignedMeasure) -> None:
    n = mu.n
    if mu.ground == RN:
        head = [f"loc_{j + 1}" for j in range(n)]
    else:
        head = [f"birth_{j + 1}" for j in range(n)] + [f"death_{j + 1}" for j in range(n)]
    w = csv.writer(fh)
    w.writerow(head + ["multiplicity"])
    for loc, m in zip(mu.locations, mu.mults):
        w.writerow([_fmt(x) for x in loc] + [int(m)])


def read_measure(path, ground: str | None = None) -> SignedMeasure:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            head = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(path, 1, "missing header") from None
        if not head or head[-1] != "multiplicity":
            raise ParseError(path, 1, "last column must be 'multiplicity'")
        cols = head[:-1]
        if cols and all(c.startswith("loc_") for c in cols):
            found, n = RN, len(cols)
        elif cols and len(cols) % 2 == 0 and all(c.startswith("birth_") for c in cols[:len(cols) // 2]) \
                and all(c.startswith("death_") for c in cols[len(cols) // 2:]):
            found, n = BARS, len(cols) // 2
        else:
            raise ParseError(path, 1, f"unrecognized header {head}")
        if ground is not None and ground != found:
            raise ParseError(path, 1, f"file holds a {found!r} measure, expected {ground!r}")
        locs, mults = [], []
        for no, row in enumerate(reader, 2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(head):
                raise ParseError(path, no, f"expected {len(head)} fields, found {len(row)}")
            try:
                loc = [float(c) for c in row[:-1]]
                m = int(row[-1])
            except ValueError:
                raise ParseError(path, no, f"bad field in {row}") from None
            if any(math.isnan(x) for x in loc) or (found == RN and not all(math.isfinite(x) for x in loc)):
                raise ParseError(path, no, "locations must be finite (inf only in death columns)")
            if found == BARS and not all(math.isfinite(x) for x in loc[:n]):
                raise ParseError(path, no, "births must be finite")
            locs.append(loc)
            mults.append(m)
    width = n if found == RN else 2 * n
    return SignedMeasure(np.array(locs).reshape(-1, width), np.array(mults, dtype=np.int64), n, found)


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
