"""Finite simplicial complexes and exact homology over the two-element field.

Chains are encoded as Python integers used as bitsets: bit ``j`` is the
coefficient of the ``j``-th simplex of a given dimension (its *local* index).
XOR is chain addition, so Gaussian elimination is a handful of integer ops.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import DuplicateSimplex, EmptySimplex, MissingFace, MpgradError, NotNested

DENSE_LIMIT = 1 << 12


def _sort_ids(ids):
    try:
        return sorted(ids)
    except TypeError:
        return sorted(ids, key=lambda v: (type(v).__name__, str(v)))


class SimplicialComplex:
    """A face-closed family of simplices in canonical order.

    Simplices are tuples of vertex *indices* (positions in ``vertices``),
    ordered by dimension and then lexicographically. Instances are treated as
    immutable.
    """

    def __init__(self, vertices: Sequence[Hashable], simplices: Sequence[tuple[int, ...]], check: bool = True):
        self.vertices = tuple(vertices)
        simplices = [tuple(s) for s in simplices]
        if check:
            simplices.sort(key=lambda s: (len(s), s))
        self.simplices: tuple[tuple[int, ...], ...] = tuple(simplices)
        self.index = {s: k for k, s in enumerate(self.simplices)}
        if check and len(self.index) != len(self.simplices):
            raise DuplicateSimplex("duplicate simplex in complex")
        self.dims = np.fromiter((len(s) - 1 for s in self.simplices), dtype=np.int64, count=len(self.simplices))
        self.dimension = int(self.dims.max()) if len(self.dims) else -1
        self.by_dim = [np.flatnonzero(self.dims == d) for d in range(self.dimension + 1)]
        self.local = np.zeros(len(self.simplices), dtype=np.int64)
        for idx in self.by_dim:
            self.local[idx] = np.arange(len(idx))
        faces = []
        for s in self.simplices:
            if len(s) == 1:
                faces.append(())
                continue
            fs = []
            for j in range(len(s)):
                face = s[:j] + s[j + 1:]
                k = self.index.get(face)
                if k is None:
                    raise MissingFace([self.vertices[v] for v in s], [self.vertices[v] for v in face])
                fs.append(k)
            faces.append(tuple(fs))
        self.faces: tuple[tuple[int, ...], ...] = tuple(faces)
        if check:
            n_vert = len(self.by_dim[0]) if self.dimension >= 0 else 0
            if n_vert != len(self.vertices):
                raise MpgradError("every vertex must appear as a 0-simplex")

    def __len__(self):
        return len(self.simplices)

    def __repr__(self):
        counts = [len(x) for x in self.by_dim]
        return f"SimplicialComplex(vertices={len(self.vertices)}, simplices per dim={counts})"

    def count(self, d: int) -> int:
        if d < 0 or d > self.dimension:
            return 0
        return len(self.by_dim[d])

    def labelled(self, k: int) -> tuple:
        """Simplex ``k`` expressed with the original vertex ids."""
        return tuple(self.vertices[v] for v in self.simplices[k])

    def boundary_bits(self, k: int) -> int:
        """Boundary of simplex ``k`` as a bitset over local indices one dimension down."""
        return self.all_boundary_bits()[k]

    def all_boundary_bits(self) -> list[int]:
        bits = getattr(self, "_bits", None)
        if bits is None:
            local = self.local.tolist()
            bits = []
            for fs in self.faces:
                out = 0
                for face in fs:
                    out ^= 1 << local[face]
                bits.append(out)
            self._bits = bits
        return bits


def validate_complex(raw: Iterable[Iterable[Hashable]]) -> SimplicialComplex:
    """Build a complex from vertex-id sets, refusing to add missing faces."""
    raw = [list(s) for s in raw]
    if not raw:
        raise EmptySimplex("complex needs at least one simplex")
    for s in raw:
        if len(s) == 0:
            raise EmptySimplex("empty simplex")
        if len(set(s)) != len(s):
            raise MpgradError(f"simplex {tuple(s)} repeats a vertex")
    ids = _sort_ids({v for s in raw for v in s})
    pos = {v: k for k, v in enumerate(ids)}
    simplices = [tuple(sorted(pos[v] for v in s)) for s in raw]
    seen = set()
    for s in simplices:
        if s in seen:
            raise DuplicateSimplex(f"duplicate simplex {tuple(ids[v] for v in s)}")
        seen.add(s)
    for s in simplices:
        if len(s) > 1:
            for face in combinations(s, len(s) - 1):
                if face not in seen:
                    raise MissingFace([ids[v] for v in s], [ids[v] for v in face])
    return SimplicialComplex(ids, simplices)


@dataclass(frozen=True)
class BoundaryMatrix:
    """Boundary map in degree ``degree`` over F2.

    ``columns[j]`` lists the local row indices (``degree - 1`` simplices) of
    the faces of the ``j``-th ``degree``-simplex.
    """

    degree: int
    shape: tuple[int, int]
    columns: tuple[tuple[int, ...], ...]

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for j, col in enumerate(self.columns):
            out[list(col), j] = 1
        return out

    def bits(self) -> list[int]:
        return [sum(1 << r for r in col) for col in self.columns]


def boundary_matrix(K: SimplicialComplex, i: int) -> BoundaryMatrix:
    rows = K.count(i - 1)
    cols = K.by_dim[i] if 0 <= i <= K.dimension else np.zeros(0, dtype=np.int64)
    columns = tuple(tuple(sorted(int(K.local[f]) for f in K.faces[k])) for k in cols)
    return BoundaryMatrix(i, (rows, len(columns)), columns)


class Echelon:
    """Incrementally maintained F2 column space keyed by leading bit."""

    __slots__ = ("pivots",)

    def __init__(self, pivots: dict[int, int] | None = None):
        self.pivots = {} if pivots is None else pivots

    def reduce(self, v: int) -> int:
        piv = self.pivots
        while v:
            w = piv.get(v.bit_length() - 1)
            if w is None:
                return v
            v ^= w
        return 0

    def add(self, v: int) -> bool:
        """Insert ``v``; return True if it increased the rank."""
        v = self.reduce(v)
        if v:
            self.pivots[v.bit_length() - 1] = v
            return True
        return False

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def copy(self) -> "Echelon":
        return Echelon(dict(self.pivots))


def rank_f2_dense(M: np.ndarray) -> int:
    A = (np.asarray(M) & 1).astype(np.uint8, copy=True)
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if len(nz) == 0:
            continue
        p = r + nz[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        hit = np.flatnonzero(A[:, c])
        hit = hit[hit != r]
        A[hit] ^= A[r]
        r += 1
    return r


def rank_f2_sparse(columns: Iterable[int]) -> int:
    ech = Echelon()
    for v in columns:
        ech.add(v)
    return ech.rank


def rank_f2(B: BoundaryMatrix, method: str = "auto") -> int:
    if method == "auto":
        method = "dense" if sum(B.shape) <= DENSE_LIMIT else "sparse"
    if method == "dense":
        return rank_f2_dense(B.to_dense()) if min(B.shape) > 0 else 0
    if method == "sparse":
        return rank_f2_sparse(B.bits())
    raise ValueError(f"unknown method {method!r}")


class Subcomplex:
    """Face-closed subset of a parent complex, stored as a boolean mask."""

    def __init__(self, parent: SimplicialComplex, mask, check: bool = True):
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (len(parent),):
            raise MpgradError("mask length does not match the parent complex")
        if check:
            for k in np.flatnonzero(mask):
                for f in parent.faces[k]:
                    if not mask[f]:
                        raise MissingFace(parent.labelled(k), parent.labelled(f))
        mask = mask.copy()
        mask.flags.writeable = False
        self.parent = parent
        self.mask = mask

    @classmethod
    def full(cls, K: SimplicialComplex) -> "Subcomplex":
        return cls(K, np.ones(len(K), dtype=bool), check=False)

    def members(self, d: int) -> np.ndarray:
        if d < 0 or d > self.parent.dimension:
            return np.zeros(0, dtype=np.int64)
        idx = self.parent.by_dim[d]
        return idx[self.mask[idx]]

    def issubset(self, other: "Subcomplex") -> bool:
        return self.parent is other.parent and not np.any(self.mask & ~other.mask)


def _boundary_rank(sub: Subcomplex, d: int) -> int:
    K = sub.parent
    cols = sub.members(d)
    if d <= 0 or len(cols) == 0:
        return 0
    return rank_f2_sparse(K.boundary_bits(k) for k in cols)


def homology_dimension(sub: Subcomplex, i: int) -> int:
    """dim H_i(sub; F2) = nullity of the i-th boundary minus rank of the next."""
    n_i = len(sub.members(i))
    if n_i == 0:
        return 0
    return n_i - _boundary_rank(sub, i) - _boundary_rank(sub, i + 1)


def cycle_basis(sub: Subcomplex, i: int) -> list[int]:
    """Basis of Z_i(sub) as bitsets over local ``i``-simplex indices."""
    K = sub.parent
    cols = sub.members(i)
    if i == 0:
        return [1 << int(K.local[k]) for k in cols]
    pivots: dict[int, tuple[int, int]] = {}
    cycles = []
    for k in cols:
        v = K.boundary_bits(k)
        track = 1 << int(K.local[k])
        while v:
            p = v.bit_length() - 1
            hit = pivots.get(p)
            if hit is None:
                break
            v ^= hit[0]
            track ^= hit[1]
        if v:
            pivots[v.bit_length() - 1] = (v, track)
        else:
            cycles.append(track)
    return cycles


def inclusion_rank(sub_r: Subcomplex, sub_s: Subcomplex, i: int) -> int:
    """Rank of H_i(sub_r) -> H_i(sub_s) induced by inclusion."""
    if not sub_r.issubset(sub_s):
        raise NotNested("first subcomplex is not contained in the second")
    K = sub_s.parent
    ech = Echelon()
    for k in sub_s.members(i + 1):
        ech.add(K.boundary_bits(k))
    return sum(ech.add(z) for z in cycle_basis(sub_r, i))


def euler_characteristic(sub: Subcomplex) -> int:
    dims = sub.parent.dims[sub.mask]
    return int(np.sum(dims % 2 == 0) - np.sum(dims % 2 == 1))
