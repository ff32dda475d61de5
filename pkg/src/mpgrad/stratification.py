"""Cell decomposition of filtration space.

A filtration ``f`` factors exactly as ``f = iota o ord``: ``ord`` sends each
simplex to the rank of its value among the distinct values of each
coordinate, and ``iota`` embeds those ranks back into R. Filtrations sharing
the grid and the ``ord`` map form a cell, on which the descriptors are affine
functions of ``iota``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complex import SimplicialComplex
from .errors import ComplexMismatch, NonIncreasing, NotSurjective, SizeMismatch
from .filtrations import Filtration


@dataclass(frozen=True)
class Grid:
    sizes: tuple[int, ...]

    def __post_init__(self):
        if any(m < 1 for m in self.sizes):
            raise SizeMismatch(f"grid sizes must be positive, got {self.sizes}")

    @property
    def n(self) -> int:
        return len(self.sizes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.sizes)


@dataclass(frozen=True, eq=False)
class GridFiltration:
    complex: SimplicialComplex
    grid: Grid
    ord: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.ord, dtype=np.int64)
        if o.shape != (len(self.complex), self.grid.n):
            raise SizeMismatch(f"ord table of shape {o.shape} does not fit the grid")
        if np.any(o < 0) or np.any(o >= np.array(self.grid.sizes)):
            raise SizeMismatch("ord values fall outside the grid")
        o = o.copy()
        o.flags.writeable = False
        object.__setattr__(self, "ord", o)

    def is_surjective(self) -> bool:
        return all(
            len(np.unique(self.ord[:, j])) == m for j, m in enumerate(self.grid.sizes)
        )


@dataclass(frozen=True, eq=False)
class GridInclusion:
    """Per coordinate, a strictly increasing vector: level ``k`` maps to ``maps[j][k]``."""

    maps: tuple[np.ndarray, ...]

    def __post_init__(self):
        maps = []
        for j, m in enumerate(self.maps):
            m = np.array(m, dtype=np.float64).reshape(-1)
            if len(m) == 0:
                raise SizeMismatch(f"coordinate {j} has an empty inclusion")
            if np.any(np.diff(m) <= 0):
                raise NonIncreasing(f"coordinate {j} inclusion is not strictly increasing")
            m.flags.writeable = False
            maps.append(m)
        object.__setattr__(self, "maps", tuple(maps))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(m) for m in self.maps)

    def __call__(self, index) -> np.ndarray:
        """Image of grid indices; ``index`` may be a single point or an (m, n) array."""
        index = np.asarray(index, dtype=np.int64)
        return np.stack([self.maps[j][index[..., j]] for j in range(len(self.maps))], axis=-1)

    def flat(self) -> np.ndarray:
        return np.concatenate(self.maps)


@dataclass(frozen=True)
class Carrier:
    """``levels[j][k]`` is the simplex chosen to carry level ``k`` of coordinate ``j``."""

    levels: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class CellId:
    key: bytes

    @classmethod
    def of(cls, ordf: GridFiltration) -> "CellId":
        head = np.array([ordf.grid.n, len(ordf.complex), *ordf.grid.sizes], dtype="<i8")
        return cls(head.tobytes() + np.ascontiguousarray(ordf.ord, dtype="<i8").tobytes())

    def decode(self) -> tuple[tuple[int, ...], np.ndarray]:
        arr = np.frombuffer(self.key, dtype="<i8")
        n, size = int(arr[0]), int(arr[1])
        sizes = tuple(int(x) for x in arr[2:2 + n])
        return sizes, arr[2 + n:].reshape(size, n)

    def __repr__(self):
        sizes, _ = self.decode()
        return f"CellId(grid={sizes}, {len(self.key)} bytes)"


def stratify(f: Filtration) -> tuple[Grid, GridFiltration, GridInclusion]:
    maps, ords = [], []
    for j in range(f.n):
        uniq, inv = np.unique(f.values[:, j], return_inverse=True)
        maps.append(uniq)
        ords.append(inv.reshape(-1))
    grid = Grid(tuple(len(m) for m in maps))
    return grid, GridFiltration(f.complex, grid, np.column_stack(ords)), GridInclusion(tuple(maps))


def choose_carrier(ordf: GridFiltration) -> Carrier:
    """Per level, the simplex of smallest dimension, then smallest index."""
    K = ordf.complex
    idx = np.arange(len(K))
    levels = []
    for j, m in enumerate(ordf.grid.sizes):
        o = ordf.ord[:, j]
        perm = np.lexsort((idx, K.dims, o))
        first = np.full(m, -1, dtype=np.int64)
        sorted_levels = o[perm]
        starts = np.flatnonzero(np.r_[True, sorted_levels[1:] != sorted_levels[:-1]])
        first[sorted_levels[starts]] = perm[starts]
        if np.any(first < 0):
            missing = np.flatnonzero(first < 0).tolist()
            raise NotSurjective(f"coordinate {j} has empty levels {missing}")
        levels.append(first)
    return Carrier(tuple(levels))


def cell_id(f: Filtration) -> CellId:
    return CellId.of(stratify(f)[1])


def same_cell(f: Filtration, g: Filtration) -> bool:
    if f.complex is not g.complex and f.complex.simplices != g.complex.simplices:
        raise ComplexMismatch("filtrations live on different complexes")
    if f.n != g.n:
        raise ComplexMismatch(f"parameter counts differ: {f.n} vs {g.n}")
    gf, of, _ = stratify(f)
    gg, og, _ = stratify(g)
    return gf == gg and np.array_equal(of.ord, og.ord)


def its_incl(f: Filtration) -> GridInclusion:
    return stratify(f)[2]


def from_incl(ordf: GridFiltration, kappa: GridInclusion) -> Filtration:
    """Reassemble the filtration ``sigma -> kappa(ord(sigma))``."""
    if not isinstance(kappa, GridInclusion):
        kappa = GridInclusion(tuple(kappa))
    if kappa.sizes != ordf.grid.sizes:
        raise SizeMismatch(f"inclusion sizes {kappa.sizes} do not match grid {ordf.grid.sizes}")
    return Filtration(ordf.complex, kappa(ordf.ord))
