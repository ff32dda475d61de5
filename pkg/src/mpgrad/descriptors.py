"""Homological descriptors computed on the grid and pushed along the grid inclusion.

Every descriptor is first evaluated on the discrete grid filtration ``ord``
(integer tables indexed by grid points) and only then mapped into R^n
through ``iota``. Within a cell the grid data never changes, which is what
makes the pushed descriptors affine in ``iota``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .complex import Echelon
from .filtrations import Filtration
from .measures import BARS, RN, SignedMeasure
from .stratification import CellId, Grid, GridFiltration, GridInclusion, stratify


@dataclass(frozen=True, eq=False)
class HilbertGrid:
    grid: Grid
    degree: int
    table: np.ndarray


@dataclass(frozen=True, eq=False)
class RankGrid:
    """``table[a + b]`` (index tuples concatenated) is rk(a, b) for a <= b, else 0.

    The rank towards infinity is ``table[a + max]``.
    """

    grid: Grid
    degree: int
    table: np.ndarray

    def __call__(self, a, b=None) -> int:
        if b is None:
            b = tuple(m - 1 for m in self.grid.sizes)
        return int(self.table[tuple(a) + tuple(b)])


@dataclass(frozen=True, eq=False)
class SortedHilbert:
    cell: CellId
    positives: np.ndarray
    negatives: np.ndarray


def _tails(grid: Grid):
    return product(*(range(m) for m in grid.sizes[1:]))


def _tail_mask(ordf: GridFiltration, tail) -> np.ndarray:
    if not tail:
        return np.ones(len(ordf.complex), dtype=bool)
    return np.all(ordf.ord[:, 1:] <= np.asarray(tail), axis=1)


def _sweep_order(ordf: GridFiltration, mask: np.ndarray) -> np.ndarray:
    K = ordf.complex
    idx = np.flatnonzero(mask)
    return idx[np.lexsort((idx, K.dims[idx], ordf.ord[idx, 0]))]


def _fill_levels(levels: np.ndarray, after: np.ndarray, m: int) -> np.ndarray:
    """Value at each first-coordinate level, read from the last event at or below it."""
    last = np.searchsorted(levels, np.arange(m), side="right") - 1
    out = np.zeros(m, dtype=np.int64)
    ok = last >= 0
    out[ok] = after[last[ok]]
    return out


def hilbert_grid(ordf: GridFiltration, i: int) -> HilbertGrid:
    """dim H_i of every sublevel subcomplex of the grid filtration.

    One sweep per value of the trailing coordinates; along the first
    coordinate the ranks of the two boundary maps are maintained
    incrementally.
    """
    K = ordf.complex
    grid = ordf.grid
    table = np.zeros(grid.shape, dtype=np.int64)
    if i < 0 or i > K.dimension:
        return HilbertGrid(grid, i, table)
    bits = K.all_boundary_bits()
    dims = K.dims
    relevant = (dims == i) | (dims == i + 1)
    for tail in _tails(grid):
        sel = _sweep_order(ordf, relevant & _tail_mask(ordf, tail))
        low, high = Echelon(), Echelon()
        n_i = r_i = r_up = 0
        after = np.empty(len(sel), dtype=np.int64)
        for pos, k in enumerate(sel.tolist()):
            if dims[k] == i:
                n_i += 1
                if i > 0 and low.add(bits[k]):
                    r_i += 1
            elif r_up < n_i - r_i and high.add(bits[k]):
                # skipped when H_i is already zero: the boundary lies in B_i = Z_i
                r_up += 1
            after[pos] = n_i - r_i - r_up
        row = _fill_levels(ordf.ord[sel, 0], after, grid.sizes[0])
        table[(slice(None),) + tuple(tail)] = row
    return HilbertGrid(grid, i, table)


def mobius_downward(table: np.ndarray, axes=None) -> np.ndarray:
    """Inclusion-exclusion along each axis: x[p] - x[p - e_j], zero outside the grid."""
    out = np.array(table, dtype=np.int64, copy=True)
    axes = range(out.ndim) if axes is None else axes
    for ax in axes:
        shifted = np.zeros_like(out)
        src = [slice(None)] * out.ndim
        dst = [slice(None)] * out.ndim
        src[ax] = slice(0, -1)
        dst[ax] = slice(1, None)
        shifted[tuple(dst)] = out[tuple(src)]
        out = out - shifted
    return out


def hilbert_measure_on_grid(ordf: GridFiltration, i: int) -> tuple[np.ndarray, np.ndarray]:
    """Grid points carrying nonzero mass and their multiplicities."""
    mass = mobius_downward(hilbert_grid(ordf, i).table)
    pts = np.argwhere(mass != 0)
    return pts, mass[tuple(pts.T)] if len(pts) else np.zeros(0, dtype=np.int64)


def push_hilbert(pts: np.ndarray, mults: np.ndarray, iota: GridInclusion) -> SignedMeasure:
    n = len(iota.maps)
    locs = iota(pts) if len(pts) else np.zeros((0, n))
    return SignedMeasure(locs, mults, n, RN)


def hilbert_measure(f: Filtration, i: int) -> SignedMeasure:
    _, ordf, iota = stratify(f)
    pts, mults = hilbert_measure_on_grid(ordf, i)
    return push_hilbert(pts, mults, iota)


def _boundary_spaces(ordf: GridFiltration, i: int) -> dict[tuple, Echelon]:
    """Echelon form of B_i(K_b) for every grid point b."""
    K = ordf.complex
    bits = K.all_boundary_bits()
    m0 = ordf.grid.sizes[0]
    out = {}
    up = K.dims == i + 1
    for tail in _tails(ordf.grid):
        sel = _sweep_order(ordf, up & _tail_mask(ordf, tail))
        levels = ordf.ord[sel, 0]
        ech = Echelon()
        pos = 0
        for b0 in range(m0):
            while pos < len(sel) and levels[pos] <= b0:
                ech.add(bits[sel[pos]])
                pos += 1
            out[(b0,) + tuple(tail)] = ech.copy()
    return out


def _cycle_births(ordf: GridFiltration, i: int, tail) -> list[tuple[int, int]]:
    """Cycle basis of Z_i along the first coordinate: (birth level, cycle bitset)."""
    K = ordf.complex
    sel = _sweep_order(ordf, (K.dims == i) & _tail_mask(ordf, tail))
    bits = K.all_boundary_bits()
    local = K.local
    births = []
    pivots: dict[int, tuple[int, int]] = {}
    for k in sel.tolist():
        track = 1 << int(local[k])
        v = bits[k] if i > 0 else 0
        while v:
            hit = pivots.get(v.bit_length() - 1)
            if hit is None:
                break
            v ^= hit[0]
            track ^= hit[1]
        if v:
            pivots[v.bit_length() - 1] = (v, track)
        else:
            births.append((int(ordf.ord[k, 0]), track))
    return births


def rank_grid(ordf: GridFiltration, i: int) -> RankGrid:
    """Rank of H_i(K_a) -> H_i(K_b) for all grid pairs a <= b.

    rk(a, b) = dim(Z_i(K_a) + B_i(K_b)) - dim B_i(K_b), evaluated by feeding
    the cycles born along each first-coordinate sweep into the echelon form
    of B_i(K_b).
    """
    grid = ordf.grid
    sizes = grid.sizes
    table = np.zeros(sizes + sizes, dtype=np.int64)
    K = ordf.complex
    if i < 0 or i > K.dimension:
        return RankGrid(grid, i, table)
    spaces = _boundary_spaces(ordf, i)
    births = {tuple(t): _cycle_births(ordf, i, t) for t in _tails(grid)}
    for b in product(*(range(m) for m in sizes)):
        b0, btail = b[0], b[1:]
        for tail in product(*(range(m + 1) for m in btail)):
            work = spaces[b].copy()
            count = 0
            row = np.zeros(b0 + 1, dtype=np.int64)
            for level, z in births[tail]:
                if level > b0:
                    break
                if work.add(z):
                    count += 1
                row[level:] = count
            table[(slice(0, b0 + 1),) + tail + b] = row
    return RankGrid(grid, i, table)


def _comparable_mask(sizes: tuple[int, ...]) -> np.ndarray:
    """Boolean array over (a, b) pairs with a <= b coordinate-wise."""
    n = len(sizes)
    mask = np.ones(sizes + sizes, dtype=bool)
    for j, m in enumerate(sizes):
        shape = [1] * (2 * n)
        shape[j] = m
        a = np.arange(m).reshape(shape)
        shape = [1] * (2 * n)
        shape[n + j] = m
        b = np.arange(m).reshape(shape)
        mask &= a <= b
    return mask


def rank_measure_on_grid(rk: RankGrid) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Hook decomposition of the rank invariant on the grid.

    Returns ``(finite_pairs, finite_mults, inf_births, inf_mults)`` where each
    finite pair row is a birth grid point followed by a death grid point.

    Differencing the birth index downward gives, for a <= b, the mass of
    bars born exactly at ``a`` still alive at ``b``. Bars have births strictly
    below deaths, so at ``b = a`` this is all bars born at ``a``; subtracting
    leaves a cumulative count of deaths, which is differenced downward in the
    death index.
    """
    sizes = rk.grid.sizes
    n = len(sizes)
    comp = _comparable_mask(sizes)
    born = mobius_downward(np.where(comp, rk.table, 0), axes=range(n))
    born = np.where(comp, born, 0)
    grid_pts = list(product(*(range(m) for m in sizes)))
    total = np.zeros(sizes, dtype=np.int64)
    for a in grid_pts:
        total[a] = born[a + a]
    expand = total.reshape(sizes + (1,) * n)
    dead = np.where(comp, expand - born, 0)
    finite = mobius_downward(dead, axes=range(n, 2 * n))
    top = tuple(m - 1 for m in sizes)
    inf_mass = born[(Ellipsis,) + top] if n else born
    pairs = np.argwhere(finite != 0)
    fm = finite[tuple(pairs.T)] if len(pairs) else np.zeros(0, dtype=np.int64)
    births = np.argwhere(inf_mass != 0)
    im = inf_mass[tuple(births.T)] if len(births) else np.zeros(0, dtype=np.int64)
    return pairs, fm, births, im


def push_rank(pairs, fm, births, im, iota: GridInclusion) -> SignedMeasure:
    n = len(iota.maps)
    rows = []
    if len(pairs):
        rows.append(np.hstack([iota(pairs[:, :n]), iota(pairs[:, n:])]))
    if len(births):
        rows.append(np.hstack([iota(births), np.full((len(births), n), np.inf)]))
    locs = np.vstack(rows) if rows else np.zeros((0, 2 * n))
    return SignedMeasure(locs, np.concatenate([fm, im]), n, BARS)


def rank_measure(f: Filtration, i: int) -> SignedMeasure:
    _, ordf, iota = stratify(f)
    return push_rank(*rank_measure_on_grid(rank_grid(ordf, i)), iota)


def sorted_hilbert(f: Filtration, i: int) -> SortedHilbert:
    mu = hilbert_measure(f, i)
    pos, _ = mu.expanded(+1)
    neg, _ = mu.expanded(-1)
    _, ordf, _ = stratify(f)
    # canonical measures are already lexicographically sorted
    return SortedHilbert(CellId.of(ordf), np.array(pos), np.array(neg))


class Landscape:
    """Evaluated k-th multiparameter persistence landscape of one filtration.

    ``lambda(z)`` is the largest ``eps`` with rk(z - eps, z + eps) >= k along
    the diagonal direction. For a grid pair (a, b) with rk(a, b) >= k the
    rank stays >= k while the lower end is above ``iota(a)`` and the upper
    end stays strictly inside the box below the successor corner of ``b``
    (coordinates at the top of the grid are unbounded). The landscape is the
    max over such pairs of the smaller of the two exit distances; only
    Pareto-maximal ``b`` per ``a`` can attain the max.
    """

    def __init__(self, f: Filtration, i: int, k: int, rank: RankGrid | None = None):
        if k < 1:
            raise ValueError("landscape level k must be >= 1")
        grid, ordf, iota = stratify(f)
        self.f, self.degree, self.k = f, i, k
        self.grid, self.ord, self.iota = grid, ordf, iota
        self.rank = rank_grid(ordf, i) if rank is None else rank
        sizes = grid.sizes
        n = len(sizes)
        ok = _comparable_mask(sizes) & (self.rank.table >= k)
        maximal = ok.copy()
        for j in range(n):
            ax = n + j
            nxt = np.zeros_like(ok)
            src = [slice(None)] * (2 * n)
            dst = [slice(None)] * (2 * n)
            src[ax] = slice(1, None)
            dst[ax] = slice(0, -1)
            nxt[tuple(dst)] = ok[tuple(src)]
            maximal &= ~nxt
        pairs = np.argwhere(maximal)
        self.lower_idx = pairs[:, :n]
        self.upper_idx = pairs[:, n:] + 1
        self._refresh(iota)

    def _refresh(self, iota: GridInclusion):
        n = len(self.grid.sizes)
        sizes = np.array(self.grid.sizes)
        self.lower = iota(self.lower_idx) if len(self.lower_idx) else np.zeros((0, n))
        upper = np.full((len(self.upper_idx), n), np.inf)
        for j in range(n):
            inside = self.upper_idx[:, j] < sizes[j]
            upper[inside, j] = iota.maps[j][self.upper_idx[inside, j]]
        self.upper = upper

    def pushed(self, iota: GridInclusion) -> "Landscape":
        """Same grid data, evaluated at another inclusion of the same grid."""
        other = object.__new__(Landscape)
        other.__dict__.update(self.__dict__)
        other.iota = iota
        other._refresh(iota)
        return other

    def _terms(self, z):
        z = np.asarray(z, dtype=np.float64)
        below = np.all(self.lower <= z, axis=1)
        gap_down = z - self.lower
        down = np.where(below, gap_down.min(axis=1), 0.0) if len(gap_down) else np.zeros(0)
        gap_up = self.upper - z
        up = np.maximum(gap_up.min(axis=1), 0.0) if len(gap_up) else np.zeros(0)
        return down, up, gap_down, gap_up

    def __call__(self, z) -> float:
        down, up, _, _ = self._terms(z)
        if len(down) == 0:
            return 0.0
        return float(np.minimum(down, up).max())

    def active(self, z):
        """Value and the single affine piece realizing it.

        Returns ``(value, term, j, level)``: ``term`` is ``"down"`` when the
        value equals ``z_j - iota_j(level)``, ``"up"`` when it equals
        ``iota_j(level) - z_j``, and ``None`` when the value is 0.
        """
        down, up, gap_down, gap_up = self._terms(z)
        if len(down) == 0:
            return 0.0, None, -1, -1
        vals = np.minimum(down, up)
        c = int(np.argmax(vals))
        value = float(vals[c])
        if value <= 0.0:
            return 0.0, None, -1, -1
        if down[c] <= up[c]:
            j = int(np.argmin(gap_down[c]))
            return value, "down", j, int(self.lower_idx[c, j])
        j = int(np.argmin(gap_up[c]))
        return value, "up", j, int(self.upper_idx[c, j])


def landscape(f: Filtration, i: int, k: int, z) -> float:
    return Landscape(f, i, k)(z)
