import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mpgrad.complex import Subcomplex, homology_dimension, validate_complex
from mpgrad.descriptors import (
    Landscape,
    hilbert_grid,
    hilbert_measure,
    landscape,
    rank_grid,
    rank_measure,
    sorted_hilbert,
)
from mpgrad.filtrations import Filtration
from mpgrad.measures import SignedMeasure
from mpgrad.stratification import GridInclusion, cell_id, from_incl, stratify

import oracles
from conftest import filtrations

EDGE = validate_complex([["a"], ["b"], ["a", "b"]])
TWO_VERTEX = Filtration(EDGE, [[0, 0], [1, 0], [1, 1]])
CHAIN = Filtration(EDGE, [[0], [1], [2]])
TRIANGLE = validate_complex([["a"], ["b"], ["c"], ["a", "b"], ["b", "c"], ["a", "c"]])


def grid_points(sizes):
    return itertools.product(*(range(m) for m in sizes))


# Hilbert function

def test_two_vertex_hilbert_table():
    _, ordf, _ = stratify(TWO_VERTEX)
    table = hilbert_grid(ordf, 0).table
    # frozen from the pointwise homology oracle
    assert {p: int(table[p]) for p in grid_points((2, 2))} == {(0, 0): 1, (1, 0): 2, (0, 1): 1, (1, 1): 1}


def test_trivial_hilbert_tables():
    single = Filtration(validate_complex([["a"]]), [[0.0]])
    assert hilbert_grid(stratify(single)[1], 0).table.tolist() == [1]
    cyc = Filtration(TRIANGLE, np.zeros((6, 1)))
    assert hilbert_grid(stratify(cyc)[1], 1).table.tolist() == [1]


@given(filtrations(n=2, max_dim=3, max_simplices=30))
def test_hilbert_grid_matches_oracle(f):
    _, ordf, iota = stratify(f)
    for i in range(f.complex.dimension + 2):
        table = hilbert_grid(ordf, i).table
        assert np.all(table >= 0)
        for p in grid_points(ordf.grid.sizes):
            assert table[p] == oracles.betti(f.complex.simplices, oracles.sublevel_mask(f.values, iota(p)), i)


def test_two_vertex_hilbert_measure():
    mu = hilbert_measure(TWO_VERTEX, 0)
    expected = SignedMeasure([[0, 0], [1, 0], [1, 1]], [1, 1, -1], 2)
    assert mu == expected
    for p in grid_points((2, 2)):
        assert mu.mass_below(p) == hilbert_grid(stratify(TWO_VERTEX)[1], 0).table[p]


def test_single_vertex_measure():
    f = Filtration(validate_complex([["a"]]), [[1.5, -2.0, 0.25]])
    assert hilbert_measure(f, 0) == SignedMeasure([[1.5, -2.0, 0.25]], [1], 3)


@given(filtrations(n=2, max_dim=3))
def test_hilbert_total_mass_and_identity(f):
    _, ordf, iota = stratify(f)
    for i in range(f.complex.dimension + 1):
        mu = hilbert_measure(f, i)
        assert mu.total_mass == homology_dimension(Subcomplex.full(f.complex), i)
        table = hilbert_grid(ordf, i).table
        for p in grid_points(ordf.grid.sizes):
            assert mu.mass_below(iota(p)) == table[p]


def test_degenerate_measure_is_empty():
    f = Filtration(EDGE, [[0], [0], [0]])
    assert len(hilbert_measure(f, 1)) == 0


# rank invariant

def test_rank_examples():
    _, ordf, _ = stratify(TWO_VERTEX)
    assert rank_grid(ordf, 0)((1, 0), (1, 1)) == 1
    rk = rank_grid(stratify(CHAIN)[1], 0)
    assert (rk((0,), (2,)), rk((1,), (2,)), rk((1,), (1,))) == (1, 1, 2)


@given(filtrations(n=2, max_simplices=20))
def test_rank_grid_matches_oracle(f):
    _, ordf, iota = stratify(f)
    sizes = ordf.grid.sizes
    S = f.complex.simplices
    for i in range(f.complex.dimension + 1):
        rk = rank_grid(ordf, i)
        hil = hilbert_grid(ordf, i).table
        for a in grid_points(sizes):
            assert rk(a, a) == hil[a]
            for b in grid_points(sizes):
                if all(x <= y for x, y in zip(a, b)):
                    want = oracles.inclusion_rank(S, oracles.sublevel_mask(f.values, iota(a)),
                                                  oracles.sublevel_mask(f.values, iota(b)), i)
                    assert rk(a, b) == want
                else:
                    assert rk(a, b) == 0


@given(filtrations(n=2))
def test_rank_monotonicity(f):
    _, ordf, _ = stratify(f)
    sizes = ordf.grid.sizes
    rk = rank_grid(ordf, 0)
    pts = list(grid_points(sizes))
    le = lambda x, y: all(u <= v for u, v in zip(x, y))  # noqa: E731
    for p, q in itertools.product(pts, pts):
        if not le(p, q):
            continue
        for p2, q2 in itertools.product(pts, pts):
            if le(p2, p) and le(q, q2):
                assert rk(p2, q2) <= rk(p, q)


def test_chain_rank_measure():
    assert rank_measure(CHAIN, 0) == SignedMeasure([[0, math.inf], [1, 2]], [1, 1], 1, "bars")
    single = Filtration(validate_complex([["a"]]), [[3.0]])
    assert rank_measure(single, 0) == SignedMeasure([[3.0, math.inf]], [1], 1, "bars")


def _assert_rank_identity(f, i):
    _, ordf, iota = stratify(f)
    rk = rank_grid(ordf, i)
    mu = rank_measure(f, i)
    sizes = ordf.grid.sizes
    for a in grid_points(sizes):
        for b in grid_points(sizes):
            if all(x <= y for x, y in zip(a, b)):
                assert mu.mass_of_hook_set(iota(a), iota(b)) == rk(a, b)
        assert mu.mass_of_hook_set(iota(a)) == rk(a)


@given(filtrations(n=2, max_simplices=30))
def test_rank_defining_identity(f):
    for i in range(f.complex.dimension + 1):
        _assert_rank_identity(f, i)


@given(filtrations(n=1, levels=6, max_dim=3, max_simplices=40))
def test_one_parameter_barcode(f):
    for i in range(f.complex.dimension + 1):
        mu = rank_measure(f, i)
        assert np.all(mu.mults > 0)
        got = sorted((float(b), float(d)) for (b, d), m in zip(mu.locations, mu.mults) for _ in range(m))
        assert got == oracles.classical_barcode(f.complex.simplices, f.values, i)


# sorted Hilbert

def test_sorted_hilbert_two_vertex():
    sh = sorted_hilbert(TWO_VERTEX, 0)
    assert sh.cell == cell_id(TWO_VERTEX)
    assert sh.positives.tolist() == [[0, 0], [1, 0]]
    assert sh.negatives.tolist() == [[1, 1]]
    single = sorted_hilbert(Filtration(validate_complex([["a"]]), [[2.0]]), 0)
    assert single.positives.tolist() == [[2.0]] and single.negatives.shape[0] == 0


@given(filtrations(n=2), st.integers(0, 2**32 - 1))
def test_sorted_hilbert_counts_constant_on_cell(f, seed):
    rng = np.random.default_rng(seed)
    _, ordf, iota = stratify(f)
    kappa = GridInclusion(tuple(np.cumsum(rng.uniform(0.1, 2.0, size=len(m))) + rng.normal() for m in iota.maps))
    g = from_incl(ordf, kappa)
    for i in range(2):
        a, b = sorted_hilbert(f, i), sorted_hilbert(g, i)
        assert a.cell == b.cell
        assert len(a.positives) == len(b.positives) and len(a.negatives) == len(b.negatives)
        assert np.array_equal(np.lexsort(a.positives.T[::-1]), np.arange(len(a.positives)))


# landscapes

def test_chain_landscape():
    assert landscape(CHAIN, 0, 2, [1.5]) == 0.5
    assert landscape(CHAIN, 0, 1, [1.5]) == 1.5
    assert landscape(CHAIN, 0, 1, [-1.0]) == 0.0
    assert landscape(CHAIN, 0, 3, [1.5]) == 0.0
    with pytest.raises(ValueError):
        Landscape(CHAIN, 0, 0)


def landscape_oracle(f, i, k, z, eps_grid):
    """Largest grid epsilon with rank(z - eps, z + eps) >= k, by direct rank evaluation."""
    best = 0.0
    S = f.complex.simplices
    for eps in eps_grid:
        lo = oracles.sublevel_mask(f.values, z - eps)
        hi = oracles.sublevel_mask(f.values, z + eps)
        if oracles.inclusion_rank(S, lo, hi, i) >= k:
            best = eps
    return best


def test_chain_landscape_matches_oracle():
    eps = np.linspace(0, 3, 3001)
    for z in (0.25, 0.9, 1.5, 1.75, 2.5):
        for k in (1, 2):
            want = landscape_oracle(CHAIN, 0, k, np.array([z]), eps)
            assert landscape(CHAIN, 0, k, [z]) == pytest.approx(want, abs=2e-3)


@given(filtrations(n=2, levels=5, max_simplices=18), st.integers(0, 2**32 - 1))
def test_landscape_matches_oracle(f, seed):
    rng = np.random.default_rng(seed)
    eps = np.linspace(0, 6, 601)
    for _ in range(3):
        z = rng.uniform(-0.5, 5.0, size=2)
        for i, k in ((0, 1), (0, 2), (1, 1)):
            L = Landscape(f, i, k)(z)
            want = landscape_oracle(f, i, k, z, eps)
            # the sup is attained as an open upper limit: the grid value lies one step below
            assert want <= L + 1e-12
            if math.isfinite(L) and L < 5.5:
                assert L - want <= 0.01 + 1e-12


@given(filtrations(n=2), st.integers(0, 2**32 - 1))
def test_landscape_active_piece_reproduces_value(f, seed):
    rng = np.random.default_rng(seed)
    L = Landscape(f, 0, 1)
    for _ in range(5):
        z = rng.uniform(-1, 4, size=2)
        value, term, j, level = L.active(z)
        assert value == L(z)
        if term == "down":
            assert value == z[j] - L.iota.maps[j][level]
        elif term == "up":
            assert value == L.iota.maps[j][level] - z[j]
        else:
            assert value == 0.0


def test_infinite_landscape_when_class_never_dies():
    # the essential class of H_0 gives an infinite upper distance
    assert landscape(CHAIN, 0, 1, [5.0]) == 5.0
