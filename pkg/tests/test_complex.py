import numpy as np
import pytest
from hypothesis import given, strategies as st

from mpgrad.complex import (
    BoundaryMatrix,
    Subcomplex,
    boundary_matrix,
    cycle_basis,
    euler_characteristic,
    homology_dimension,
    inclusion_rank,
    rank_f2,
    rank_f2_dense,
    validate_complex,
)
from mpgrad.errors import DuplicateSimplex, EmptySimplex, MissingFace, NotNested

import oracles
from conftest import complexes

TRIANGLE = [["a"], ["b"], ["c"], ["a", "b"], ["b", "c"], ["a", "c"]]


def sub(K, members):
    mask = np.zeros(len(K), dtype=bool)
    for s in members:
        mask[K.index[tuple(sorted(K.vertices.index(v) for v in s))]] = True
    return Subcomplex(K, mask)


def test_smallest_edge_complex():
    K = validate_complex([["a"], ["b"], ["a", "b"]])
    assert K.vertices == ("a", "b")
    assert K.count(0) == 2 and K.count(1) == 1 and K.dimension == 1


def test_missing_face_names_both_simplices():
    with pytest.raises(MissingFace) as e:
        validate_complex([["a", "b"]])
    assert e.value.simplex == ("a", "b")
    assert e.value.face in {("a",), ("b",)}


def test_duplicate_and_empty():
    with pytest.raises(DuplicateSimplex):
        validate_complex([["a"], ["a"]])
    with pytest.raises(DuplicateSimplex):
        validate_complex([["a"], ["b"], ["a", "b"], ["b", "a"]])
    with pytest.raises(EmptySimplex):
        validate_complex([["a"], []])
    with pytest.raises(EmptySimplex):
        validate_complex([])


def test_triangle_boundary():
    K = validate_complex(TRIANGLE)
    assert K.dimension == 1
    full = Subcomplex.full(K)
    assert homology_dimension(full, 1) == 1
    assert homology_dimension(full, 0) == 1


def test_filled_triangle_kills_cycle():
    K = validate_complex(TRIANGLE + [["a", "b", "c"]])
    assert homology_dimension(Subcomplex.full(K), 1) == 0
    r = sub(K, TRIANGLE)
    assert inclusion_rank(r, Subcomplex.full(K), 1) == 0


def test_two_isolated_vertices():
    K = validate_complex([["a"], ["b"]])
    assert homology_dimension(Subcomplex.full(K), 0) == 2


def test_inclusion_rank_edge_merges_components():
    K = validate_complex([["a"], ["b"], ["a", "b"]])
    r = sub(K, [["a"], ["b"]])
    assert inclusion_rank(r, Subcomplex.full(K), 0) == 1
    assert inclusion_rank(r, r, 0) == 2


def test_not_nested():
    K = validate_complex([["a"], ["b"], ["a", "b"]])
    with pytest.raises(NotNested):
        inclusion_rank(Subcomplex.full(K), sub(K, [["a"]]), 0)


def test_subcomplex_rejects_missing_face():
    K = validate_complex([["a"], ["b"], ["a", "b"]])
    mask = np.array([True, False, True])
    with pytest.raises(MissingFace):
        Subcomplex(K, mask)


def test_degree_above_dimension_is_zero():
    K = validate_complex(TRIANGLE)
    assert homology_dimension(Subcomplex.full(K), 7) == 0
    assert inclusion_rank(Subcomplex.full(K), Subcomplex.full(K), 5) == 0


def test_boundary_columns_have_faces():
    K = validate_complex(TRIANGLE + [["a", "b", "c"]])
    B = boundary_matrix(K, 2)
    assert B.shape == (3, 1)
    assert B.columns == ((0, 1, 2),)
    for col in boundary_matrix(K, 1).columns:
        assert len(col) == 2


@given(complexes(max_dim=3, max_simplices=40))
def test_boundary_squares_to_zero(K):
    for i in range(2, K.dimension + 1):
        prod = boundary_matrix(K, i - 1).to_dense().astype(int) @ boundary_matrix(K, i).to_dense().astype(int)
        assert not np.any(prod % 2)


@given(complexes())
def test_dense_and_sparse_ranks_agree(K):
    for i in range(K.dimension + 1):
        B = boundary_matrix(K, i)
        assert rank_f2(B, "dense") == rank_f2(B, "sparse") == oracles.f2_rank(B.to_dense())


def test_rank_auto_switches_to_sparse_for_large_matrices():
    B = BoundaryMatrix(1, (5000, 1), ((0, 1),))
    assert rank_f2(B) == 1


def test_dense_rank_on_identity():
    assert rank_f2_dense(np.eye(5, dtype=np.uint8)) == 5


@st.composite
def nested_triples(draw):
    K = draw(complexes())
    order = draw(st.permutations(range(len(K))))
    # sublevel sets of a random monotone ranking are nested subcomplexes
    rank = np.empty(len(K), dtype=int)
    rank[list(order)] = np.arange(len(K))
    for k in np.argsort([len(s) for s in K.simplices], kind="stable"):
        for f in K.faces[k]:
            rank[k] = max(rank[k], rank[f] + 1)
    cuts = sorted(draw(st.lists(st.integers(-1, int(rank.max())), min_size=3, max_size=3)))
    return K, [Subcomplex(K, rank <= c) for c in cuts]


@given(nested_triples())
def test_rank_composition_bound(data):
    K, (A, B, C) = data
    for i in range(K.dimension + 1):
        ac = inclusion_rank(A, C, i)
        assert ac <= min(inclusion_rank(A, B, i), inclusion_rank(B, C, i))
        assert inclusion_rank(A, A, i) == homology_dimension(A, i)


@given(nested_triples())
def test_homology_matches_dense_oracle(data):
    K, subs = data
    for S in subs:
        for i in range(K.dimension + 1):
            assert homology_dimension(S, i) == oracles.betti(K.simplices, S.mask, i)
    for i in range(K.dimension + 1):
        assert inclusion_rank(subs[0], subs[2], i) == oracles.inclusion_rank(K.simplices, subs[0].mask, subs[2].mask, i)


@given(nested_triples())
def test_euler_characteristic(data):
    K, subs = data
    for S in subs:
        alt = sum((-1) ** i * homology_dimension(S, i) for i in range(K.dimension + 1))
        assert alt == euler_characteristic(S)


def test_cycle_basis_of_triangle():
    K = validate_complex(TRIANGLE)
    z = cycle_basis(Subcomplex.full(K), 1)
    assert z == [0b111]
