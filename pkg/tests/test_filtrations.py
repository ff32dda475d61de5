import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mpgrad.complex import validate_complex
from mpgrad.errors import LengthMismatch, MissingVertexValue, NonpositiveBandwidth, NotMonotone
from mpgrad.filtrations import (
    DensityEstimate,
    Filtration,
    default_bandwidth,
    function_rips,
    gaussian_kde,
    lower_star,
    project_monotone,
    validate_filtration,
    vertex_values,
    vietoris_rips,
)

from conftest import complexes

EDGE = [["a"], ["b"], ["a", "b"]]


def test_lower_star_takes_coordinatewise_max():
    K = validate_complex(EDGE)
    f = lower_star(K, {"a": (0, 0), "b": (1, 0)})
    assert f.values.tolist() == [[0, 0], [1, 0], [1, 0]]
    f = lower_star(K, {"a": (0, 1), "b": (1, 0)})
    assert f.values[2].tolist() == [1, 1]


def test_lower_star_single_vertex_and_missing_value():
    K = validate_complex([["a"]])
    assert lower_star(K, {"a": (5, -2)}).values.tolist() == [[5, -2]]
    with pytest.raises(MissingVertexValue):
        lower_star(validate_complex(EDGE), {"a": (0, 0)})


@given(complexes(), st.integers(0, 2**32 - 1))
def test_lower_star_idempotent(K, seed):
    vv = np.random.default_rng(seed).normal(size=(len(K.vertices), 2))
    f = lower_star(K, vv)
    g = lower_star(K, vertex_values(f))
    assert np.array_equal(f.values, g.values)
    validate_filtration(f)


def test_validate_rejects_non_monotone():
    K = validate_complex(EDGE)
    with pytest.raises(NotMonotone, match="above"):
        validate_filtration(Filtration(K, [[0.0], [2.0], [1.0]]))


def test_filtration_values_are_finite_and_frozen():
    K = validate_complex(EDGE)
    with pytest.raises(ValueError):
        Filtration(K, [[0.0], [math.nan], [1.0]])
    f = Filtration(K, [[0.0], [1.0], [1.0]])
    with pytest.raises(ValueError):
        f.values[0, 0] = 3.0


@given(complexes(), st.integers(0, 2**32 - 1))
def test_project_monotone_is_an_idempotent_repair(K, seed):
    raw = np.random.default_rng(seed).normal(size=(len(K), 2))
    once = project_monotone(K, raw)
    validate_filtration(Filtration(K, once))
    assert np.array_equal(project_monotone(K, once), once)
    assert np.all(once >= raw)


def test_equilateral_triangle():
    X = np.array([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
    f = vietoris_rips(X, max_dim=2, max_radius=2)
    K = f.complex
    assert len(K) == 7
    assert np.allclose(f.values[:3, 0], 0)
    assert np.allclose(f.values[3:, 0], 1)


def test_rips_radius_threshold():
    f = vietoris_rips([[0.0], [5.0]], max_dim=2, max_radius=2)
    assert len(f.complex) == 2


def test_rips_collinear_edges():
    f = vietoris_rips([[0.0], [1.0], [3.0]], max_dim=1, max_radius=10)
    assert sorted(f.values[3:, 0].tolist()) == [1.0, 2.0, 3.0]
    assert f.complex.dimension == 1


@given(st.integers(0, 2**32 - 1))
def test_rips_value_is_max_edge(seed):
    X = np.random.default_rng(seed).normal(size=(6, 2))
    f = vietoris_rips(X, max_dim=3)
    K = f.complex
    for k, s in enumerate(K.simplices):
        if len(s) >= 2:
            edges = [f.values[K.index[(a, b)], 0] for i, a in enumerate(s) for b in s[i + 1:]]
            assert f.values[k, 0] == max(edges)
            u, v = f.witness.edge[k]
            assert f.values[k, 0] == f.values[K.index[(u, v)], 0]
            assert f.values[k, 0] == pytest.approx(np.linalg.norm(X[u] - X[v]), rel=1e-14)


def test_kde_closed_forms():
    assert gaussian_kde([[0.0, 0.0]], 0.3).values.tolist() == [1.0]
    assert gaussian_kde([[1.0], [1.0]], 0.3).values.tolist() == [1.0, 1.0]
    d = gaussian_kde([[0.0], [0.7]], 0.7).values
    assert np.allclose(d, (1 + math.exp(-0.5)) / 2, rtol=0, atol=1e-15)
    with pytest.raises(NonpositiveBandwidth):
        gaussian_kde([[0.0]], 0.0)


def test_default_bandwidth():
    assert default_bandwidth([[0.0, 0.0], [3.0, 4.0]]) == pytest.approx(1.0)
    assert default_bandwidth([[1.0, 1.0]]) == 1.0


def test_function_rips_small_cases():
    f = function_rips([[0.0, 0.0]], gaussian_kde([[0.0, 0.0]], 1.0))
    assert f.values.tolist() == [[0.0, -1.0]]
    X = [[0.0], [1.0]]
    dens = gaussian_kde(X, 1.0)
    f = function_rips(X, dens)
    assert f.values[2].tolist() == [1.0, -dens.values[0]]
    with pytest.raises(LengthMismatch):
        function_rips(X, DensityEstimate(np.ones(3), 1.0))


@given(st.integers(0, 2**32 - 1))
def test_function_rips_is_monotone(seed):
    X = np.random.default_rng(seed).uniform(size=(8, 2))
    f = function_rips(X, gaussian_kde(X, default_bandwidth(X)))
    validate_filtration(f)
    # exhaustive face check, independent of validate_filtration
    K = f.complex
    for k, s in enumerate(K.simplices):
        for face in K.faces[k]:
            assert np.all(f.values[face] <= f.values[k])
