"""n-parameter filtrations and the point-cloud constructors that produce them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .complex import SimplicialComplex, Subcomplex
from .errors import (
    DimensionMismatch,
    LengthMismatch,
    MissingVertexValue,
    MpgradError,
    NonpositiveBandwidth,
    NotMonotone,
)


def _face_arrays(K: SimplicialComplex) -> list[np.ndarray]:
    """Per dimension d >= 1, an (m_d, d+1) array of codimension-one faces."""
    cached = getattr(K, "_face_arrays", None)
    if cached is None:
        cached = [np.zeros((0, 0), dtype=np.int64)]
        for d in range(1, K.dimension + 1):
            idx = K.by_dim[d]
            cached.append(np.array([K.faces[k] for k in idx], dtype=np.int64).reshape(len(idx), d + 1))
        K._face_arrays = cached
    return cached


@dataclass(frozen=True)
class RipsWitness:
    """Which inputs realize each simplex value in a Rips-type filtration.

    ``edge[k]`` holds the two point indices of the longest edge of simplex
    ``k`` (lowest edge index on ties, ``-1`` for vertices). ``density_vertex[k]``
    is the vertex attaining the codensity coordinate, when there is one.
    """

    edge: np.ndarray
    density_vertex: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class Filtration:
    complex: SimplicialComplex
    values: np.ndarray
    witness: RipsWitness | None = field(default=None, repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.ndim != 2 or vals.shape[0] != len(self.complex) or vals.shape[1] < 1:
            raise DimensionMismatch(
                f"values of shape {vals.shape} do not match {len(self.complex)} simplices"
            )
        if not np.all(np.isfinite(vals)):
            raise MpgradError("filtration values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def sublevel(self, r) -> Subcomplex:
        r = np.asarray(r, dtype=np.float64)
        return Subcomplex(self.complex, np.all(self.values <= r, axis=1), check=False)

    def with_values(self, values) -> "Filtration":
        return Filtration(self.complex, values)


def validate_filtration(f: Filtration) -> Filtration:
    """Raise :class:`NotMonotone` naming the first face-order violation."""
    K = f.complex
    for d, faces in enumerate(_face_arrays(K)):
        if d == 0 or faces.size == 0:
            continue
        idx = K.by_dim[d]
        bad = np.any(f.values[faces] > f.values[idx][:, None, :], axis=2)
        if np.any(bad):
            row, col = np.argwhere(bad)[0]
            sigma, tau = idx[row], faces[row, col]
            raise NotMonotone(
                f"face {K.labelled(tau)} has value {f.values[tau].tolist()} above "
                f"{K.labelled(sigma)} with value {f.values[sigma].tolist()}"
            )
    return f


def project_monotone(K: SimplicialComplex, values) -> np.ndarray:
    """Smallest face-monotone values dominating ``values`` (max over faces, by dimension)."""
    out = np.array(values, dtype=np.float64, copy=True)
    if out.ndim == 1:
        out = out[:, None]
    for d, faces in enumerate(_face_arrays(K)):
        if d == 0 or faces.size == 0:
            continue
        idx = K.by_dim[d]
        out[idx] = np.maximum(out[idx], out[faces].max(axis=1))
    return out


def lower_star(K: SimplicialComplex, vertex_values) -> Filtration:
    """Extend vertex values to simplices by coordinate-wise max."""
    if isinstance(vertex_values, Mapping):
        rows = []
        for v in K.vertices:
            if v not in vertex_values:
                raise MissingVertexValue(f"no value for vertex {v!r}")
            rows.append(np.atleast_1d(np.asarray(vertex_values[v], dtype=np.float64)))
        vv = np.vstack(rows)
    else:
        vv = np.asarray(vertex_values, dtype=np.float64)
        if vv.ndim == 1:
            vv = vv[:, None]
        if vv.shape[0] != len(K.vertices):
            raise MissingVertexValue(f"expected {len(K.vertices)} vertex values, got {vv.shape[0]}")
    values = np.empty((len(K), vv.shape[1]))
    for k, s in enumerate(K.simplices):
        values[k] = vv[list(s)].max(axis=0)
    return Filtration(K, values)


def vertex_values(f: Filtration) -> np.ndarray:
    return np.asarray(f.values[f.complex.by_dim[0]])


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise MpgradError("a point cloud needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise MpgradError("point coordinates must be finite")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]


def as_points(X) -> np.ndarray:
    if isinstance(X, PointCloud):
        return X.points
    return PointCloud(X).points


@dataclass(frozen=True)
class DensityEstimate:
    values: np.ndarray
    bandwidth: float
    kernel: str = "gaussian"
    scale: float = 1.0


def diameter(X) -> float:
    X = as_points(X)
    if len(X) < 2:
        return 0.0
    return float(pdist(X).max())


def default_bandwidth(X) -> float:
    """0.2 times the diameter; 1.0 for a cloud with zero diameter."""
    diam = diameter(X)
    return 0.2 * diam if diam > 0 else 1.0


def kde_scale(d: int, bandwidth: float, normalized: bool) -> float:
    """1 for the plain kernel mean, (2 pi h^2)^(-d/2) for a probability density."""
    return (2.0 * np.pi * bandwidth**2) ** (-d / 2.0) if normalized else 1.0


def gaussian_kde(X, bandwidth: float, normalized: bool = False) -> DensityEstimate:
    """Mean Gaussian kernel at each point; ``normalized`` makes it integrate to one."""
    if not bandwidth > 0:
        raise NonpositiveBandwidth(f"bandwidth must be positive, got {bandwidth}")
    X = as_points(X)
    sq = squareform(pdist(X, "sqeuclidean")) if len(X) > 1 else np.zeros((1, 1))
    c = kde_scale(X.shape[1], bandwidth, normalized)
    dens = c * np.exp(-sq / (2.0 * bandwidth**2)).mean(axis=1)
    return DensityEstimate(dens, float(bandwidth), scale=c)


def _rips_complex(dist: np.ndarray, max_dim: int, max_radius: float):
    N = dist.shape[0]
    adj = dist <= max_radius
    layers = [[(v,) for v in range(N)]]
    for d in range(1, max_dim + 1):
        nxt = []
        for s in layers[-1]:
            common = np.ones(N, dtype=bool)
            for v in s:
                common &= adj[v]
            for v in range(s[-1] + 1, N):
                if common[v]:
                    nxt.append(s + (v,))
        if not nxt:
            break
        layers.append(nxt)
    return layers


def vietoris_rips(X, max_dim: int = 2, max_radius: float = np.inf) -> Filtration:
    """Euclidean Vietoris-Rips filtration truncated at ``max_dim`` and ``max_radius``."""
    if max_dim < 1:
        raise MpgradError("max_dim must be at least 1")
    X = as_points(X)
    N = len(X)
    dist = squareform(pdist(X)) if N > 1 else np.zeros((1, 1))
    layers = _rips_complex(dist, max_dim, max_radius)
    simplices = [s for layer in layers for s in layer]
    K = SimplicialComplex(range(N), simplices, check=False)
    values = np.zeros(len(K))
    edge = np.full((len(K), 2), -1, dtype=np.int64)
    offset = N
    for layer in layers[1:]:
        arr = np.array(layer, dtype=np.int64)
        m, q = arr.shape
        pairs = np.array([(a, b) for a in range(q) for b in range(a + 1, q)], dtype=np.int64)
        lengths = dist[arr[:, pairs[:, 0]], arr[:, pairs[:, 1]]]
        best = np.argmax(lengths, axis=1)
        rows = np.arange(m)
        values[offset:offset + m] = lengths[rows, best]
        edge[offset:offset + m, 0] = arr[rows, pairs[best, 0]]
        edge[offset:offset + m, 1] = arr[rows, pairs[best, 1]]
        offset += m
    return Filtration(K, values[:, None], RipsWitness(edge))


def function_rips(X, density: DensityEstimate, max_dim: int = 2, max_radius: float = np.inf) -> Filtration:
    """Rips scale in the first coordinate, codensity (negated density) in the second."""
    X = as_points(X)
    dens = np.asarray(density.values, dtype=np.float64)
    if dens.shape != (len(X),):
        raise LengthMismatch(f"{len(dens)} density values for {len(X)} points")
    vr = vietoris_rips(X, max_dim, max_radius)
    K = vr.complex
    codensity = -dens
    arg = np.empty(len(K), dtype=np.int64)
    second = np.empty(len(K))
    for k, s in enumerate(K.simplices):
        j = s[int(np.argmax(codensity[list(s)]))]
        arg[k] = j
        second[k] = codensity[j]
    values = np.column_stack([vr.values[:, 0], second])
    return Filtration(K, values, RipsWitness(vr.witness.edge, arg))
