"""Subgradients of descriptor losses.

The chain rule runs in three stages. A loss is differentiated with respect
to the locations of the descriptor's masses (or landscape values). Every
mass location is the image under ``iota`` of a grid point, so these
gradients accumulate on the grid-inclusion coordinates ``kappa_j(level)``.
Finally ``kappa_j(level)`` equals ``f_j`` of the carrier simplex of that
level, which is where the gradient is deposited. Point-cloud pipelines
continue the chain through the Rips witnesses and the KDE.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .descriptors import (
    Landscape,
    hilbert_measure_on_grid,
    push_hilbert,
    push_rank,
    rank_grid,
    rank_measure_on_grid,
)
from .errors import DegenerateEdge, IncompatibleLoss, MpgradError
from .filtrations import (
    DensityEstimate,
    Filtration,
    as_points,
    default_bandwidth,
    function_rips,
    gaussian_kde,
    vietoris_rips,
)
from .measures import BARS, RN, SignedMeasure
from .stratification import GridInclusion, choose_carrier, stratify
from .transport import ot_distance, ot_subgradient

HILBERT = "hilbert"
RANK = "rank"
LANDSCAPE = "landscape"
DESCRIPTORS = (HILBERT, RANK, LANDSCAPE)


# integrands

@dataclass(frozen=True, eq=False)
class GaussianMixture:
    """psi(p) = sum_i w_i exp(-(p - c_i)^T inv(S_i) (p - c_i)) with S_i = L_i L_i^T."""

    centers: np.ndarray
    factors: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=np.float64))
        m, n = c.shape
        L = np.asarray(self.factors, dtype=np.float64).reshape(m, n, n)
        w = np.asarray(self.weights, dtype=np.float64).reshape(m)
        if not np.all(np.isfinite(w)):
            raise MpgradError("mixture weights must be finite")
        S = L @ np.swapaxes(L, 1, 2)
        try:
            np.linalg.cholesky(S)
        except np.linalg.LinAlgError:
            raise MpgradError("covariance factors must give positive definite matrices") from None
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "factors", L)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "_prec", np.linalg.inv(S))

    @classmethod
    def isotropic(cls, centers, scale: float, weights=None) -> "GaussianMixture":
        c = np.atleast_2d(np.asarray(centers, dtype=np.float64))
        m, n = c.shape
        L = np.broadcast_to(np.sqrt(scale) * np.eye(n), (m, n, n)).copy()
        w = np.ones(m) if weights is None else weights
        return cls(c, L, w)

    def value_and_grad(self, P: np.ndarray):
        d = P[:, None, :] - self.centers[None]
        Md = np.einsum("mij,pmj->pmi", self._prec, d)
        terms = self.weights * np.exp(-np.einsum("pmi,pmi->pm", d, Md))
        return terms.sum(axis=1), -2.0 * np.einsum("pm,pmi->pi", terms, Md)


@dataclass(frozen=True)
class NormPower:
    """psi(x) = ||x||_p^p = sum_j |x_j|^p."""

    p: float = 2.0

    def value_and_grad(self, P: np.ndarray):
        a = np.abs(P)
        return (a**self.p).sum(axis=1), self.p * np.sign(P) * a ** (self.p - 1)


# losses

@dataclass(frozen=True, eq=False)
class DistanceToMeasure:
    target: SignedMeasure


@dataclass(frozen=True, eq=False)
class Integration:
    psi: GaussianMixture | NormPower


@dataclass(frozen=True, eq=False)
class LandscapeTarget:
    """Squared l2 distance between landscape values at ``points`` and ``target``."""

    points: np.ndarray
    k: int = 1
    target: np.ndarray | None = None

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
        tgt = np.zeros(len(pts)) if self.target is None else np.asarray(self.target, dtype=np.float64).reshape(-1)
        if len(tgt) != len(pts):
            raise MpgradError(f"{len(tgt)} target values for {len(pts)} sample points")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "target", tgt)


@dataclass(frozen=True, eq=False)
class LossSpec:
    loss: DistanceToMeasure | Integration | LandscapeTarget
    descriptor: str = HILBERT
    degree: int = 0
    sign: int = 1

    def __post_init__(self):
        if self.descriptor not in DESCRIPTORS:
            raise IncompatibleLoss(f"unknown descriptor {self.descriptor!r}")
        if self.sign not in (1, -1):
            raise IncompatibleLoss("sign must be +1 (minimize) or -1 (maximize)")
        if self.degree < 0:
            raise IncompatibleLoss("homology degree must be nonnegative")
        if isinstance(self.loss, LandscapeTarget) != (self.descriptor == LANDSCAPE):
            raise IncompatibleLoss("landscape losses go with the landscape descriptor only")
        if isinstance(self.loss, Integration) and self.descriptor != HILBERT:
            raise IncompatibleLoss("integration losses are defined on the Hilbert measure")
        if isinstance(self.loss, DistanceToMeasure):
            want = RN if self.descriptor == HILBERT else BARS
            if self.loss.target.ground != want:
                raise IncompatibleLoss(f"{self.descriptor} measures live on {want!r}, target on {self.loss.target.ground!r}")

    def __neg__(self) -> "LossSpec":
        return LossSpec(self.loss, self.descriptor, self.degree, -self.sign)


@dataclass(frozen=True, eq=False)
class FiltrationGradient:
    """Gradient with the shape of ``Filtration.values``.

    ``points`` holds the gradient with respect to landscape sample points when
    the loss has them.
    """

    values: np.ndarray
    points: np.ndarray | None = field(default=None, repr=False)


def _levels(iota: GridInclusion, locs: np.ndarray, j: int) -> np.ndarray:
    """Grid levels of finite location coordinates (exact lookup: locations are iota values)."""
    return np.searchsorted(iota.maps[j], locs)


def _accumulate(iota: GridInclusion, locs: np.ndarray, grads: np.ndarray, n: int) -> list[np.ndarray]:
    """Sum location gradients onto the inclusion coordinates ``kappa_j(level)``."""
    dk = [np.zeros(len(m)) for m in iota.maps]
    width = locs.shape[1]
    for c in range(width):
        j = c % n
        col = locs[:, c]
        ok = np.isfinite(col) & (grads[:, c] != 0)
        if np.any(ok):
            np.add.at(dk[j], _levels(iota, col[ok], j), grads[ok, c])
    return dk


def _deposit(f: Filtration, ordf, dk: list[np.ndarray]) -> np.ndarray:
    carrier = choose_carrier(ordf)
    out = np.zeros(f.values.shape)
    for j, lev in enumerate(carrier.levels):
        np.add.at(out[:, j], lev, dk[j])
    return out


def _measure(ordf, iota, spec: LossSpec) -> SignedMeasure:
    if spec.descriptor == HILBERT:
        return push_hilbert(*hilbert_measure_on_grid(ordf, spec.degree), iota)
    return push_rank(*rank_measure_on_grid(rank_grid(ordf, spec.degree)), iota)


def descriptor_measure(f: Filtration, spec: LossSpec) -> SignedMeasure:
    _, ordf, iota = stratify(f)
    return _measure(ordf, iota, spec)


def _evaluate(f: Filtration, spec: LossSpec, with_grad: bool):
    _, ordf, iota = stratify(f)
    n = f.n
    loss = spec.loss
    if isinstance(loss, LandscapeTarget):
        if loss.points.shape[1] != n:
            raise IncompatibleLoss(f"sample points in R^{loss.points.shape[1]} for a {n}-filtration")
        L = Landscape(f, spec.degree, loss.k)
        dk = [np.zeros(len(m)) for m in iota.maps]
        dz = np.zeros(loss.points.shape)
        total = []
        for m, z in enumerate(loss.points):
            val, term, j, level = L.active(z)
            resid = val - loss.target[m]
            total.append(resid * resid)
            if term is None:
                continue
            # d value / d kappa_j(level) and d value / d z_j
            s = -1.0 if term == "down" else 1.0
            dk[j][level] += 2.0 * resid * s
            dz[m, j] -= 2.0 * resid * s
        value = math.fsum(total)
        if not with_grad:
            return spec.sign * value, None
        grad = _deposit(f, ordf, dk)
        return spec.sign * value, FiltrationGradient(spec.sign * grad, spec.sign * dz)

    mu = _measure(ordf, iota, spec)
    if isinstance(loss, DistanceToMeasure):
        if loss.target.n != n:
            raise IncompatibleLoss(f"target measure has n={loss.target.n}, filtration n={n}")
        value, assignment = ot_distance(mu, loss.target)
        if not with_grad:
            return spec.sign * value, None
        g_loc, _ = ot_subgradient(assignment, mu, loss.target)
    elif isinstance(loss, Integration):
        psi, dpsi = loss.psi.value_and_grad(mu.locations) if len(mu) else (np.zeros(0), np.zeros((0, n)))
        value = math.fsum((mu.mults * psi).tolist())
        if not with_grad:
            return spec.sign * value, None
        g_loc = mu.mults[:, None] * dpsi
    else:
        raise IncompatibleLoss(f"unsupported loss {type(loss).__name__}")
    grad = _deposit(f, ordf, _accumulate(iota, mu.locations, g_loc, n))
    return spec.sign * value, FiltrationGradient(spec.sign * grad)


def loss_value(f: Filtration, spec: LossSpec) -> float:
    return _evaluate(f, spec, False)[0]


def loss_gradient(f: Filtration, spec: LossSpec) -> tuple[float, FiltrationGradient]:
    """Loss value and a Clarke subgradient with respect to the filtration values."""
    return _evaluate(f, spec, True)


# point clouds

@dataclass(frozen=True)
class PipelineSpec:
    """Filtration constructor applied to a point cloud.

    ``kind`` is ``"rips"`` or ``"function_rips"``; ``bandwidth=None`` means
    the default (0.2 times the diameter), frozen at each evaluation.
    """

    kind: str = "function_rips"
    max_dim: int = 2
    max_radius: float = math.inf
    bandwidth: float | None = None
    normalized: bool = False

    def __post_init__(self):
        if self.kind not in ("rips", "function_rips"):
            raise MpgradError(f"unknown pipeline {self.kind!r}")

    def build(self, X) -> tuple[Filtration, DensityEstimate | None]:
        X = as_points(X)
        if self.kind == "rips":
            return vietoris_rips(X, self.max_dim, self.max_radius), None
        h = default_bandwidth(X) if self.bandwidth is None else self.bandwidth
        dens = gaussian_kde(X, h, self.normalized)
        return function_rips(X, dens, self.max_dim, self.max_radius), dens


def kde_gradient(X: np.ndarray, bandwidth: float, weights: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Gradient of sum_v weights[v] * rho(x_v) with respect to every point.

    rho(x_v) = scale * mean_w exp(-|x_v - x_w|^2 / 2h^2), so (up to ``scale``)
    d rho_v / d x_v = -(1/N) sum_w k_vw (x_v - x_w) / h^2 and
    d rho_v / d x_w = (1/N) k_vw (x_v - x_w) / h^2.
    """
    N = len(X)
    diff = X[:, None, :] - X[None, :, :]
    kern = np.exp(-(diff**2).sum(axis=2) / (2.0 * bandwidth**2))
    pair = (scale * weights[:, None] * kern)[:, :, None] * diff / (N * bandwidth**2)
    return -pair.sum(axis=1) + pair.sum(axis=0)


def pointcloud_gradient(X, pipeline: PipelineSpec, spec: LossSpec) -> tuple[float, np.ndarray]:
    """Loss of the filtration built from ``X`` and its gradient in the point coordinates."""
    X = np.array(as_points(X), dtype=np.float64)
    f, dens = pipeline.build(X)
    value, g = loss_gradient(f, spec)
    G = g.values
    out = np.zeros_like(X)
    w = f.witness
    # scale coordinate: value of k is |x_u - x_v| for its witness edge
    hit = np.flatnonzero((G[:, 0] != 0) & (w.edge[:, 0] >= 0))
    if len(hit):
        u, v = w.edge[hit, 0], w.edge[hit, 1]
        d = X[u] - X[v]
        length = np.linalg.norm(d, axis=1)
        if np.any(length == 0):
            warnings.warn("zero-length maximal edge; its gradient is set to zero", DegenerateEdge, stacklevel=2)
        unit = np.divide(d, length[:, None], out=np.zeros_like(d), where=length[:, None] > 0)
        contrib = G[hit, 0][:, None] * unit
        np.add.at(out, u, contrib)
        np.add.at(out, v, -contrib)
    if dens is not None and f.n > 1:
        # codensity coordinate: value of k is -rho(x_v) for its witness vertex
        weights = np.zeros(len(X))
        np.add.at(weights, w.density_vertex, G[:, 1])
        out -= kde_gradient(X, dens.bandwidth, weights, dens.scale)
    return value, out
