"""Stochastic subgradient method x_{k+1} = x_k - a_k (y_k + zeta_k)."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .autodiff import LossSpec, PipelineSpec, loss_gradient, pointcloud_gradient
from .errors import ConfigError, NonFiniteGradient, NonSummableSchedule
from .filtrations import Filtration, default_bandwidth, diameter, project_monotone


@dataclass(frozen=True)
class Harmonic:
    a0: float = 0.1

    def __post_init__(self):
        if not self.a0 > 0:
            raise ConfigError("a0 must be positive")

    def __call__(self, k: int) -> float:
        return self.a0 / (k + 1)


@dataclass(frozen=True)
class PolynomialDecay:
    """a_k = a0 / (k+1)^exponent; summable squares need exponent > 1/2."""

    a0: float = 0.1
    exponent: float = 0.75

    def __post_init__(self):
        if not self.a0 > 0:
            raise ConfigError("a0 must be positive")
        if not 0.5 < self.exponent <= 1.0:
            raise ConfigError(f"exponent must lie in (0.5, 1], got {self.exponent}")

    def __call__(self, k: int) -> float:
        return self.a0 / (k + 1) ** self.exponent


@dataclass(frozen=True)
class Constant:
    """Fixed step. Its squares are not summable, so convergence is not guaranteed."""

    a0: float = 0.01

    def __post_init__(self):
        if not self.a0 > 0:
            raise ConfigError("a0 must be positive")
        warnings.warn("constant step sizes have non-summable squares", NonSummableSchedule, stacklevel=2)

    def __call__(self, k: int) -> float:
        return self.a0


def make_schedule(kind: str, a0: float, exponent: float = 0.75):
    if kind == "harmonic":
        return Harmonic(a0)
    if kind == "polynomial":
        return PolynomialDecay(a0, exponent)
    if kind == "constant":
        return Constant(a0)
    raise ConfigError(f"unknown schedule {kind!r}; use harmonic, polynomial or constant")


@dataclass
class OptimizationState:
    """Iterate (array of filtration values or point coordinates) and run bookkeeping."""

    x: np.ndarray
    k: int = 0
    losses: list[float] = field(default_factory=list)
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0))
    box: tuple[float, float] | None = None
    noise: float = 0.0

    def dump(self) -> dict:
        return {"k": self.k, "losses": list(self.losses), "x": np.asarray(self.x).tolist()}


GradientFn = Callable[[np.ndarray], tuple[float, np.ndarray]]


def step(state: OptimizationState, gradient: GradientFn, schedule,
         repair: Callable[[np.ndarray], np.ndarray] | None = None) -> OptimizationState:
    """One update; ``gradient(x)`` returns the loss at ``x`` and a subgradient."""
    value, y = gradient(state.x)
    y = np.asarray(y, dtype=np.float64)
    if not (np.all(np.isfinite(y)) and math.isfinite(value)):
        raise NonFiniteGradient(f"non-finite loss or gradient at step {state.k}", state.dump())
    if state.noise > 0:
        y = y + state.rng.normal(0.0, state.noise, size=y.shape)
    x = state.x - schedule(state.k) * y
    if state.box is not None:
        x = np.clip(x, *state.box)
    if repair is not None:
        x = repair(x)
    state.x = x
    state.k += 1
    state.losses.append(float(value))
    return state


def optimize_filtration(f: Filtration, spec: LossSpec, schedule, steps: int, seed: int = 0,
                        box=None, noise: float = 0.0) -> tuple[Filtration, OptimizationState]:
    """Descend directly on filtration values, re-monotonizing after every step."""
    if steps < 1:
        raise ConfigError("need at least one step")
    K = f.complex

    def grad(x):
        value, g = loss_gradient(Filtration(K, x), spec)
        return value, g.values

    state = OptimizationState(np.array(f.values), rng=np.random.default_rng(seed), box=box, noise=noise)
    for _ in range(steps):
        step(state, grad, schedule, repair=lambda x: project_monotone(K, x))
    return Filtration(K, state.x), state


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    loss: float
    points: np.ndarray
    diameter: float
    max_norm: float


def optimize_pointcloud(X0, pipeline: PipelineSpec, spec: LossSpec, schedule, epochs: int, seed: int = 0,
                        box=None, noise: float = 0.0) -> list[EpochRecord]:
    """Run ``epochs`` subgradient steps on a point cloud.

    The filtration (and, for function-Rips, the density estimate with its
    bandwidth) is rebuilt at the start of every epoch. The returned
    trajectory has ``epochs + 1`` records; the last holds the final cloud and
    its loss.
    """
    if epochs < 1:
        raise ConfigError("epochs must be at least 1")
    X = np.array(X0, dtype=np.float64)
    state = OptimizationState(X, rng=np.random.default_rng(seed), box=box, noise=noise)

    def grad(x):
        frozen = pipeline
        if pipeline.kind == "function_rips" and pipeline.bandwidth is None:
            frozen = PipelineSpec(pipeline.kind, pipeline.max_dim, pipeline.max_radius, default_bandwidth(x),
                                  pipeline.normalized)
        return pointcloud_gradient(x, frozen, spec)

    traj = []
    for epoch in range(epochs):
        before = state.x
        step(state, grad, schedule)
        traj.append(_record(epoch, state.losses[-1], before))
    final, _ = grad(state.x)
    traj.append(_record(epochs, final, state.x))
    return traj


def _record(epoch, loss, X) -> EpochRecord:
    return EpochRecord(epoch, float(loss), np.array(X), diameter(X), float(np.linalg.norm(X, axis=1).max()))
