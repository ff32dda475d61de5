"""Exact optimal transport between discrete signed measures.

Signed problems are reduced to positive ones through the Jordan parts:
OT(mu, nu) = OT(mu+ + nu-, nu+ + mu-). The positive problem is an
assignment problem solved exactly with the Hungarian method. On bars, mass
may also be sent to the diagonal, which is handled by the usual
augmentation of the cost matrix with diagonal slots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import GroundSpaceMismatch, InfiniteCost, ProblemTooLarge
from .measures import BARS, RN, SignedMeasure

MAX_MASSES = 5000
DIAGONAL = -1


@dataclass(frozen=True)
class GroundMetric:
    """``rn``: l-infinity on R^n. ``bars``: l-infinity on (birth, death) pairs with the diagonal."""

    tag: str = RN

    def pairwise(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        if len(A) == 0 or len(B) == 0:
            return np.zeros((len(A), len(B)))
        with np.errstate(invalid="ignore"):
            diff = np.abs(A[:, None, :] - B[None, :, :])
        # |inf - inf| = 0
        diff = np.where(np.isinf(A[:, None, :]) & np.isinf(B[None, :, :]), 0.0, diff)
        return diff.max(axis=2)

    def __call__(self, x, y) -> float:
        x = np.asarray(x, dtype=np.float64)[None]
        y = np.asarray(y, dtype=np.float64)[None]
        return float(self.pairwise(x, y)[0, 0])

    def to_diagonal(self, A: np.ndarray) -> np.ndarray:
        n = A.shape[1] // 2
        return np.abs(A[:, n:] - A[:, :n]).max(axis=1) / 2.0 if len(A) else np.zeros(0)

    def project(self, A: np.ndarray) -> np.ndarray:
        """Nearest diagonal point (midpoint bar) of each bar."""
        n = A.shape[1] // 2
        mid = (A[:, :n] + A[:, n:]) / 2.0
        return np.hstack([mid, mid])


@dataclass(frozen=True, eq=False)
class Assignment:
    """Matched pairs ``beta[i] -> gamma[i]`` and the sources of each side.

    ``beta_src[i]`` / ``gamma_src[i]`` is ``(measure, row)`` with ``measure``
    0 for the first argument of :func:`ot_distance`, 1 for the second, and
    ``DIAGONAL`` for a diagonal point. ``costs[i]`` is the price of pair i.
    """

    beta: np.ndarray
    gamma: np.ndarray
    beta_src: np.ndarray
    gamma_src: np.ndarray
    cost: float
    costs: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _sides(mu: SignedMeasure, nu: SignedMeasure):
    a_mu, r_mu = mu.expanded(+1)
    a_nu, r_nu = nu.expanded(-1)
    b_nu, s_nu = nu.expanded(+1)
    b_mu, s_mu = mu.expanded(-1)
    A = np.vstack([a_mu, a_nu])
    B = np.vstack([b_nu, b_mu])
    A_src = np.vstack([np.column_stack([np.zeros_like(r_mu), r_mu]), np.column_stack([np.ones_like(r_nu), r_nu])])
    B_src = np.vstack([np.column_stack([np.ones_like(s_nu), s_nu]), np.column_stack([np.zeros_like(s_mu), s_mu])])
    return A, A_src.astype(np.int64).reshape(-1, 2), B, B_src.astype(np.int64).reshape(-1, 2)


def _empty(width: int, cost: float) -> Assignment:
    z = np.zeros((0, width))
    s = np.zeros((0, 2), dtype=np.int64)
    return Assignment(z, z, s, s, cost)


def _match(C: np.ndarray):
    if C.size == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return linear_sum_assignment(C)


def _diag_src(m: int) -> np.ndarray:
    return np.column_stack([np.full(m, DIAGONAL), np.full(m, DIAGONAL)]).astype(np.int64).reshape(-1, 2)


def _bars_assignment(A, A_src, B, B_src, metric: GroundMetric):
    n = A.shape[1] // 2
    parts = []
    a_inf = np.isinf(A[:, n]) if len(A) else np.zeros(0, dtype=bool)
    b_inf = np.isinf(B[:, n]) if len(B) else np.zeros(0, dtype=bool)
    if a_inf.sum() != b_inf.sum():
        return None
    Ai, Bi = A[a_inf], B[b_inf]
    rows, cols = _match(metric.pairwise(Ai[:, :n], Bi[:, :n]))
    parts.append((Ai[rows], Bi[cols], A_src[a_inf][rows], B_src[b_inf][cols]))

    Af, Bf = A[~a_inf], B[~b_inf]
    Af_src, Bf_src = A_src[~a_inf], B_src[~b_inf]
    p, q = len(Af), len(Bf)
    if p + q:
        C = np.zeros((p + q, q + p))
        C[:p, :q] = metric.pairwise(Af, Bf)
        C[:p, q:] = metric.to_diagonal(Af)[:, None]
        C[p:, :q] = metric.to_diagonal(Bf)[None, :]
        rows, cols = _match(C)
        real = (rows < p) & (cols < q)
        parts.append((Af[rows[real]], Bf[cols[real]], Af_src[rows[real]], Bf_src[cols[real]]))
        to_diag = rows[(rows < p) & (cols >= q)]
        parts.append((Af[to_diag], metric.project(Af[to_diag]), Af_src[to_diag], _diag_src(len(to_diag))))
        from_diag = cols[(rows >= p) & (cols < q)]
        parts.append((metric.project(Bf[from_diag]), Bf[from_diag], _diag_src(len(from_diag)), Bf_src[from_diag]))
    return parts


def _pair_costs(beta, gamma, metric: GroundMetric) -> np.ndarray:
    if len(beta) == 0:
        return np.zeros(0)
    with np.errstate(invalid="ignore"):
        diff = np.abs(beta - gamma)
    diff = np.where(np.isinf(beta) & np.isinf(gamma), 0.0, diff)
    return diff.max(axis=1)


def _key(mu: SignedMeasure) -> tuple:
    return (len(mu), mu.locations.tobytes(), mu.mults.tobytes())


def _swap(a: Assignment) -> Assignment:
    def flip(src):
        out = src.copy()
        real = out[:, 0] != DIAGONAL
        out[real, 0] = 1 - out[real, 0]
        return out

    return Assignment(a.gamma, a.beta, flip(a.gamma_src), flip(a.beta_src), a.cost, a.costs)


def ot_distance(mu: SignedMeasure, nu: SignedMeasure, metric: GroundMetric | None = None) -> tuple[float, Assignment]:
    """Exact OT cost between two signed measures and an optimal assignment.

    Returns ``(inf, empty assignment)`` when no transport plan exists: unequal
    masses on R^n, or unequal counts of bars dying at infinity.
    """
    if (mu.n, mu.ground) != (nu.n, nu.ground):
        raise GroundSpaceMismatch(f"measures live on ({mu.n}, {mu.ground}) and ({nu.n}, {nu.ground})")
    metric = GroundMetric(mu.ground) if metric is None else metric
    if metric.tag != mu.ground:
        raise GroundSpaceMismatch(f"metric {metric.tag!r} does not match ground space {mu.ground!r}")
    # solve in a canonical argument order so that the result is exactly symmetric
    if _key(nu) < _key(mu):
        cost, a = _solve(nu, mu, metric)
        return cost, _swap(a)
    return _solve(mu, nu, metric)


def _solve(mu: SignedMeasure, nu: SignedMeasure, metric: GroundMetric) -> tuple[float, Assignment]:
    width = mu.locations.shape[1]
    A, A_src, B, B_src = _sides(mu, nu)
    if len(A) + len(B) > MAX_MASSES:
        raise ProblemTooLarge(f"{len(A) + len(B)} masses exceed the limit of {MAX_MASSES}")
    if metric.tag == RN:
        if len(A) != len(B):
            return math.inf, _empty(width, math.inf)
        rows, cols = _match(metric.pairwise(A, B))
        parts = [(A[rows], B[cols], A_src[rows], B_src[cols])]
    else:
        parts = _bars_assignment(A, A_src, B, B_src, metric)
        if parts is None:
            return math.inf, _empty(width, math.inf)
    beta = np.vstack([p[0] for p in parts]).reshape(-1, width)
    gamma = np.vstack([p[1] for p in parts]).reshape(-1, width)
    bsrc = np.vstack([p[2] for p in parts]).reshape(-1, 2)
    gsrc = np.vstack([p[3] for p in parts]).reshape(-1, 2)
    costs = _pair_costs(beta, gamma, metric)
    if metric.tag == BARS and len(beta):
        # charge diagonal matches the closed-form distance, not the distance to the rounded midpoint
        to_diag = bsrc[:, 0] == DIAGONAL
        costs[to_diag] = metric.to_diagonal(gamma[to_diag])
        from_diag = gsrc[:, 0] == DIAGONAL
        costs[from_diag] = metric.to_diagonal(beta[from_diag])
    cost = math.fsum(costs.tolist())
    return cost, Assignment(beta, gamma, bsrc, gsrc, cost, costs)


def _linf_grad(delta: np.ndarray) -> np.ndarray:
    """Gradient of ||delta||_inf: signed unit vector on the lowest maximizing coordinate."""
    out = np.zeros_like(delta)
    if len(delta) == 0:
        return out
    mag = np.where(np.isfinite(delta), np.abs(delta), -1.0)
    best = mag.max(axis=1)
    j = np.argmax(mag == best[:, None], axis=1)
    rows = np.arange(len(delta))
    out[rows, j] = np.sign(delta[rows, j])
    return out


def ot_subgradient(assignment: Assignment, mu: SignedMeasure, nu: SignedMeasure,
                   metric: GroundMetric | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of the assignment cost with respect to the locations of ``mu`` and ``nu``.

    Rows align with ``mu.locations`` and ``nu.locations``; masses of
    multiplicity m accumulate the contributions of their m atoms.
    """
    if not math.isfinite(assignment.cost):
        raise InfiniteCost("no finite transport plan to differentiate")
    metric = GroundMetric(mu.ground) if metric is None else metric
    grads = [np.zeros(mu.locations.shape), np.zeros(nu.locations.shape)]
    beta, gamma = assignment.beta, assignment.gamma
    if len(beta) == 0:
        return grads[0], grads[1]
    bsrc, gsrc = assignment.beta_src, assignment.gamma_src
    n = mu.n
    with np.errstate(invalid="ignore"):
        delta = np.where(np.isinf(beta) & np.isinf(gamma), 0.0, beta - gamma)
    g = _linf_grad(delta)
    if metric.tag == BARS:
        # diagonal matches: cost max_j |s_j - r_j| / 2 of the real bar
        for side, src, bars, sgn in ((0, bsrc, beta, 1.0), (1, gsrc, gamma, -1.0)):
            diag_other = (bsrc[:, 0] == DIAGONAL) if side == 1 else (gsrc[:, 0] == DIAGONAL)
            if not np.any(diag_other):
                continue
            b = bars[diag_other]
            dg = _linf_grad(b[:, n:] - b[:, :n]) / 2.0
            g_rows = np.hstack([-dg, dg])
            # convert to the convention "gradient w.r.t. beta" used below
            g[diag_other] = sgn * g_rows
    for k in range(len(beta)):
        m, r = bsrc[k]
        if m != DIAGONAL:
            grads[m][r] += g[k]
        m, r = gsrc[k]
        if m != DIAGONAL:
            grads[m][r] -= g[k]
    return grads[0], grads[1]
