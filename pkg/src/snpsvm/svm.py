"""Linear soft-margin SVM trained through its dual quadratic program.

The dual is

    maximize  sum(a) - 1/2 * sum_ij y_i y_j a_i a_j <x_i, x_j>
    s.t.      sum(a * y) = 0,  0 <= a_i <= C

and is solved by pairwise coordinate ascent: each step moves two
multipliers along the direction that keeps ``sum(a * y)`` fixed.  The first
index is the maximal violator of the first-order optimality conditions and
its partner is chosen by second-order gain.  Once per pass the free
multipliers are additionally moved toward the exact optimum of their face,
which removes the zig-zagging that pairwise steps show for large ``C``.
``C = inf`` gives the hard-margin machine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import DegenerateModelError, SchemaError, UsageError

HARD_MARGIN_C = 1e12
MAX_PASSES_CAP = 100_000


class LabeledVector(NamedTuple):
    x: Sequence[float]
    y: int


def stack(data: Sequence[LabeledVector]) -> tuple:
    """Split a list of labelled vectors into an (l, n) matrix and a label vector."""
    if not data:
        raise UsageError("no labelled vectors")
    X = np.array([np.asarray(d.x, dtype=np.float64) for d in data])
    y = np.array([d.y for d in data], dtype=np.float64)
    return X, y


@dataclass(frozen=True)
class SvmConfig:
    C: float = 1.0
    kkt_tolerance: float = 1e-6
    max_passes: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if not self.C > 0:
            raise UsageError(f"C must be positive, got {self.C}")
        if not self.kkt_tolerance > 0:
            raise UsageError(f"kkt_tolerance must be positive, got {self.kkt_tolerance}")
        if self.max_passes is not None and self.max_passes < 1:
            raise UsageError("max_passes must be a positive integer")

    @property
    def hard_margin(self) -> bool:
        return math.isinf(self.C)

    @property
    def effective_C(self) -> float:
        return HARD_MARGIN_C if self.hard_margin else float(self.C)


@dataclass(frozen=True, eq=False)
class SvmModel:
    w: np.ndarray
    b: float
    alphas: np.ndarray
    config: SvmConfig = field(default_factory=SvmConfig)

    @property
    def support_indices(self) -> np.ndarray:
        return np.flatnonzero(self.alphas > 0)

    @property
    def dimension(self) -> int:
        return len(self.w)

    def same_as(self, other: "SvmModel") -> bool:
        """Exact equality of every stored number (used for round-trip checks)."""
        return (np.array_equal(self.w, other.w) and self.b == other.b
                and np.array_equal(self.alphas, other.alphas) and self.config == other.config)


@dataclass(frozen=True)
class SolveDiagnostics:
    dual_objective: float
    primal_objective: float
    slack_sum: float
    max_kkt_violation: float
    iterations: int
    converged: bool
    notes: tuple = ()

    @property
    def duality_gap(self) -> float:
        return self.primal_objective - self.dual_objective


class Classification(NamedTuple):
    label: int
    score: float
    tie: bool


def _check_data(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] < 1:
        raise SchemaError(f"expected an (l, n) feature matrix with n >= 1, got shape {X.shape}")
    if y.ndim != 1 or len(y) != len(X):
        raise SchemaError(f"{len(y)} labels for {len(X)} vectors")
    if not np.isfinite(X).all():
        raise SchemaError("non-finite feature value")
    if not np.isin(y, (-1.0, 1.0)).all():
        raise UsageError("labels must be +1 or -1")
    return X, y


def dual_objective(alphas, X, y) -> float:
    X, y = _check_data(X, y)
    alphas = np.asarray(alphas, dtype=np.float64)
    if alphas.shape != y.shape:
        raise UsageError(f"{len(alphas)} multipliers for {len(y)} vectors")
    v = (alphas * y) @ X
    return float(alphas.sum() - 0.5 * v @ v)


def _offset(w, X, y, alphas, C):
    """Mean of y_i - w.x_i over free multipliers, else the middle of the feasible interval."""
    f = X @ w
    free = (alphas > 0) & (alphas < C)
    if free.any():
        return float(np.mean(y[free] - f[free]))
    # a_i = 0 needs y_i (f_i + b) >= 1, a_i = C needs y_i (f_i + b) <= 1
    at_zero = alphas == 0
    lower_mask = (at_zero & (y > 0)) | (~at_zero & (y < 0))
    upper_mask = ~lower_mask
    lo = np.max(y[lower_mask] - f[lower_mask]) if lower_mask.any() else -np.inf
    hi = np.min(y[upper_mask] - f[upper_mask]) if upper_mask.any() else np.inf
    if np.isinf(lo) and np.isinf(hi):
        return 0.0
    if np.isinf(lo):
        return float(hi)
    if np.isinf(hi):
        return float(lo)
    return float(0.5 * (lo + hi))


def slacks(model: SvmModel, X, y) -> np.ndarray:
    """Margin violations max(0, 1 - y_i f(x_i))."""
    X, y = _check_data(X, y)
    return np.maximum(0.0, 1.0 - y * (X @ model.w + model.b))


def primal_objective(model: SvmModel, X, y) -> float:
    """1/2 |w|^2 + C * sum(slack); the hard-margin problem has no slack term."""
    half_norm = 0.5 * float(model.w @ model.w)
    if model.config.hard_margin:
        return half_norm
    return half_norm + model.config.C * float(slacks(model, X, y).sum())


def kkt_violation(model: SvmModel, X, y, C: Optional[float] = None) -> float:
    """Largest violation of the optimality conditions of ``model`` on the data.

    Covers the complementary-slackness conditions per point, the balance
    constraint ``sum(a * y) = 0`` and the identity ``w = sum(a_i y_i x_i)``.
    """
    X, y = _check_data(X, y)
    if X.shape[1] != model.dimension:
        raise SchemaError(f"model has dimension {model.dimension}, data {X.shape[1]}")
    C = model.config.effective_C if C is None else (HARD_MARGIN_C if math.isinf(C) else C)
    a = model.alphas
    margin = y * (X @ model.w + model.b)
    at_zero = a <= 0
    at_c = a >= C
    free = ~at_zero & ~at_c
    per_point = np.zeros(len(y))
    per_point[at_zero] = np.maximum(0.0, 1.0 - margin[at_zero])
    per_point[free] = np.abs(margin[free] - 1.0)
    per_point[at_c] = np.maximum(0.0, margin[at_c] - 1.0)
    balance = abs(float(a @ y))
    reconstruction = float(np.max(np.abs(model.w - (a * y) @ X)))
    return float(max(per_point.max(initial=0.0), balance, reconstruction))


def _pair_step(i, j, a, y, K, G, C):
    """Move a_i by +y_i t and a_j by -y_j t, maximising the dual along that line."""
    gap = -y[i] * G[i] + y[j] * G[j]
    curvature = K[i, i] + K[j, j] - 2.0 * K[i, j]
    t = gap / curvature if curvature > 1e-12 else np.inf
    bound_i = C - a[i] if y[i] > 0 else a[i]
    bound_j = a[j] if y[j] > 0 else C - a[j]
    t = min(t, bound_i, bound_j)
    old_i, old_j = a[i], a[j]
    if t == bound_i:
        a[i] = C if y[i] > 0 else 0.0
    else:
        a[i] = min(max(old_i + y[i] * t, 0.0), C)
    if t == bound_j:
        a[j] = 0.0 if y[j] > 0 else C
    else:
        a[j] = min(max(old_j - y[j] * t, 0.0), C)
    d_i = a[i] - old_i
    d_j = a[j] - old_j
    # gradient of 1/2 a'Qa - sum(a), Q_kl = y_k y_l K_kl
    G += y * (K[:, i] * (y[i] * d_i) + K[:, j] * (y[j] * d_j))
    return t


def _polish(a, y, K, G, C):
    """Move the free multipliers toward the optimum of their current face.

    The face optimum solves the stationarity system on the free set with the
    bounded multipliers held fixed.  The move is clipped to the box, so it
    can only shrink the free set, and is kept only if the dual increases.
    """
    free = (a > 0) & (a < C)
    F = np.flatnonzero(free)
    k = len(F)
    if k < 2:
        return False
    B = np.flatnonzero(~free)
    yF = y[F]
    M = np.zeros((k + 1, k + 1))
    M[:k, :k] = np.outer(yF, yF) * K[np.ix_(F, F)]
    M[:k, k] = yF
    M[k, :k] = yF
    rhs = np.empty(k + 1)
    rhs[:k] = 1.0 - yF * (K[np.ix_(F, B)] @ (a[B] * y[B]))
    rhs[k] = -(a[B] @ y[B])
    # along null directions of [Q_FF; y_F'] the dual is linear: follow its
    # slope to the nearest bound instead of solving an inconsistent system
    _, sv, vt = np.linalg.svd(M[:, :k])
    rank = int(np.sum(sv > 1e-10 * max(sv[0], 1e-300)))
    null = vt[rank:].T
    d = -null @ (null.T @ G[F]) if null.shape[1] else np.zeros(k)
    to_bound = np.linalg.norm(d) > 1e-12 * max(1.0, np.linalg.norm(G[F]))
    if not to_bound:
        sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
        if np.max(np.abs(M @ sol - rhs)) > 1e-9 * max(1.0, np.max(np.abs(rhs))):
            return False
        d = sol[:k] - a[F]
    with np.errstate(divide="ignore", invalid="ignore"):
        limits = np.where(d > 0, (C - a[F]) / d, np.where(d < 0, -a[F] / d, np.inf))
    step = float(limits.min()) if to_bound else min(1.0, float(limits.min()))
    if not step > 0:
        return False
    delta = step * d
    # change in 1/2 a'Qa - sum(a); negative means the dual went up
    change = G[F] @ delta + 0.5 * delta @ M[:k, :k] @ delta
    if not change < 0:
        return False
    new = a[F] + delta
    hit = limits <= step
    new[hit & (d > 0)] = C
    new[hit & (d < 0)] = 0.0
    new = np.clip(new, 0.0, C)
    delta = new - a[F]
    a[F] = new
    G += y * (K[:, F] @ (yF * delta))
    return True


def _violating_pair(a, y, G, C, K=None):
    """Pick (i, j) and report the optimality gap m - M.

    i is the maximal violator; j maximises the guaranteed dual increase
    gap_ij^2 / curvature_ij among partners that violate with i.  Without
    ``K`` j falls back to the minimal score (first-order choice).
    """
    score = -y * G
    up = ((y > 0) & (a < C)) | ((y < 0) & (a > 0))
    low = ((y > 0) & (a > 0)) | ((y < 0) & (a < C))
    if not up.any() or not low.any():
        return None, None, 0.0
    i = int(np.argmax(np.where(up, score, -np.inf)))
    gap = float(score[i] - np.min(np.where(low, score, np.inf)))
    if K is None:
        return i, int(np.argmin(np.where(low, score, np.inf))), gap
    diff = score[i] - score
    curvature = K[i, i] + np.diag(K) - 2.0 * K[i]
    curvature = np.where(curvature > 1e-12, curvature, 1e-12)
    gain = np.where(low & (diff > 0), diff * diff / curvature, -np.inf)
    j = int(np.argmax(gain))
    if not np.isfinite(gain[j]):
        j = int(np.argmin(np.where(low, score, np.inf)))
    return i, j, gap


def train(X, y, config: SvmConfig = SvmConfig(),
          callback: Optional[Callable[[np.ndarray], None]] = None) -> tuple:
    """Fit the maximal-margin hyperplane; returns ``(SvmModel, SolveDiagnostics)``.

    ``callback`` is invoked with a copy of the multipliers after every pair
    update.  Non-convergence is reported through ``diagnostics.converged``
    rather than raised.
    """
    X, y = _check_data(X, y)
    l, n = X.shape
    if l < 2:
        raise UsageError("need at least two labelled vectors")
    if not ((y > 0).any() and (y < 0).any()):
        raise UsageError("both classes must be present")
    C = config.effective_C
    passes = config.max_passes or min(10 * l * n, MAX_PASSES_CAP)
    max_iter = passes * l
    eps = 1e-3 * config.kkt_tolerance

    K = X @ X.T
    a = np.zeros(l)
    G = -np.ones(l)
    iterations = 0
    while iterations < max_iter:
        i, j, gap = _violating_pair(a, y, G, C, K)
        if i is None or gap <= eps:
            # refresh the accumulated gradient before declaring optimality
            G = y * (K @ (a * y)) - 1.0
            i, j, gap = _violating_pair(a, y, G, C, K)
            if i is None or gap <= eps:
                break
        _pair_step(i, j, a, y, K, G, C)
        iterations += 1
        if iterations % l == 0:
            _polish(a, y, K, G, C)
        if callback is not None:
            callback(a.copy())

    # rounding residue next to a bound would otherwise pin b to an arbitrary point
    snap = 1e-12 * max(1.0, float(a.max()))
    a[a <= snap] = 0.0
    a[a >= C - snap] = C
    w = (a * y) @ X
    b = _offset(w, X, y, a, C)
    model = SvmModel(w=w, b=b, alphas=a, config=config)
    violation = kkt_violation(model, X, y)
    notes = []
    if config.hard_margin:
        notes.append(f"hard margin solved with C={HARD_MARGIN_C:g}")
    diagnostics = SolveDiagnostics(
        dual_objective=dual_objective(a, X, y),
        primal_objective=primal_objective(model, X, y),
        slack_sum=float(slacks(model, X, y).sum()),
        max_kkt_violation=violation,
        iterations=iterations,
        converged=bool(violation <= config.kkt_tolerance),
        notes=tuple(notes),
    )
    return model, diagnostics


def decision_values(model: SvmModel, X) -> np.ndarray:
    """w.x + b for every row of ``X``.

    Accumulated feature by feature, left to right, so a row's value does not
    depend on which other rows are evaluated alongside it.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.dimension:
        raise UsageError(f"expected (m, {model.dimension}) matrix, got shape {X.shape}")
    acc = np.zeros(len(X))
    for k in range(model.dimension):
        acc = acc + X[:, k] * model.w[k]
    return acc + model.b


def decision_value(model: SvmModel, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != model.w.shape:
        raise UsageError(f"expected a vector of dimension {model.dimension}, got shape {x.shape}")
    return float(decision_values(model, x[None, :])[0])


def classify(model: SvmModel, x) -> Classification:
    """Sign of the decision value; an exact zero goes to +1 with ``tie`` set."""
    score = decision_value(model, x)
    return Classification(1 if score >= 0 else -1, score, score == 0.0)


def geometric_margin(model: SvmModel) -> float:
    norm = float(np.linalg.norm(model.w))
    if norm == 0.0:
        raise DegenerateModelError("zero normal vector has no margin")
    return 1.0 / norm


def normalized_hyperplane(model: SvmModel) -> tuple:
    """(w/|w|, b/|w|) with the first nonzero component of w made positive."""
    norm = float(np.linalg.norm(model.w))
    if norm == 0.0:
        raise DegenerateModelError("zero normal vector")
    u, c = model.w / norm, model.b / norm
    lead = u[np.flatnonzero(u)[0]]
    if lead < 0:
        u, c = -u, -c
    return u, c


def with_alphas(model: SvmModel, alphas) -> SvmModel:
    return replace(model, alphas=np.asarray(alphas, dtype=np.float64))
