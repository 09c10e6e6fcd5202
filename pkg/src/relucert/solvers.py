"""Small convex solvers.

Two work horses live here: linear minimization over the capped cone
{d >= 0, ||D d||_2 <= 1} (used per facet by the bias estimation) and a dense
phase-1 simplex deciding LP feasibility. Problem sizes are tiny (tens of
variables at most), so robustness beats asymptotics throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DimensionMismatch, NotConverged

TOL_SOLVER = 1e-9
MAX_ITERS = 100_000
_SUPPORT_LIMIT = 200_000  # cap on enumerated supports in the exact fallback


@dataclass(frozen=True)
class CappedConeProblem:
    """Minimize <c, d> subject to d >= 0 and ||D d||_2 <= 1.

    Columns of D are facet vertices on the unit sphere; c collects the inner
    products of those vertices with a fixed frame element.
    """

    D: np.ndarray
    c: np.ndarray
    tol: float = TOL_SOLVER
    max_iters: int = MAX_ITERS

    def __post_init__(self):
        d = np.asarray(self.D, dtype=float)
        c = np.asarray(self.c, dtype=float)
        if d.ndim != 2 or c.ndim != 1 or d.shape[1] != c.shape[0]:
            raise DimensionMismatch("D must be (n, k) with objective of length k")
        if not (np.isfinite(d).all() and np.isfinite(c).all()):
            raise DimensionMismatch("problem data must be finite")
        norms = np.linalg.norm(d, axis=0)
        if np.max(np.abs(norms - 1.0)) > 1e-9:
            raise ValueError("columns of D must lie on the unit sphere")
        object.__setattr__(self, "D", d)
        object.__setattr__(self, "c", c)


@dataclass(frozen=True)
class SolveResult:
    value: float
    argmin: np.ndarray
    kkt_residual: float
    iterations: int


def min_linear_capped_cone(problem: CappedConeProblem) -> SolveResult:
    """Solve the capped-cone program to `problem.tol` accuracy in the value.

    Projected gradient (clip to the non-negative orthant, then rescale onto
    the norm cap) with backtracking drives the iterate near the optimum; an
    exact stationary-point solve on the identified support then pins the
    minimizer down. If the KKT residual still exceeds the tolerance, every
    support up to size n is enumerated, which is exact for this problem.
    """
    D, c, tol = problem.D, problem.c, problem.tol
    n, k = D.shape
    if np.min(c) >= 0.0:
        # apex optimum: the gradient lies in the normal cone at d = 0
        return SolveResult(0.0, np.zeros(k), 0.0, 0)
    if k == 1:
        # single generator: either stay at the apex or run to the cap
        d = np.array([1.0])
        return SolveResult(float(c[0]), d, 0.0, 0)

    gram = D.T @ D
    step = 1.0 / float(np.trace(gram))  # trace bounds the largest eigenvalue

    start = int(np.argmin(c))
    d = np.zeros(k)
    d[start] = 1.0
    value = float(c[start])

    iterations = 0
    stall = 0
    for _ in range(problem.max_iters):
        iterations += 1
        trial = step
        moved = False
        for _ in range(60):
            cand = _project(D, d - trial * c)
            gain = float(c @ cand) - value
            # objective is linear, so sufficient decrease == any decrease
            if gain < 0.0:
                moved = True
                break
            trial *= 0.5
        if not moved:
            break
        d = cand
        value += gain
        step = min(trial * 2.0, 1e6)
        if -gain < 1e-14 * (1.0 + abs(value)):
            stall += 1
            if stall >= 20:
                break
        else:
            stall = 0

    best_d, best_value = _polish(gram, c, d, value)
    residual = _kkt_residual(gram, c, D, best_d)
    if residual > max(tol, 1e-10):
        # the scan is exact, so any feasible value it cannot beat is optimal
        cand = _enumerate_supports(gram, c, n, k)
        if cand is not None and cand[1] <= best_value + 1e-15:
            best_d, best_value = cand
            residual = _kkt_residual(gram, c, D, best_d)
    if residual > max(tol, 1e-7):
        raise NotConverged(problem.max_iters, residual)
    return SolveResult(best_value, best_d, residual, iterations)


def _project(D: np.ndarray, v: np.ndarray) -> np.ndarray:
    u = np.maximum(v, 0.0)
    s = float(np.linalg.norm(D @ u))
    if s > 1.0:
        u = u / s
    return u


def _stationary_on_support(gram: np.ndarray, c: np.ndarray, support) -> tuple[np.ndarray, float] | None:
    """Exact KKT point with the given positive support and the cap active."""
    idx = list(support)
    sub = gram[np.ix_(idx, idx)]
    try:
        w = np.linalg.solve(sub, -c[idx])
    except np.linalg.LinAlgError:
        return None
    if np.min(w) < -1e-12:
        return None
    w = np.maximum(w, 0.0)
    quad = float(w @ sub @ w)
    if quad <= 0.0:
        return None
    t = 1.0 / np.sqrt(quad)
    d = np.zeros(c.shape[0])
    d[idx] = t * w
    return d, float(c @ d)


def _polish(gram, c, d, value) -> tuple[np.ndarray, float]:
    best_d, best_value = d, value
    support = np.nonzero(d > 1e-10 * max(1.0, float(np.max(d))))[0]
    if support.size:
        cand = _stationary_on_support(gram, c, support)
        if cand is not None and cand[1] <= best_value:
            best_d, best_value = cand
    if best_value > 0.0:
        best_d, best_value = np.zeros(c.shape[0]), 0.0
    return best_d, best_value


def _enumerate_supports(gram, c, n, k) -> tuple[np.ndarray, float] | None:
    """Exact minimum by scanning all supports of size <= n.

    Some optimal point uses at most n generators (conic Caratheodory), and on
    its support the stationarity system is the one `_stationary_on_support`
    solves, so the scan always contains an optimum.
    """
    total = sum(_comb(k, s) for s in range(1, min(k, n) + 1))
    if total > _SUPPORT_LIMIT:
        return None
    best = (np.zeros(k), 0.0)
    for size in range(1, min(k, n) + 1):
        for support in combinations(range(k), size):
            cand = _stationary_on_support(gram, c, support)
            if cand is not None and cand[1] < best[1]:
                best = cand
    return best


def _comb(k: int, s: int) -> int:
    out = 1
    for i in range(s):
        out = out * (k - i) // (i + 1)
    return out


def _kkt_residual(gram, c, D, d) -> float:
    """Max violation of primal feasibility, stationarity, dual feasibility
    and complementarity at d (cap multiplier fitted by least squares)."""
    nonneg = max(0.0, -float(np.min(d)))
    cap = float(np.linalg.norm(D @ d))
    primal = max(nonneg, cap - 1.0)
    active = d > 1e-11
    if not active.any():
        return max(primal, -float(np.min(c)))
    g = gram @ d
    denom = float(g[active] @ g[active])
    lam = max(0.0, -float(c[active] @ g[active]) / (2.0 * denom)) if denom > 0 else 0.0
    mu = c + 2.0 * lam * g
    stationarity = float(np.max(np.abs(mu[active])))
    dual = max(0.0, -float(np.min(mu[~active]))) if (~active).any() else 0.0
    complementarity = lam * abs(cap - 1.0)
    return max(primal, stationarity, dual, complementarity)


def lp_feasible(A_eq=None, b_eq=None, A_ineq=None, b_ineq=None,
                nonneg_vars: bool = True, tol: float = TOL_SOLVER) -> bool:
    """Decide whether {x : A_eq x = b_eq, A_ineq x >= b_ineq, x >= 0 if
    nonneg_vars} is non-empty, by phase-1 simplex with Bland's rule.

    Free variables are split into positive and negative parts. Feasible means
    the artificial objective reaches zero within `tol`.
    """
    eq_a, eq_b = _as_system(A_eq, b_eq)
    ge_a, ge_b = _as_system(A_ineq, b_ineq)
    if eq_a is None and ge_a is None:
        return True
    n_x = eq_a.shape[1] if eq_a is not None else ge_a.shape[1]
    if ge_a is not None and ge_a.shape[1] != n_x:
        raise DimensionMismatch("equality and inequality systems disagree on the variable count")

    blocks = []
    rhs = []
    n_ge = 0 if ge_a is None else ge_a.shape[0]
    if eq_a is not None:
        blocks.append(np.hstack([eq_a, np.zeros((eq_a.shape[0], n_ge))]))
        rhs.append(eq_b)
    if ge_a is not None:
        blocks.append(np.hstack([ge_a, -np.eye(n_ge)]))
        rhs.append(ge_b)
    a = np.vstack(blocks)
    b = np.concatenate(rhs)
    if not nonneg_vars:
        a = np.hstack([a[:, :n_x], -a[:, :n_x], a[:, n_x:]])

    neg = b < 0
    a[neg] *= -1.0
    b = np.abs(b)

    n_rows, n_cols = a.shape
    tableau = np.hstack([a, np.eye(n_rows), b[:, None]])
    basis = list(range(n_cols, n_cols + n_rows))
    # phase-1 reduced costs for the artificial basis
    cost = np.concatenate([-tableau[:, :n_cols].sum(axis=0),
                           np.zeros(n_rows), [-float(b.sum())]])

    eps = 1e-11
    for _ in range(50_000):
        entering = -1
        for j in range(n_cols):  # Bland: smallest improving index
            if cost[j] < -eps:
                entering = j
                break
        if entering < 0:
            break
        col = tableau[:, entering]
        leaving = -1
        best_ratio = np.inf
        for i in range(n_rows):
            if col[i] > eps:
                ratio = tableau[i, -1] / col[i]
                if ratio < best_ratio - 1e-12 or (
                        abs(ratio - best_ratio) <= 1e-12
                        and (leaving < 0 or basis[i] < basis[leaving])):
                    best_ratio = ratio
                    leaving = i
        if leaving < 0:
            raise ArithmeticError("phase-1 simplex became unbounded")
        pivot = tableau[leaving, entering]
        tableau[leaving] /= pivot
        for i in range(n_rows):
            if i != leaving and tableau[i, entering] != 0.0:
                tableau[i] -= tableau[i, entering] * tableau[leaving]
        cost = cost - cost[entering] * tableau[leaving]
        basis[leaving] = entering
    else:
        raise ArithmeticError("phase-1 simplex did not terminate")
    return bool(-cost[-1] <= tol)


def _as_system(a, b):
    if a is None and b is None:
        return None, None
    if a is None or b is None:
        raise DimensionMismatch("matrix and right-hand side must be given together")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim == 1:
        a = a[None, :]
    b = b.reshape(-1)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch("system row counts disagree")
    return a, b
