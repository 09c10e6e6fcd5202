"""Dense symmetric linear algebra for small matrices.

Everything here targets the n-by-n operators of desk-scale frames
(n up to a few tens), where simple cyclic Jacobi sweeps and an
unpivoted Cholesky are accurate and fast enough.
"""

from __future__ import annotations

import numpy as np

JACOBI_OFF_TOL = 1e-13
PIVOT_REL_TOL = 1e-9


def jacobi_eigenvalues(matrix: np.ndarray, off_tol: float = JACOBI_OFF_TOL,
                       max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, ascending, via cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius norm falls below `off_tol`.
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError("matrix must be square")
    if n == 1:
        return a[0, :1].copy()
    for _ in range(max_sweeps):
        off = np.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2))
        if off < off_tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                if theta == 0.0:
                    t = 1.0
                else:
                    t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p = c * a[:, p] - s * a[:, q]
                col_q = s * a[:, p] + c * a[:, q]
                a[:, p] = col_p
                a[:, q] = col_q
                row_p = c * a[p, :] - s * a[q, :]
                row_q = s * a[p, :] + c * a[q, :]
                a[p, :] = row_p
                a[q, :] = row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
    else:
        raise ArithmeticError("Jacobi sweeps did not converge")
    return np.sort(np.diag(a))


def cholesky_spd(matrix: np.ndarray, pivot_rel_tol: float = PIVOT_REL_TOL) -> np.ndarray | None:
    """Lower Cholesky factor of a symmetric positive definite matrix.

    Returns None as soon as a pivot drops below `pivot_rel_tol` times the
    largest diagonal entry, i.e. when the matrix is not safely positive
    definite at working precision.
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    floor = pivot_rel_tol * max(float(np.max(np.diag(a))), np.finfo(float).tiny)
    lower = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - lower[j, :j] @ lower[j, :j]
        if d <= floor:
            return None
        lower[j, j] = np.sqrt(d)
        if j + 1 < n:
            lower[j + 1:, j] = (a[j + 1:, j] - lower[j + 1:, :j] @ lower[j, :j]) / lower[j, j]
    return lower


def solve_cholesky(lower: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve (L L^T) x = rhs for one vector or a matrix of right-hand sides."""
    b = np.array(rhs, dtype=float)
    one_dim = b.ndim == 1
    if one_dim:
        b = b[:, None]
    n = lower.shape[0]
    y = np.empty_like(b)
    for i in range(n):
        y[i] = (b[i] - lower[i, :i] @ y[:i]) / lower[i, i]
    x = np.empty_like(b)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - lower[i + 1:, i] @ x[i + 1:]) / lower[i, i]
    return x[:, 0] if one_dim else x
