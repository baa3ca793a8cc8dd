"""Self-contained dense two-phase simplex with Bland's rule.

Solves   max/min c.x   s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.

Deterministic (Bland's rule, no randomized pricing), no external solver
dependency; instances in this package stay at a few hundred rows, so a
dense tableau is the right tool.  The pivot loop itself lives in
bernlab._kernels (numba-accelerated when available).

Duals follow the maximization orientation: for an optimal maximize call,
y_ub >= 0,  b_ub.y_ub + b_eq.y_eq = objective,  and A^T y >= c on the
support of x.  Minimization negates the reported duals accordingly.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import simplex_core, OPTIMAL, UNBOUNDED

__all__ = ["LPResult", "solve_lp", "LPError"]


class LPError(RuntimeError):
    pass


@dataclass
class LPResult:
    status: str              # optimal | unbounded | infeasible | iteration_limit
    x: np.ndarray | None
    objective: float
    duals_ub: np.ndarray | None
    duals_eq: np.ndarray | None
    n_iter: int


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None,
             maximize=True, tol=1e-9, max_iter=20000):
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, dtype=float)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq

    cmin = -c if maximize else c.copy()

    # rows: [A_ub | I] then [A_eq | 0]; flip rows with negative RHS
    A = np.vstack([A_ub, A_eq]) if m else np.zeros((0, n))
    b = np.concatenate([b_ub, b_eq])
    flip = b < -0.0
    A[flip] *= -1.0
    b[flip] *= -1.0
    slack = np.zeros((m, m_ub))
    for i in range(m_ub):
        slack[i, i] = -1.0 if flip[i] else 1.0
    # artificials: equality rows and flipped inequality rows
    need_art = np.concatenate([flip[:m_ub], np.ones(m_eq, dtype=bool)])
    art_rows = np.nonzero(need_art)[0]
    n_art = art_rows.size
    art = np.zeros((m, n_art))
    for j, i in enumerate(art_rows):
        art[i, j] = 1.0

    ntot = n + m_ub + n_art
    T = np.zeros((m + 1, ntot + 1))
    if m:
        T[:m, :n] = A
        T[:m, n:n + m_ub] = slack
        T[:m, n + m_ub:ntot] = art
        T[:m, -1] = b
    basis = np.full(m, -1, dtype=np.int64)
    for i in range(m_ub):
        if not flip[i]:
            basis[i] = n + i
    for j, i in enumerate(art_rows):
        basis[i] = n + m_ub + j

    # ---- phase 1: minimize sum of artificials
    if n_art:
        T[m, n + m_ub:ntot] = 1.0
        for j, i in enumerate(art_rows):
            T[m, :] -= T[i, :]
        status, it1 = simplex_core(T, basis, ntot, tol, max_iter)
        if status != OPTIMAL:
            return LPResult("iteration_limit", None, np.nan, None, None, it1)
        if T[m, -1] < -1e-7:
            return LPResult("infeasible", None, np.nan, None, None, it1)
        # drive remaining artificials out of the basis where possible
        for i in range(m):
            if basis[i] >= n + m_ub:
                row = T[i, :n + m_ub]
                piv = np.nonzero(np.abs(row) > 1e-9)[0]
                if piv.size:
                    e = int(piv[0])
                    p = T[i, e]
                    T[i, :] /= p
                    for r in range(m + 1):
                        if r != i and T[r, e] != 0.0:
                            T[r, :] -= T[r, e] * T[i, :]
                    basis[i] = e
    else:
        it1 = 0

    # ---- phase 2: objective row for min(cmin), artificials frozen
    T[m, :] = 0.0
    T[m, :n] = cmin
    for i in range(m):
        if basis[i] < n and cmin[basis[i]] != 0.0:
            T[m, :] -= cmin[basis[i]] * T[i, :]
    status, it2 = simplex_core(T, basis, n + m_ub, tol, max_iter)
    if status == UNBOUNDED:
        return LPResult("unbounded", None, np.inf if maximize else -np.inf,
                        None, None, it1 + it2)
    if status != OPTIMAL:
        return LPResult("iteration_limit", None, np.nan, None, None, it1 + it2)

    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i, -1]
    obj_min = float(T[m, -1])     # tableau holds -(current min value)
    obj = obj_min if maximize else -obj_min
    # duals of the min problem from reduced costs under slack/artificial
    # columns; a flipped row flips its slack column too, so those cancel,
    # while artificial columns keep their stored orientation
    y_min = np.zeros(m)
    for i in range(m_ub):
        y_min[i] = -T[m, n + i]
    for j, i in enumerate(art_rows):
        if i >= m_ub:
            y_min[i] = -T[m, n + m_ub + j] * (-1.0 if flip[i] else 1.0)
    duals = -y_min if maximize else y_min
    return LPResult("optimal", x, obj, duals[:m_ub], duals[m_ub:],
                    it1 + it2)
