"""Hot numeric kernels with optional numba acceleration.

Two kernels dominate inner-loop runtime: compensated (Neumaier) summation,
which is inherently sequential and cannot be vectorized without losing the
error-free transformations, and the dense-tableau simplex pivot loop, where
per-pivot Python overhead adds up over hundreds of pivots.

Both are written as plain numpy-compatible functions.  When numba is
importable and the environment variable BERNLAB_NO_NUMBA is unset (or "0"),
they are wrapped with @njit at import time; otherwise the pure-Python/numpy
originals run.  ``USING_NUMBA`` records which path is live, and the ``*_py``
originals stay importable so benchmarks can time both sides.
"""

import os

import numpy as np

# Simplex status codes shared with bernlab.simplex.
OPTIMAL = 0
UNBOUNDED = 1
ITER_LIMIT = 2


def neumaier_sum_py(values):
    """Compensated sum of a 1-d float64 array (Neumaier's variant).

    Error is ~2 eps |sum| + O(eps^2) * sum|values|, versus
    eps * n * sum|values| for naive accumulation.
    """
    s = 0.0
    comp = 0.0
    for i in range(values.shape[0]):
        v = values[i]
        t = s + v
        if abs(s) >= abs(v):
            comp += (s - t) + v
        else:
            comp += (v - t) + s
        s = t
    return s + comp


def simplex_core_py(T, basis, ncols, tol, max_iter):
    """Bland-rule pivot loop on a dense simplex tableau, in place.

    T is the (m+1) x (ntot+1) tableau: m constraint rows, objective row
    last, RHS in the last column.  Reduced costs live in the objective row
    (minimization: entering column has objective entry < -tol).  ``ncols``
    limits the columns eligible to enter (phase 1 excludes nothing, phase 2
    excludes artificials).  ``basis`` maps rows to basic column indices.

    Returns (status, iterations).  Bland's rule (lowest eligible index both
    for entering and for leaving ties) guarantees termination.
    """
    m = T.shape[0] - 1
    it = 0
    while it < max_iter:
        # Entering column: first index with negative reduced cost.
        enter = -1
        for j in range(ncols):
            if T[m, j] < -tol:
                enter = j
                break
        if enter < 0:
            return OPTIMAL, it
        # Ratio test; ties broken by lowest basis index (Bland).
        leave = -1
        best = np.inf
        for i in range(m):
            a = T[i, enter]
            if a > tol:
                r = T[i, T.shape[1] - 1] / a
                if r < best - 1e-15 or (r < best + 1e-15 and
                                        (leave < 0 or basis[i] < basis[leave])):
                    best = r
                    leave = i
        if leave < 0:
            return UNBOUNDED, it
        # Pivot.
        piv = T[leave, enter]
        T[leave, :] /= piv
        for i in range(m + 1):
            if i != leave:
                f = T[i, enter]
                if f != 0.0:
                    T[i, :] -= f * T[leave, :]
        basis[leave] = enter
        it += 1
    return ITER_LIMIT, it


def _pick_impl():
    disabled = os.environ.get("BERNLAB_NO_NUMBA", "") not in ("", "0")
    if disabled:
        return False
    try:
        from numba import njit
    except ImportError:
        return False
    global neumaier_sum, simplex_core
    neumaier_sum = njit("f8(f8[::1])", cache=True)(neumaier_sum_py)
    simplex_core = njit("UniTuple(i8, 2)(f8[:, ::1], i8[::1], i8, f8, i8)",
                        cache=True)(simplex_core_py)
    return True


neumaier_sum = neumaier_sum_py
simplex_core = simplex_core_py
USING_NUMBA = _pick_impl()


def neumaier_sum_complex(values):
    """Compensated sum of a complex array via real/imaginary parts."""
    values = np.ascontiguousarray(values, dtype=np.complex128)
    re = neumaier_sum(np.ascontiguousarray(values.real))
    im = neumaier_sum(np.ascontiguousarray(values.imag))
    return complex(re, im)
