"""Numerical kernels shared by the rest of the package.

Log-domain combinatorics, a cyclic Jacobi eigensolver for dense symmetric
matrices, PSD tests, bisection and the chi-square tail bound.
"""
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DomainError

SYMMETRY_TOL = 1e-10


def log_binomial(m, k):
    """ln C(m, k) through log-gamma, O(1) per call."""
    if m < 0 or k < 0 or k > m:
        raise DomainError(f"log_binomial needs 0 <= k <= m, got m={m}, k={k}")
    return math.lgamma(m + 1) - math.lgamma(k + 1) - math.lgamma(m - k + 1)


def log_factorial_table(m):
    """Array of ln k! for k = 0..m (lgamma per entry, no cumulative drift)."""
    if m < 0:
        raise DomainError("m must be nonnegative")
    return np.array([math.lgamma(k + 1) for k in range(m + 1)])


def log_binomial_row(m):
    """ln C(m, k) for every k = 0..m, in O(m)."""
    table = log_factorial_table(m)
    return table[m] - table - table[::-1]


def binary_entropy(s):
    """Natural-log binary entropy with h(0) = h(1) = 0. Vectorized."""
    s = np.asarray(s, dtype=float)
    if np.any((s < 0) | (s > 1)):
        raise DomainError("binary entropy defined on [0, 1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -s * np.log(s) - (1 - s) * np.log1p(-s)
    out = np.where((s == 0) | (s == 1), 0.0, out)
    return out if out.ndim else float(out)


def log_sum_exp(values):
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise DomainError("log_sum_exp of an empty list")
    top = values.max()
    if np.isinf(top):
        return float(top)
    return float(top + np.log(np.sum(np.exp(values - top))))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in ascending order, eigenvectors as matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def top(self):
        return self.eigenvalues[-1], self.eigenvectors[:, -1]


def check_symmetric(a, tol=SYMMETRY_TOL):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    if np.abs(a - a.T).max(initial=0.0) > tol * scale:
        raise DomainError("matrix is not symmetric")
    return a


@njit(cache=True)
def _jacobi_sweeps(a, w, tol, max_sweeps):
    # w holds eigenvectors as rows so every inner loop but one is contiguous
    p = a.shape[0]
    norm = 0.0
    for i in range(p):
        for j in range(p):
            norm += a[i, j] * a[i, j]
    norm = np.sqrt(norm)
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(p):
            for j in range(p):
                if i != j:
                    off += a[i, j] * a[i, j]
        if np.sqrt(off) <= tol * norm:
            return sweep
        for i in range(p - 1):
            for j in range(i + 1, p):
                aij = a[i, j]
                if abs(aij) <= 1e-300:
                    continue
                theta = (a[j, j] - a[i, i]) / (2.0 * aij)
                if theta == 0.0:
                    t = 1.0
                elif theta > 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(p):
                    aik = a[i, k]
                    ajk = a[j, k]
                    a[i, k] = c * aik - s * ajk
                    a[j, k] = s * aik + c * ajk
                for k in range(p):
                    aki = a[k, i]
                    akj = a[k, j]
                    a[k, i] = c * aki - s * akj
                    a[k, j] = s * aki + c * akj
                a[i, j] = 0.0
                a[j, i] = 0.0
                for k in range(p):
                    wik = w[i, k]
                    wjk = w[j, k]
                    w[i, k] = c * wik - s * wjk
                    w[j, k] = s * wik + c * wjk
    return max_sweeps


def jacobi_eigen(a, tol=1e-15, max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Pairs (i, j), i < j, are rotated in row-major order every sweep, so the
    result is a deterministic function of the input. Returns
    (eigenvalues, eigenvectors) unsorted.
    """
    a = np.array(a, dtype=float)
    w = np.eye(a.shape[0])
    _jacobi_sweeps(a, w, tol, max_sweeps)
    return a.diagonal().copy(), w.T.copy()


def fix_sign(vec):
    """Flip so the first coordinate that is not ~0 is positive."""
    vec = np.asarray(vec, dtype=float)
    scale = np.abs(vec).max(initial=0.0)
    nz = np.flatnonzero(np.abs(vec) > 1e-12 * scale)
    if nz.size and vec[nz[0]] < 0:
        return -vec
    return vec


def sym_eigen(a):
    """Full spectrum of a symmetric matrix, ascending, with fixed eigenvector signs."""
    a = check_symmetric(a)
    a = 0.5 * (a + a.T)
    values, vectors = jacobi_eigen(a)
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    vectors = np.column_stack([fix_sign(vectors[:, k]) for k in range(vectors.shape[1])])
    return Spectrum(values, vectors)


def default_psd_tol(a):
    return 1e-8 * (1.0 + float(np.abs(a).max(initial=0.0)))


def is_psd(a, tol=None):
    """Returns (psd, min_eig, zero_multiplicity) where zeros are eigenvalues in [-tol, tol]."""
    a = check_symmetric(a)
    if tol is None:
        tol = default_psd_tol(a)
    if tol <= 0:
        raise DomainError("tol must be positive")
    values = sym_eigen(a).eigenvalues
    min_eig = float(values[0])
    zeros = int(np.count_nonzero(np.abs(values) <= tol))
    return min_eig >= -tol, min_eig, zeros


def solve_increasing_root(f, lo, hi, tol=1e-12):
    """Bisection on a monotone continuous f with a sign change on [lo, hi].

    Works for decreasing f as well; only the sign pattern at the ends matters.
    """
    if not lo <= hi:
        raise DomainError("need lo <= hi")
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if flo * fhi > 0:
        raise DomainError(f"no sign change on [{lo}, {hi}]")
    rising = flo < 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fmid = f(mid)
        if fmid == 0:
            return mid
        if (fmid < 0) == rising:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def chi2_tail_bound(t):
    """Bound exp(-t/4) on P(|Z|^2 - 2 >= t) for a standard bivariate Gaussian Z, t >= 2."""
    if t < 2:
        raise DomainError("chi2 tail bound stated for t >= 2")
    return math.exp(-t / 4.0)
