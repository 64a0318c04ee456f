"""Partition recovery: brute-force MLE, certified SDP relaxation, spectral signs.

All estimates are returned as +-1 label vectors; ``Partition.from_signs`` turns a
balanced one into a Partition. The SDP relaxation

    max Tr[G V]  subject to  V >= 0, diag(V) = 1

is solved with a rank-r factorization V = R R^T and row-wise coordinate
ascent. The solver itself is heuristic; exactness comes from the Laplacian
certificate, which proves a rounded +-1 solution is the unique optimum of the
relaxation whenever diag(G v v^T) - G is PSD with a one-dimensional kernel.
"""
import enum
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ResourceError
from .model import Partition
from .numerics import check_symmetric, fix_sign, sym_eigen

MAX_MLE_P = 16


class Method(str, enum.Enum):
    MLE = "MLE"
    SDP = "SDP"
    SPECTRAL = "SPECTRAL"


@dataclass(frozen=True)
class CertificateReport:
    laplacian_min_eig: float
    zero_multiplicity: int
    psd: bool
    unique: bool
    second_eig: float = float("nan")


@dataclass(eq=False)
class RecoveryResult:
    labels: np.ndarray = field(repr=False)
    method: Method
    objective: float
    iterations: int = 0
    certificate_psd: bool | None = None
    certificate_zero_multiplicity: int | None = None
    certified: bool = False
    converged: bool = True
    diamond: int | None = None

    @property
    def estimate(self):
        """Partition if the labels are balanced, else the raw +-1 labels."""
        if self.labels.sum() == 0:
            return Partition.from_signs(self.labels)
        return self.labels

    def to_dict(self):
        return {
            "estimate": "".join("1" if x > 0 else "0" for x in self.labels),
            "balanced": bool(self.labels.sum() == 0),
            "method": self.method.value,
            "objective": self.objective,
            "iterations": self.iterations,
            "certificate_psd": self.certificate_psd,
            "certificate_zero_multiplicity": self.certificate_zero_multiplicity,
            "certified": self.certified,
            "converged": self.converged,
            "diamond": self.diamond,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def as_labels(x):
    """Partition or +-1 / 0-1 vector -> +-1 float labels."""
    if isinstance(x, Partition):
        return x.v
    x = np.asarray(x)
    if x.dtype == bool:
        return np.where(x, 1.0, -1.0)
    if np.isin(x, (0, 1)).all() and not np.isin(x, (-1,)).any():
        return np.where(x == 1, 1.0, -1.0)
    if not np.isin(x, (-1, 1)).all():
        raise DomainError("labels must be +-1, 0/1, boolean, or a Partition")
    return x.astype(float)


def diamond_distance(a, b):
    """min(|A sym-diff B|, |A sym-diff complement(B)|) over the two labelings."""
    a, b = as_labels(a), as_labels(b)
    if a.shape != b.shape:
        raise DomainError(f"labelings have different lengths {a.size} and {b.size}")
    differ = int(np.count_nonzero(a != b))
    return min(differ, a.size - differ)


def objective(gamma, labels):
    v = as_labels(labels)
    return float(v @ gamma @ v)


def mle_bruteforce(sigma_hat, p=None):
    """Exact max of Tr[Sigma_hat v v^T] over balanced v.

    Candidates fix site 1 in S and are scanned in lexicographic order of the
    sorted member list, so ties resolve to the earliest, e.g. S = {1, ..., m}.
    """
    sigma_hat = check_symmetric(sigma_hat)
    p = sigma_hat.shape[0] if p is None else p
    if p != sigma_hat.shape[0]:
        raise DomainError("p does not match the matrix size")
    if p > MAX_MLE_P:
        raise ResourceError(f"brute-force MLE limited to p <= {MAX_MLE_P}, got {p}")
    if p % 2:
        raise DomainError("p must be even")
    m = p // 2
    combos = np.array([(0,) + c for c in itertools.combinations(range(1, p), m - 1)], dtype=int)
    v = -np.ones((len(combos), p))
    np.put_along_axis(v, combos, 1.0, axis=1)
    values = np.einsum("ki,ij,kj->k", v, sigma_hat, v)
    best = values.max()
    idx = int(np.flatnonzero(values >= best - 1e-12 * (1.0 + abs(best)))[0])
    return RecoveryResult(labels=v[idx], method=Method.MLE, objective=float(values[idx]), iterations=len(combos))


def laplacian(c, labels):
    """L(C) = diag(C v v^T) - C, i.e. diag(v_i (C v)_i) - C."""
    v = as_labels(labels)
    return np.diag(v * (c @ v)) - c


def default_certificate_tol(c):
    return 1e-7 * (1.0 + float(np.abs(c).max(initial=0.0)))


def laplacian_certificate(c, part, tol=None):
    c = check_symmetric(c)
    v = as_labels(part)
    if v.size != c.shape[0]:
        raise DomainError(f"partition has {v.size} sites, matrix is {c.shape[0]} x {c.shape[0]}")
    if tol is None:
        tol = default_certificate_tol(c)
    lap = laplacian(c, v)
    residual = np.abs(lap @ v).max()
    if residual > 1e-10 * (1.0 + np.abs(c).max()) * v.size:
        raise AssertionError(f"L(C) v = 0 violated by {residual}")
    values = sym_eigen(lap).eigenvalues
    min_eig = float(values[0])
    zeros = int(np.count_nonzero(np.abs(values) <= tol))
    psd = min_eig >= -tol
    second = float(values[1]) if values.size > 1 else float("nan")
    return CertificateReport(min_eig, zeros, psd, psd and zeros == 1, second)


def default_rank(p):
    return math.ceil(math.sqrt(2 * p)) + 1


def _round(r):
    # leading eigenvector of R R^T is R w / |R w| for w the leading eigenvector of R^T R
    w = sym_eigen(r.T @ r).eigenvectors[:, -1]
    top = fix_sign(r @ w)
    return np.where(top >= 0, 1.0, -1.0)


def sdp_solve(gamma_hat, rank=None, tol=1e-9, max_iters=2000, seed=0, cert_tol=None, trace=None):
    """Burer-Monteiro coordinate ascent on the elliptope, then certify the rounding.

    Each row R_i is replaced by the unit vector along sum_{j != i} G_ij R_j, the
    exact maximizer over row i; rows with a zero gradient are left in place.
    Sweeps stop once the relative objective change drops below ``tol``. If
    ``trace`` is a list, the objective after every row update is appended to it.
    """
    g = check_symmetric(gamma_hat)
    p = g.shape[0]
    rank = default_rank(p) if rank is None else rank
    rng = np.random.default_rng(seed)
    r = rng.standard_normal((p, rank))
    r /= np.linalg.norm(r, axis=1, keepdims=True)
    off = g - np.diag(g.diagonal())
    value = float(np.sum((r @ r.T) * g))
    converged = False
    sweeps = 0
    for sweeps in range(1, max_iters + 1):
        previous = value
        for i in range(p):
            grad = off[i] @ r
            norm = math.sqrt(grad @ grad)
            if norm == 0.0:
                continue
            new = grad / norm
            value += 2.0 * (grad @ new - grad @ r[i])
            r[i] = new
            if trace is not None:
                trace.append(value)
        value = float(np.sum((r @ r.T) * g))
        if abs(value - previous) <= tol * max(1.0, abs(value)):
            converged = True
            break
    labels = _round(r)
    cert = laplacian_certificate(g, labels, cert_tol)
    return RecoveryResult(
        labels=labels,
        method=Method.SDP,
        objective=objective(g, labels),
        iterations=sweeps,
        certificate_psd=cert.psd,
        certificate_zero_multiplicity=cert.zero_multiplicity,
        certified=converged and cert.unique,
        converged=converged,
    )


def spectral_partition(gamma_hat):
    """Sign clustering on the leading eigenvector; zero coordinates go to the + side."""
    g = check_symmetric(gamma_hat)
    u = sym_eigen(g).eigenvectors[:, -1]
    labels = np.where(u >= 0, 1.0, -1.0)
    return RecoveryResult(labels=labels, method=Method.SPECTRAL, objective=objective(g, labels))


def recover(method, gamma_hat, sigma_hat=None, **kwargs):
    method = Method(method.upper() if isinstance(method, str) else method)
    if method is Method.MLE:
        return mle_bruteforce(gamma_hat if sigma_hat is None else sigma_hat)
    if method is Method.SDP:
        return sdp_solve(gamma_hat, **kwargs)
    return spectral_partition(gamma_hat)
