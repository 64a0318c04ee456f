"""Free energies of the Curie-Weiss and Ising blockmodels and their ground states."""
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryError, DomainError
from .numerics import binary_entropy, solve_increasing_root

BOUNDARY_TOL = 1e-6


class Phase(str, enum.Enum):
    UNIQUE_ZERO = "UNIQUE_ZERO"
    FERRO_ALIGNED = "FERRO_ALIGNED"
    FERRO_POLARIZED = "FERRO_POLARIZED"
    AXIS_FOUR = "AXIS_FOUR"


@dataclass(frozen=True)
class GroundStateSet:
    states: tuple
    phase: Phase
    xtilde: float
    g_star: float


@dataclass(frozen=True)
class CurvatureConstants:
    delta: float
    kappa_sq: float


def _check_open(*values):
    for v in values:
        if np.any(np.abs(np.asarray(v, dtype=float)) >= 1):
            raise DomainError("magnetizations must lie in the open interval (-1, 1)")


def cw_free_energy(b, mu):
    """-2 b mu^2 - 4 h((mu + 1)/2); vectorized in mu."""
    _check_open(mu)
    mu = np.asarray(mu, dtype=float)
    out = -2.0 * b * mu**2 - 4.0 * binary_entropy((mu + 1.0) / 2.0)
    return float(out) if out.ndim == 0 else out


def ibm_free_energy(params, x, y):
    """g(x, y) = -2 alpha x y - beta (x^2 + y^2) - 4 h((x+1)/2) - 4 h((y+1)/2)."""
    _check_open(x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = (
        -2.0 * params.alpha * x * y
        - params.beta * (x**2 + y**2)
        - 4.0 * binary_entropy((x + 1.0) / 2.0)
        - 4.0 * binary_entropy((y + 1.0) / 2.0)
    )
    return float(out) if out.ndim == 0 else out


def ibm_gradient(params, x, y):
    gx = -2.0 * params.alpha * y - 2.0 * params.beta * x + 2.0 * np.log((1 + x) / (1 - x))
    gy = -2.0 * params.alpha * x - 2.0 * params.beta * y + 2.0 * np.log((1 + y) / (1 - y))
    return gx, gy


def mean_field_solve(b):
    """Nonnegative root of atanh(x) = b x: zero for b <= 1, else the spontaneous magnetization."""
    if not math.isfinite(b):
        raise DomainError("b must be finite")
    if b <= 1:
        return 0.0
    f = lambda x: math.atanh(x) - b * x  # noqa: E731  negative below the root, positive above
    lo = math.sqrt(1.0 - 1.0 / b)
    hi = min(1.0 - math.exp(-2.0 * b), math.nextafter(1.0, 0.0))
    if f(hi) <= 0:
        # root lies closer to 1 than float resolution allows
        return hi
    return solve_increasing_root(f, lo, hi, tol=1e-15)


def mean_field_bounds(b):
    """Strict bounds (lower, upper) on the squared spontaneous magnetization for b > 1."""
    if b <= 1:
        raise DomainError("bounds stated for b > 1")
    return 1.0 - 2.0 * b / (2.0 * b * b + b - 1.0), 1.0 - math.exp(-2.0 * b)


def criticality(params):
    return params.beta + abs(params.alpha)


def _check_boundary(params):
    if abs(criticality(params) - 2.0) <= BOUNDARY_TOL:
        raise BoundaryError(
            f"beta + |alpha| = {criticality(params)} is on the critical line; curvature degenerates there"
        )


def ground_states(params):
    _check_boundary(params)
    alpha = params.alpha
    c = criticality(params)
    if c < 2:
        states = ((0.0, 0.0),)
        phase = Phase.UNIQUE_ZERO
        x = 0.0
    else:
        x = mean_field_solve(c / 2.0)
        if alpha == 0:
            states = ((x, x), (x, -x), (-x, x), (-x, -x))
            phase = Phase.AXIS_FOUR
        elif alpha > 0:
            states = ((x, x), (-x, -x))
            phase = Phase.FERRO_ALIGNED
        else:
            states = ((x, -x), (-x, x))
            phase = Phase.FERRO_POLARIZED
    g_star = ibm_free_energy(params, *states[0])
    return GroundStateSet(states=states, phase=phase, xtilde=x, g_star=g_star)


def hessian_at(params, state):
    """Hessian of g at a ground state with its closed-form eigenpairs.

    Returns (H, eigenvalues, eigenvectors) where eigenvalues are ordered as the
    directions (1, -1)/sqrt 2 and (1, 1)/sqrt 2 (columns of eigenvectors).
    """
    x, y = state
    if abs(x * x - y * y) > 1e-8:
        raise DomainError(f"{state} is not a ground state (needs x^2 == y^2)")
    _check_open(x, y)
    curv = 4.0 / (1.0 - x * x)
    a, b = params.alpha, params.beta
    h = -2.0 * np.array([[b, a], [a, b]]) + curv * np.eye(2)
    values = np.array([2.0 * (a - b) + curv, -2.0 * (a + b) + curv])
    vectors = np.array([[1.0, 1.0], [-1.0, 1.0]]) / math.sqrt(2.0)
    return h, values, vectors


def curvature_constants(params):
    _check_boundary(params)
    c = criticality(params)
    if c > 2:
        delta = math.exp(-c) * (c - 2.0) / (4.0 * c)
        kappa_sq = 1.0 - 2.0 / c
    else:
        delta = math.sqrt((2.0 - c) / 6.0)
        kappa_sq = 2.0 - c
    return CurvatureConstants(delta=delta, kappa_sq=kappa_sq)


def region_label(alpha, beta):
    """Phase-diagram region: I (polarized), II (unique zero), III (aligned) or AXIS (alpha = 0)."""
    c = beta + abs(alpha)
    if c <= 2:
        return "II"
    if alpha < 0:
        return "I"
    if alpha > 0:
        return "III"
    return "AXIS"
