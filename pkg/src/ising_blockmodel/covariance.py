"""Population and empirical covariance structure of the blockmodel."""
import enum
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError
from .free_energy import ground_states, hessian_at
from .magnetization import exact_moment, magnetization_law


class GapMode(str, enum.Enum):
    EXACT = "EXACT"
    ASYMPTOTIC = "ASYMPTOTIC"


@dataclass(frozen=True)
class CovarianceSummary:
    """Within-block covariance delta, cross-block covariance omega, gap = delta - omega."""

    alpha: float
    beta: float
    m: int
    delta: float
    omega: float
    gap: float
    mode: GapMode

    def to_json(self):
        d = asdict(self)
        d["mode"] = self.mode.value
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        d["mode"] = GapMode(d["mode"])
        return cls(**d)


@dataclass(frozen=True, eq=False)
class EmpiricalGamma:
    sigma_hat: np.ndarray = field(repr=False)
    gamma_hat: np.ndarray = field(repr=False)
    n: int


def exact_delta_omega(params):
    m = params.m
    if m < 2:
        raise DomainError("delta needs a within-block pair of distinct sites (m >= 2)")
    law = magnetization_law(params)
    second = exact_moment(law, lambda x, y: x * x + y * y)
    cross = exact_moment(law, lambda x, y: x * y)
    delta = m / (2.0 * (m - 1)) * second - 1.0 / (m - 1)
    return CovarianceSummary(params.alpha, params.beta, m, delta, cross, delta - cross, GapMode.EXACT)


def _two_term_parts(params):
    gs = ground_states(params)
    m = params.m
    x2 = gs.xtilde**2
    lead = sum((x - y) ** 2 for x, y in gs.states) / (2.0 * len(gs.states))
    d = params.beta - params.alpha
    c = 1.0 - x2
    correction = d * c * c / (2.0 - d * c) / m
    return gs, lead, correction


def asymptotic_gap_two_term(params):
    """(1/2|G|) sum (x - y)^2 over ground states plus the 1/m fluctuation term."""
    _, lead, correction = _two_term_parts(params)
    return lead + correction


def asymptotic_delta_omega(params):
    """Leading-order delta and omega from the Gaussian mixture around the ground states."""
    gs = ground_states(params)
    m = params.m
    k = len(gs.states)
    delta = omega = 0.0
    for s in gs.states:
        h_inv = np.linalg.inv(hessian_at(params, s)[0])
        delta += (1.0 + 1.0 / m) * (s[0] ** 2 + s[1] ** 2) / 2.0 + 2.0 / m * np.trace(h_inv) - 1.0 / m
        omega += s[0] * s[1] + 4.0 / m * h_inv[0, 1]
    return delta / k, omega / k


def asymptotic_gap(params):
    """Leading-order gap for the phase of (alpha, beta).

    Subcritical and aligned phases carry only the 1/m term; the polarized and
    alpha = 0 phases have an order-one gap 2 x^2 and x^2 respectively.
    """
    gs, lead, correction = _two_term_parts(params)
    gap = lead if lead > 0 else correction
    delta, omega = asymptotic_delta_omega(params)
    return CovarianceSummary(params.alpha, params.beta, params.m, delta, omega, gap, GapMode.ASYMPTOTIC)


def empirical_gamma(batch):
    """Sample second-moment matrix and its doubly centered version P Sigma_hat P."""
    configs = batch.configs if hasattr(batch, "configs") else np.asarray(batch)
    if configs.ndim != 2 or configs.shape[0] == 0:
        raise DomainError("empty sample batch")
    n = configs.shape[0]
    x = configs.astype(np.float64)
    # products of +-1 entries summed over n rows are integers below 2^53, so BLAS is exact here
    counts = x.T @ x
    sigma_hat = counts / n
    return EmpiricalGamma(sigma_hat=sigma_hat, gamma_hat=center(sigma_hat), n=n)


def center(a):
    """P A P with P = I - 11^T/p."""
    a = np.asarray(a, dtype=float)
    row = a.mean(axis=1, keepdims=True)
    col = a.mean(axis=0, keepdims=True)
    out = a - row - col + a.mean()
    return 0.5 * (out + out.T)


def population_sigma(summary, part):
    same = part.membership[:, None] == part.membership[None, :]
    sigma = np.where(same, summary.delta, summary.omega)
    np.fill_diagonal(sigma, 1.0)
    return sigma


def population_gamma(summary, part, p=None):
    """(1 - delta) P + p (delta - omega)/2 u_S u_S^T."""
    p = part.p if p is None else p
    if p != part.p or p % 2:
        raise DomainError(f"dimension mismatch: p={p}, partition has {part.p} sites")
    proj = np.eye(p) - np.full((p, p), 1.0 / p)
    u = part.u
    return (1.0 - summary.delta) * proj + p * (summary.delta - summary.omega) / 2.0 * np.outer(u, u)
