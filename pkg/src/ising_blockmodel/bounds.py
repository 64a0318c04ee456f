"""Closed-form sample-complexity quantities: single-swap KL, lower and upper bounds on n."""
import json
import math
from dataclasses import asdict, dataclass

from .covariance import exact_delta_omega
from .errors import DomainError


@dataclass(frozen=True)
class SampleComplexityReport:
    kl_per_sample: float
    n_lower: float
    n_upper: float
    r_np: float
    c_alpha_beta: float
    gamma: float
    delta: float
    gap: float
    p: int
    n: float

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)


def kl_pair(params, summary, p=None):
    """KL(P_T, P_S) = ((p - 2)/p) (beta - alpha)(delta - omega) for a single swap T of S."""
    p = params.p if p is None else p
    if not params.alpha < params.beta:
        raise DomainError("KL formula needs alpha < beta")
    if p < 2 or p % 2:
        raise DomainError("p must be even and >= 2")
    return (p - 2) / p * (params.beta - params.alpha) * summary.gap


def single_swap_neighborhood_size(p):
    """Number of partitions reachable by exchanging one site of S with one of Sbar: m^2."""
    return (p // 2) ** 2


def stated_neighborhood_size(p):
    """The (m - 1)^2 count used in the lower-bound arithmetic."""
    return (p // 2 - 1) ** 2


def lower_bound_error_probability(p, gamma):
    """((p - 2)/p)(1 - gamma - sqrt(gamma)): minimax error floor below n_lower."""
    _check_gamma(gamma)
    if p < 6:
        raise DomainError("lower bound stated for p >= 6")
    return (p - 2) / p * (1.0 - gamma - math.sqrt(gamma))


def fano_error_probability(p, gamma):
    """sqrt(T)/(1 + sqrt(T)) (1 - gamma - sqrt(gamma / ln T)) with T = (m - 1)^2."""
    _check_gamma(gamma)
    t = stated_neighborhood_size(p)
    if t < 2:
        raise DomainError("neighborhood too small")
    return math.sqrt(t) / (1 + math.sqrt(t)) * (1.0 - gamma - math.sqrt(gamma / math.log(t)))


def _check_gamma(gamma):
    if not 0 < gamma < 0.6:
        raise DomainError("gamma must lie in (0, 3/5)")


def n_lower_bound(params, gap, p, gamma):
    _check_gamma(gamma)
    if p < 6:
        raise DomainError("lower bound stated for p >= 6")
    return gamma * math.log(p / 4.0) / ((params.beta - params.alpha) * gap)


def n_upper_bound(gap, p, delta, c_ab):
    return 16.0 * (3.0 + 2.0 / c_ab) * math.log(4.0 * p / delta) / gap


def deviation_radius(n, p, delta, gap, c_ab):
    """R_{n,p}(delta) = 2p max(sqrt((1 + 2/C) gap ln(4p/delta)/n), (6 + 4/C) ln(p/delta)/n)."""
    if n <= 0:
        raise DomainError("n must be positive")
    first = math.sqrt((1.0 + 2.0 / c_ab) * gap * math.log(4.0 * p / delta) / n)
    second = (6.0 + 4.0 / c_ab) * math.log(p / delta) / n
    return 2.0 * p * max(first, second)


def radius_crossover(p, delta, gap, c_ab):
    """n at which the two branches of the deviation radius coincide."""
    return (6.0 + 4.0 / c_ab) ** 2 * math.log(p / delta) ** 2 / ((1.0 + 2.0 / c_ab) * gap * math.log(4.0 * p / delta))


def sample_size_bounds(params, p=None, gamma=0.5, delta=0.05, c_ab=None, n=None, summary=None):
    """Lower bound, SDP sufficient sample size and deviation radius at the exact gap.

    ``c_ab`` defaults to p * gap, the largest constant with gap >= c_ab / p.
    The radius is evaluated at ``n`` (default: the sufficient sample size).
    """
    params.require_identifiable()
    p = params.p if p is None else p
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    if summary is None:
        summary = exact_delta_omega(params.with_p(p))
    gap = summary.gap
    if gap <= 0:
        raise DomainError("gap must be positive")
    c_ab = p * gap if c_ab is None else c_ab
    if c_ab <= 0:
        raise DomainError("C_{alpha,beta} must be positive")
    n_up = n_upper_bound(gap, p, delta, c_ab)
    n_eval = n_up if n is None else n
    return SampleComplexityReport(
        kl_per_sample=kl_pair(params, summary, p),
        n_lower=n_lower_bound(params, gap, p, gamma),
        n_upper=n_up,
        r_np=deviation_radius(n_eval, p, delta, gap, c_ab),
        c_alpha_beta=c_ab,
        gamma=gamma,
        delta=delta,
        gap=gap,
        p=p,
        n=n_eval,
    )
