"""Exact joint law of the local magnetizations and its Gaussian-mixture approximation."""
import math
from dataclasses import dataclass, field

import numpy as np

from .free_energy import ground_states, hessian_at
from .model import check_exact_size, energy_from_magnetization
from .numerics import log_binomial_row, log_sum_exp


@dataclass(frozen=True, eq=False)
class MagnetizationLaw:
    """Unnormalized log-weights ln z_m on the lattice of achievable (mu_S, mu_Sbar).

    ``log_weights[a, b]`` is the weight of mu_S = grid[a], mu_Sbar = grid[b],
    where grid[k] = (2k - m)/m and k counts the +1 spins in the block.
    """

    m: int
    grid: np.ndarray = field(repr=False)
    log_weights: np.ndarray = field(repr=False)
    log_Z: float

    @property
    def probabilities(self):
        return np.exp(self.log_weights - self.log_Z)

    def mesh(self):
        return np.meshgrid(self.grid, self.grid, indexing="ij")

    def marginal(self):
        """Law of mu_S alone (identical to that of mu_Sbar)."""
        return self.probabilities.sum(axis=1)

    def flat_cdf(self):
        cdf = np.cumsum(self.probabilities.ravel())
        cdf /= cdf[-1]
        return cdf

    def rows(self):
        """(mu_s, mu_sbar, log_weight, prob) tuples in row-major grid order."""
        mu_s, mu_sbar = self.mesh()
        return zip(mu_s.ravel(), mu_sbar.ravel(), self.log_weights.ravel(), self.probabilities.ravel())


def magnetization_law(params):
    m = params.m
    check_exact_size(m)
    grid = (2.0 * np.arange(m + 1) - m) / m
    mu_s, mu_sbar = np.meshgrid(grid, grid, indexing="ij")
    log_binom = log_binomial_row(m)
    # grouping the binomial terms keeps the block-swap symmetry exact in floating point
    log_w = -energy_from_magnetization(params, mu_s, mu_sbar) + (log_binom[:, None] + log_binom[None, :])
    for arr in (grid, log_w):
        arr.setflags(write=False)
    return MagnetizationLaw(m=m, grid=grid, log_weights=log_w, log_Z=log_sum_exp(log_w))


def _evaluate(phi, x, y):
    out = np.asarray(phi(x, y), dtype=float)
    return np.broadcast_to(out, np.broadcast(x, y).shape)


def exact_moment(law, phi):
    """E[phi(mu_S, mu_Sbar)] under the exact law; phi must accept numpy arrays."""
    mu_s, mu_sbar = law.mesh()
    return float(np.sum(_evaluate(phi, mu_s, mu_sbar) * law.probabilities))


def _inverse_sqrt_hessian(params, state):
    _, values, vectors = hessian_at(params, state)
    return vectors @ np.diag(values**-0.5) @ vectors.T


def gaussian_mixture_expectation(params, phi, size=40, method="quadrature", seed=0):
    """Mixture approximation (1/|G|) sum_s E[phi(s + (2/sqrt m) H^{-1/2} Z)].

    ``method="quadrature"`` uses a size x size tensor Gauss-Hermite rule;
    ``method="mc"`` averages phi over ``size`` Gaussian draws per ground state.
    Points that leave [-1, 1]^2 are clipped to the boundary before phi is applied.
    """
    gs = ground_states(params)
    scale = 2.0 / math.sqrt(params.m)
    if method == "quadrature":
        nodes, weights = np.polynomial.hermite_e.hermegauss(size)
        weights = weights / weights.sum()
        z1, z2 = np.meshgrid(nodes, nodes, indexing="ij")
        z = np.stack([z1.ravel(), z2.ravel()])
        w = np.outer(weights, weights).ravel()
    elif method == "mc":
        rng = np.random.default_rng(seed)
        z = rng.standard_normal((2, size))
        w = np.full(size, 1.0 / size)
    else:
        raise ValueError(f"unknown method {method!r}")
    total = 0.0
    for state in gs.states:
        pts = np.asarray(state)[:, None] + scale * _inverse_sqrt_hessian(params, state) @ z
        pts = np.clip(pts, -1.0, 1.0)
        total += float(np.sum(w * _evaluate(phi, pts[0], pts[1])))
    return total / len(gs.states)


def mass_near_ground_states(law, params, radius):
    """Law mass within sup-norm distance ``radius`` of some ground state."""
    mu_s, mu_sbar = law.mesh()
    near = np.zeros(mu_s.shape, dtype=bool)
    for x, y in ground_states(params).states:
        near |= np.maximum(np.abs(mu_s - x), np.abs(mu_sbar - y)) <= radius
    return float(law.probabilities[near].sum())
