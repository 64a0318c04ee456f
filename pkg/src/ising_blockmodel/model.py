"""Ising blockmodel: parameters, balanced partitions, Hamiltonian and density.

Pair sums in the Hamiltonian run over *ordered* pairs and include i == j, so
that

    H(sigma) = -(beta/2p) sum_{i~j} s_i s_j - (alpha/2p) sum_{i!~j} s_i s_j
             = -(m/4) (2 alpha mu_S mu_Sbar + beta (mu_S^2 + mu_Sbar^2))

holds exactly. Many Ising conventions drop the diagonal; this one keeps it.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ResourceError

MAX_EXACT_M = 5000


@dataclass(frozen=True)
class ModelParams:
    alpha: float
    beta: float
    p: int

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 2 or self.p % 2:
            raise DomainError(f"p must be an even integer >= 2, got {self.p}")
        if not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise DomainError("alpha and beta must be finite")
        if self.alpha > self.beta:
            raise DomainError(f"need alpha <= beta, got alpha={self.alpha}, beta={self.beta}")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def m(self):
        return self.p // 2

    def require_identifiable(self):
        if not self.alpha < self.beta:
            raise DomainError("recovery needs alpha < beta; the partition is unidentifiable at alpha == beta")
        return self

    def with_p(self, p):
        return ModelParams(self.alpha, self.beta, p)

    def to_dict(self):
        return {"alpha": self.alpha, "beta": self.beta, "p": self.p}


@dataclass(frozen=True, eq=False)
class Partition:
    """Balanced two-block labeling of p sites; ``membership[i]`` is True for i in S."""

    membership: np.ndarray = field(repr=False)

    def __post_init__(self):
        mem = np.asarray(self.membership)
        if mem.ndim != 1 or mem.size < 2:
            raise DomainError("membership must be a 1-d vector of length >= 2")
        if mem.dtype != bool:
            if not np.isin(mem, (0, 1)).all():
                raise DomainError("membership entries must be 0/1 or boolean")
            mem = mem.astype(bool)
        if mem.size % 2 or mem.sum() != mem.size // 2:
            raise DomainError("partition must be balanced: exactly p/2 sites in S")
        mem = mem.copy()
        mem.setflags(write=False)
        object.__setattr__(self, "membership", mem)

    @classmethod
    def from_members(cls, members, p):
        mem = np.zeros(p, dtype=bool)
        mem[list(members)] = True
        return cls(mem)

    @classmethod
    def from_signs(cls, signs):
        signs = np.asarray(signs)
        return cls(signs > 0)

    @classmethod
    def from_string(cls, text):
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise DomainError(f"membership string must be 0/1 characters, got {text!r}")
        return cls(np.array([c == "1" for c in text]))

    def to_string(self):
        return "".join("1" if b else "0" for b in self.membership)

    @property
    def p(self):
        return self.membership.size

    @property
    def m(self):
        return self.p // 2

    @property
    def members(self):
        return np.flatnonzero(self.membership)

    @property
    def v(self):
        """The +-1 vector 1_S - 1_Sbar."""
        return np.where(self.membership, 1.0, -1.0)

    @property
    def u(self):
        return self.v / np.sqrt(self.p)

    def complement(self):
        return Partition(~self.membership)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.membership, other.membership)

    def __hash__(self):
        return hash(self.membership.tobytes())

    def __repr__(self):
        return f"Partition({self.to_string()})"


def as_configuration(spins, p=None):
    """Validate a +-1 spin vector (or an n x p batch)."""
    spins = np.asarray(spins)
    if spins.size == 0 or not np.isin(spins, (-1, 1)).all():
        raise DomainError("spins must be +-1")
    if p is not None and spins.shape[-1] != p:
        raise DomainError(f"configuration has length {spins.shape[-1]}, expected {p}")
    return spins


def local_magnetizations(spins, part):
    """(mu_S, mu_Sbar) for a configuration or each row of a batch."""
    spins = as_configuration(spins, part.p)
    mem = part.membership
    mu_s = spins[..., mem].sum(axis=-1) / part.m
    mu_sbar = spins[..., ~mem].sum(axis=-1) / part.m
    return mu_s, mu_sbar


def energy_from_magnetization(params, mu_s, mu_sbar):
    return -(params.m / 4.0) * (2 * params.alpha * mu_s * mu_sbar + params.beta * (mu_s**2 + mu_sbar**2))


def hamiltonian(spins, part, params):
    if part.p != params.p:
        raise DomainError(f"partition has p={part.p}, params have p={params.p}")
    mu_s, mu_sbar = local_magnetizations(spins, part)
    out = energy_from_magnetization(params, mu_s, mu_sbar)
    return float(out) if np.ndim(out) == 0 else out


def coupling_matrix(part, params):
    """Q with Q_ij = beta/p within blocks and alpha/p across, so H = -sigma^T Q sigma / 2."""
    same = part.membership[:, None] == part.membership[None, :]
    return np.where(same, params.beta, params.alpha) / params.p


def log_partition_exact(params):
    """ln Z through the (m+1)^2 magnetization grid; the same for every balanced S."""
    from .magnetization import magnetization_law

    return magnetization_law(params).log_Z


def log_density(spins, part, params, log_z=None):
    if log_z is None:
        log_z = log_partition_exact(params)
    return -hamiltonian(spins, part, params) - log_z


def check_exact_size(m):
    if m > MAX_EXACT_M:
        raise ResourceError(f"exact magnetization grid limited to m <= {MAX_EXACT_M}, got m={m}")
