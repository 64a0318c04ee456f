"""Exact i.i.d. sampling from the Ising blockmodel.

Each draw first picks (mu_S, mu_Sbar) from the exact magnetization law by
inverse CDF, then fills each block with a uniformly random set of +1 spins
of the required size. Randomness comes from a counter-based Philox stream:
draw t consumes a fixed-width block of the stream starting at counter
t * width / 4, so any draw can be regenerated on its own from (seed, t).
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .magnetization import magnetization_law
from .model import ModelParams, Partition


@dataclass(frozen=True, eq=False)
class SampleBatch:
    configs: np.ndarray = field(repr=False)
    params: ModelParams
    partition: Partition
    seed: int

    @property
    def n(self):
        return self.configs.shape[0]


def stream_key(seed):
    """64-bit seed -> 128-bit Philox key (hashed, so nearby seeds give unrelated keys)."""
    if int(seed) != seed or seed < 0:
        raise DomainError(f"seed must be a nonnegative integer, got {seed}")
    return np.random.SeedSequence(int(seed)).generate_state(2, np.uint64)


def philox_generator(seed, *path):
    """Generator keyed by hash(seed, *path); used for independent per-trial streams."""
    ss = np.random.SeedSequence([int(seed), *[int(x) for x in path]])
    return np.random.Generator(np.random.Philox(ss))


def random_balanced_partition(p, seed):
    if int(p) != p or p < 2 or p % 2:
        raise DomainError(f"p must be an even integer >= 2, got {p}")
    rng = np.random.Generator(np.random.Philox(key=stream_key(seed)))
    members = rng.permutation(p)[: p // 2]
    return Partition.from_members(members, p)


def _draw_width(p):
    # one uniform for the magnetization plus one sort key per site, padded to whole Philox blocks
    return 4 * (-(-(p + 1) // 4))


def draw_uniforms(seed, p, start, count):
    """Uniforms for draws start..start+count-1, shape (count, p + 1)."""
    width = _draw_width(p)
    bitgen = np.random.Philox(key=stream_key(seed))
    if start:
        bitgen.advance(start * width // 4)
    return np.random.Generator(bitgen).random((count, width))[:, : p + 1]


def fill_blocks(uniforms, k_s, k_sbar, part):
    """Spins with the k_s smallest sort keys in S (k_sbar in Sbar) set to +1."""
    n = uniforms.shape[0]
    keys = uniforms[:, 1:]
    spins = -np.ones((n, part.p), dtype=np.int8)
    for block, k in ((part.members, k_s), (np.flatnonzero(~part.membership), k_sbar)):
        ranks = np.argsort(np.argsort(keys[:, block], axis=1, kind="stable"), axis=1, kind="stable")
        plus = ranks < k[:, None]
        sub = spins[:, block]
        sub[plus] = 1
        spins[:, block] = sub
    return spins


def sample_configurations(params, part, n, seed, law=None, start=0):
    """n exact draws from the model with planted partition ``part``.

    ``start`` offsets the draw index, so sample_configurations(..., n, seed, start=a)
    equals rows a.. of a longer batch with the same seed.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if part.p != params.p:
        raise DomainError(f"partition has p={part.p}, params have p={params.p}")
    if law is None:
        law = magnetization_law(params)
    m = params.m
    u = draw_uniforms(seed, params.p, start, n)
    cdf = law.flat_cdf()
    idx = np.minimum(np.searchsorted(cdf, u[:, 0], side="right"), cdf.size - 1)
    k_s, k_sbar = np.divmod(idx, m + 1)
    configs = fill_blocks(u, k_s, k_sbar, part)
    configs.setflags(write=False)
    return SampleBatch(configs=configs, params=params, partition=part, seed=int(seed))
