"""Monte Carlo recovery curves and the contour / phase-diagram tables."""
import functools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .covariance import empirical_gamma, exact_delta_omega, population_gamma
from .errors import DomainError, ResourceError
from .free_energy import ibm_free_energy, mean_field_solve, region_label
from .magnetization import magnetization_law
from .model import ModelParams
from .recovery import MAX_MLE_P, Method, diamond_distance, recover
from .sampler import random_balanced_partition, sample_configurations

TRIAL_COLUMNS = ("alpha", "beta", "p", "n", "trial_index", "method", "success", "diamond", "certified")
CONTOUR_COLUMNS = ("alpha", "beta", "x", "y", "g")
PHASE_COLUMNS = ("alpha", "beta", "region", "xtilde")


@dataclass(frozen=True)
class ExperimentConfig:
    alpha: float
    beta: float
    p_list: tuple
    n_list: tuple
    trials: int = 20
    method: Method = Method.SDP
    master_seed: int = 0
    output_path: str | None = None
    population: bool = False
    tol: float = 1e-9
    max_iters: int = 2000
    workers: int = 1
    timing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "p_list", tuple(int(p) for p in self.p_list))
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "method", Method(str(getattr(self.method, "value", self.method)).upper()))
        self.validate()

    def validate(self):
        if not self.p_list:
            raise DomainError("p_list is empty")
        for p in self.p_list:
            if p < 2 or p % 2:
                raise DomainError(f"every p must be even and >= 2, got {p}")
            if self.method is Method.MLE and p > MAX_MLE_P:
                raise ResourceError(f"MLE runs need p <= {MAX_MLE_P}")
        if not self.population:
            if not self.n_list or any(n < 1 for n in self.n_list):
                raise DomainError("n_list must hold positive sample sizes")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if self.master_seed < 0:
            raise DomainError("master_seed must be nonnegative")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")
        ModelParams(self.alpha, self.beta, self.p_list[0]).require_identifiable()

    def header(self):
        """JSON-able description; excludes execution-only knobs so outputs match across worker counts."""
        d = asdict(self)
        d["method"] = self.method.value
        d["p_list"] = list(self.p_list)
        d["n_list"] = list(self.n_list)
        for key in ("workers", "output_path"):
            d.pop(key)
        return d


@dataclass(frozen=True)
class TrialRow:
    alpha: float
    beta: float
    p: int
    n: int
    trial_index: int
    method: str
    success: int
    diamond: int
    certified: int
    wall_seconds: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if self.success and self.diamond != 0:
            raise DomainError("success requires diamond distance 0")

    def as_dict(self):
        return asdict(self)

    @classmethod
    def from_strings(cls, row):
        kinds = {f.name: f.type for f in fields(cls)}
        return cls(**{k: kinds[k](v) for k, v in row.items() if k in kinds})


@functools.lru_cache(maxsize=32)
def _law(alpha, beta, p):
    return magnetization_law(ModelParams(alpha, beta, p))


@functools.lru_cache(maxsize=32)
def _summary(alpha, beta, p):
    return exact_delta_omega(ModelParams(alpha, beta, p))


def trial_seeds(master_seed, p, n, trial):
    """Partition, sample and solver seeds; a function of (master_seed, p, n, trial) only."""
    state = np.random.SeedSequence([master_seed, p, n, trial]).generate_state(3, np.uint64)
    return tuple(int(s) for s in state)


def run_trial(config, p, n, trial):
    start = time.perf_counter()
    params = ModelParams(config.alpha, config.beta, p)
    part_seed, sample_seed, solver_seed = trial_seeds(config.master_seed, p, n, trial)
    part = random_balanced_partition(p, part_seed)
    kwargs = {}
    if config.method is Method.SDP:
        kwargs = {"tol": config.tol, "max_iters": config.max_iters, "seed": solver_seed}
    if config.population:
        gamma = population_gamma(_summary(config.alpha, config.beta, p), part)
        result = recover(config.method, gamma, **kwargs)
    else:
        batch = sample_configurations(params, part, n, sample_seed, law=_law(config.alpha, config.beta, p))
        emp = empirical_gamma(batch)
        result = recover(config.method, emp.gamma_hat, sigma_hat=emp.sigma_hat, **kwargs)
    diamond = diamond_distance(result.labels, part)
    return TrialRow(
        alpha=config.alpha,
        beta=config.beta,
        p=p,
        n=n,
        trial_index=trial,
        method=config.method.value,
        success=int(diamond == 0),
        diamond=diamond,
        certified=int(bool(result.certified)),
        wall_seconds=time.perf_counter() - start,
    )


def _run_task(args):
    return run_trial(*args)


def run_recovery_curve(config, workers=None):
    """One TrialRow per (p, n, trial), sorted by (p, n, trial_index).

    In population mode the exact population matrix replaces the sample
    estimate and n is recorded as 0.
    """
    n_values = (0,) if config.population else config.n_list
    tasks = [(config, p, n, t) for p in config.p_list for n in n_values for t in range(config.trials)]
    workers = config.workers if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        rows = [_run_task(t) for t in tasks]
    return sorted(rows, key=lambda r: (r.p, r.n, r.trial_index))


def trial_columns(config):
    return TRIAL_COLUMNS + (("wall_seconds",) if config.timing else ())


def success_rates(rows):
    """{(p, n): fraction of successful trials}."""
    out = {}
    for r in rows:
        out.setdefault((r.p, r.n), []).append(r.success)
    return {k: sum(v) / len(v) for k, v in out.items()}


def minimal_n(rows, p, level=0.95):
    """Smallest n whose success rate at p reaches ``level`` (None if none does)."""
    rates = success_rates(rows)
    for n in sorted(n for q, n in rates if q == p):
        if rates[(p, n)] >= level:
            return n
    return None


def open_grid(size):
    """Cell centers of a uniform size-cell partition of (-1, 1)."""
    if size < 2:
        raise DomainError("grid_size must be >= 2")
    return -1.0 + (2.0 * np.arange(size) + 1.0) / size


def emit_contour(params, grid_size):
    xs = open_grid(grid_size)
    x, y = np.meshgrid(xs, xs, indexing="ij")
    g = ibm_free_energy(params, x, y)
    return [
        {"alpha": params.alpha, "beta": params.beta, "x": float(a), "y": float(b), "g": float(c)}
        for a, b, c in zip(x.ravel(), y.ravel(), g.ravel())
    ]


def contour_minima(rows):
    """Strict local minima (8-neighborhood, so diagonal saddles are excluded) as (x, y, g) triples."""
    xs = sorted({r["x"] for r in rows})
    k = len(xs)
    g = np.array([r["g"] for r in rows]).reshape(k, k)
    padded = np.pad(g, 1, constant_values=np.inf)
    is_min = np.ones_like(g, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                is_min &= g < padded[1 + di:k + 1 + di, 1 + dj:k + 1 + dj]
    return [(xs[i], xs[j], float(g[i, j])) for i, j in zip(*np.nonzero(is_min))]


def _axis(lo, hi, step):
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + k * step, 12) for k in range(count)]


def emit_phase_diagram(alpha_range, beta_range, step):
    """Region label and spontaneous magnetization on a grid of alpha < beta points.

    Points on the critical line beta + |alpha| = 2 are labeled II (the only
    ground state there is (0, 0)).
    """
    if step <= 0:
        raise DomainError("step must be positive")
    rows = []
    for alpha in _axis(*alpha_range, step):
        for beta in _axis(*beta_range, step):
            if not alpha < beta:
                continue
            region = region_label(alpha, beta)
            xt = 0.0 if region == "II" else mean_field_solve((beta + abs(alpha)) / 2.0)
            rows.append({"alpha": alpha, "beta": beta, "region": region, "xtilde": xt})
    return rows
