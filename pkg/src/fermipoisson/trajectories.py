"""Monte Carlo unravelling into Poisson-driven unitary jumps.

The K channels are sampled as one superposed Poisson process of total rate
``Lambda = sum_k lam_k``. Inter-arrival times are exponential with mean
``1 / Lambda`` and each event picks channel ``k`` with probability
``lam_k / Lambda``. By the superposition and thinning theorems this has the
same law as K independent processes merged in time order, and yields the
jump sequence in order directly.

Trajectory ``j`` draws from its own PCG64 stream seeded with
``SeedSequence((seed, j))``, so results do not depend on how trajectories
are split across threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channels import ChannelSet
from .errors import ConstraintError
from .states import DensityState, as_density

RNG_ALGORITHM = "numpy.random.PCG64 seeded by SeedSequence((seed, trajectory_index))"


@dataclass(frozen=True)
class TrajectoryConfig:
    horizon: float
    trajectories: int
    seed: int = 0

    def __post_init__(self):
        if self.trajectories < 1:
            raise ConstraintError("need at least one trajectory")
        if not self.horizon >= 0:
            raise ConstraintError(f"horizon must be nonnegative, got {self.horizon}")
        if self.seed < 0:
            raise ConstraintError("seed must be nonnegative")


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, index))))


def sample_jumps(rates, t: float, rng: np.random.Generator) -> list:
    """Channel indices of the events of a superposed Poisson process on ``[0, t]``, in time order."""
    rates = np.asarray(rates, dtype=float)
    total = rates.sum()
    if total * t == 0:
        return []
    cumulative = np.cumsum(rates / total)
    last = len(rates) - 1
    jumps = []
    clock = rng.exponential(1.0 / total)
    while clock <= t:
        jumps.append(min(int(np.searchsorted(cumulative, rng.random(), side="right")), last))
        clock += rng.exponential(1.0 / total)
    return jumps


def _apply_jumps(rho0: np.ndarray, unitaries, jumps) -> np.ndarray:
    if not jumps:
        return rho0
    w = np.eye(rho0.shape[0], dtype=complex)
    for k in jumps:
        w = unitaries[k] @ w
    return w @ rho0 @ w.conj().T


def sample_trajectory(rho0, cs: ChannelSet, t: float, rng: np.random.Generator) -> DensityState:
    """One endpoint ``U_{k_m} ... U_{k_1} rho0 U_{k_1}^+ ... U_{k_m}^+`` at time ``t``."""
    rho0 = as_density(rho0)
    jumps = sample_jumps(cs.rates, t, rng)
    return DensityState.trusted(_apply_jumps(rho0, [ch.unitary for ch in cs], jumps))


@dataclass(frozen=True, eq=False)
class EvolutionEstimate:
    mean: np.ndarray
    stderr: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def aggregated_stderr(self) -> float:
        """Root-sum-square of the entrywise standard errors."""
        return float(np.sqrt(np.sum(self.stderr**2)))


def estimate_evolution(rho0, cs: ChannelSet, cfg: TrajectoryConfig,
                       threads: int = 1) -> EvolutionEstimate:
    """Sample mean of ``cfg.trajectories`` endpoints with per-entry standard errors.

    The standard error of a complex entry is ``sqrt(var(re) + var(im)) / sqrt(N)``
    using the unbiased sample variances; it is zero when ``N == 1``.
    """
    rho0 = as_density(rho0)
    unitaries = [ch.unitary for ch in cs]
    rates = cs.rates
    big_n = cfg.trajectories
    endpoints = np.empty((big_n,) + rho0.shape, dtype=complex)
    counts = np.zeros((big_n, len(cs)), dtype=np.int64)

    def run(block):
        for j in block:
            jumps = sample_jumps(rates, cfg.horizon, trajectory_rng(cfg.seed, j))
            endpoints[j] = _apply_jumps(rho0, unitaries, jumps)
            counts[j] = np.bincount(jumps, minlength=len(cs))

    if threads > 1 and big_n > 1:
        blocks = np.array_split(np.arange(big_n), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, blocks))
    else:
        run(range(big_n))

    mean = endpoints.mean(axis=0)
    if big_n > 1:
        var = np.sum(np.abs(endpoints - mean) ** 2, axis=0) / (big_n - 1)
        stderr = np.sqrt(var / big_n)
    else:
        stderr = np.zeros(rho0.shape)
    metadata = {
        "seed": cfg.seed,
        "trajectories": big_n,
        "horizon": cfg.horizon,
        "total_rate": cs.total_rate,
        "event_counts": counts.sum(axis=0).tolist(),
        "rng": RNG_ALGORITHM,
    }
    return EvolutionEstimate(mean=mean, stderr=stderr, metadata=metadata)
