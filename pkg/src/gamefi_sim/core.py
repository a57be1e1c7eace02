"""Shared agent primitives: seeded sub-streams and productivity dynamics.

Every repeat of an experiment owns one deterministic random stream derived
from (master_seed, repeat_index), so repeats can run in any order or in
parallel and still reproduce bit-identical results. Player productivity is
heterogeneous (log-normal at entry) and fluctuates over time through a
multiplicative mutation step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

MAX_SEED = 2**64


@dataclass(frozen=True)
class EconParams:
    """Population-level knobs for productivity draws and mutation noise.

    ``productivity_init_mean`` is the median of the log-normal entry
    distribution; ``productivity_floor`` keeps agents from degenerating to
    zero output after repeated negative shocks.
    """

    productivity_init_mean: float = 1.0
    productivity_init_sigma: float = 0.5
    mutation_sigma: float = 0.1
    productivity_floor: float = 0.01

    def validate(self, prefix: str = "econ") -> None:
        if not self.productivity_init_mean > 0:
            raise ValueError(f"{prefix}.productivity_init_mean must be positive")
        if not self.productivity_init_sigma >= 0:
            raise ValueError(f"{prefix}.productivity_init_sigma must be non-negative")
        if not self.mutation_sigma >= 0:
            raise ValueError(f"{prefix}.mutation_sigma must be non-negative")
        if not self.productivity_floor > 0:
            raise ValueError(f"{prefix}.productivity_floor must be positive")


@dataclass(frozen=True)
class IterationRecord:
    """Observables for one simulated iteration (day) of one repeat.

    ``extra`` carries model-specific counters, e.g. ``nfts_minted`` /
    ``staked_total`` / ``per_nft_reward`` for the synthesis economy and
    ``payout_total`` / ``winner_count`` for the retention economy.
    """

    iteration: int
    total_value: float
    active_players: int
    joins: int
    departures: int
    extra: Dict[str, float] = field(default_factory=dict)


def derive_stream(master_seed: int, repeat_index: int) -> np.random.Generator:
    """Build the deterministic random stream for one repeat.

    Sub-streams are derived by hashing (master_seed, repeat_index) through
    numpy's SeedSequence, which guarantees platform-independent draw
    sequences and statistically independent streams across repeat indices.
    """
    if not 0 <= master_seed < MAX_SEED:
        raise ValueError("master_seed must be a non-negative 64-bit integer")
    if repeat_index < 0:
        raise ValueError("repeat_index must be non-negative")
    seq = np.random.SeedSequence((master_seed, repeat_index))
    return np.random.Generator(np.random.PCG64(seq))


def init_productivity(rng: np.random.Generator, params: EconParams) -> float:
    """Draw one entry productivity: log-normal with median ``init_mean``."""
    z = rng.standard_normal()
    value = params.productivity_init_mean * math.exp(params.productivity_init_sigma * z)
    return max(value, params.productivity_floor)


def init_productivity_batch(
    rng: np.random.Generator, n: int, params: EconParams
) -> np.ndarray:
    """Vector form of :func:`init_productivity` for a cohort of ``n`` joiners.

    Consumes exactly ``n`` standard normals, bit-identical to ``n``
    consecutive scalar calls on the same stream. The exponential goes
    through math.exp per element: numpy's vectorized exp can differ from
    libm by one ulp, which would break scalar/batch equivalence.
    """
    z = rng.standard_normal(n)
    mean = params.productivity_init_mean
    sigma = params.productivity_init_sigma
    values = np.array([mean * math.exp(sigma * zi) for zi in z], dtype=np.float64)
    return np.maximum(values, params.productivity_floor)


def mutate_productivity(v: float, rng: np.random.Generator, params: EconParams) -> float:
    """Apply one multiplicative productivity shock.

    The relative shock is a zero-mean normal clamped to [-0.9, +0.9], so a
    single step can never wipe out (or multiply tenfold) an agent's output;
    the result is floored at ``productivity_floor``.
    """
    z = rng.standard_normal()
    eps = min(max(params.mutation_sigma * z, -0.9), 0.9)
    return max(v * (1.0 + eps), params.productivity_floor)


def mutate_productivity_batch(
    values: np.ndarray, rng: np.random.Generator, params: EconParams
) -> np.ndarray:
    """Vector form of :func:`mutate_productivity`; one normal per survivor."""
    z = rng.standard_normal(len(values))
    eps = np.clip(params.mutation_sigma * z, -0.9, 0.9)
    return np.maximum(values * (1.0 + eps), params.productivity_floor)
