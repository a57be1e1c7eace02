"""Top-contributor reward economy with tolerance-driven churn.

Each iteration the system ranks active players by their contributions over
a trailing window and pays the top fraction of them a fixed share of the
window's total earnings, split in proportion to their own window totals.
Players track how many consecutive iterations they went unrewarded; once
that streak exceeds their personal tolerance they quit for good.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from .core import (
    EconParams,
    IterationRecord,
    init_productivity_batch,
    mutate_productivity_batch,
)


@dataclass(frozen=True)
class RetentionParams:
    """Constants for the high-retention reward economy.

    The headline configuration rewards the top 20% of players with 80% of
    the total earnings from the trailing five iterations. Tolerances are
    drawn uniformly from [tolerance_min, tolerance_max] at join time.
    Arrivals reuse the same n0 / alpha^(i-1) law as the synthesis economy,
    ungated (this model defines no entry condition).
    """

    top_fraction: float = 0.2
    pool_share: float = 0.8
    window: int = 5
    tolerance_min: int = 3
    tolerance_max: int = 10
    n0: int = 200
    alpha: float = 1.02
    equal_split: bool = False

    def validate(self, prefix: str = "retention") -> None:
        if not 0 < self.top_fraction <= 1:
            raise ValueError(f"{prefix}.top_fraction must be in (0, 1]")
        if not 0 <= self.pool_share <= 1:
            raise ValueError(f"{prefix}.pool_share must be between 0 and 1")
        if self.window < 1:
            raise ValueError(f"{prefix}.window must be at least 1")
        if self.tolerance_min < 1:
            raise ValueError(f"{prefix}.tolerance_min must be at least 1")
        if self.tolerance_max < self.tolerance_min:
            raise ValueError(
                f"{prefix}.tolerance_min must not exceed {prefix}.tolerance_max"
            )
        if self.n0 < 0:
            raise ValueError(f"{prefix}.n0 must be non-negative")
        if not self.alpha > 1:
            raise ValueError(f"{prefix}.alpha must exceed 1")


@dataclass
class RetentionPlayer:
    """Scalar per-player view used by the rule-level operations."""

    id: int
    productivity: float
    tolerance: int
    consecutive_misses: int = 0


def window_totals(
    ledger: Mapping[int, Sequence[float]], window: int
) -> Dict[int, float]:
    """Sum each player's most recent contributions, up to ``window`` entries.

    Players present for fewer iterations than the window are summed over
    what they have; there is no zero-padding penalty for newcomers.
    """
    return {pid: math.fsum(entries[-window:]) for pid, entries in ledger.items()}


def select_top(totals: Mapping[int, float], top_fraction: float) -> List[int]:
    """Pick the winner set: the max(1, floor(top_fraction * N)) highest totals.

    Boundary ties break toward the lower player id, so selection is fully
    deterministic. Returns winners in rank order; empty input yields an
    empty list.
    """
    if not totals:
        return []
    count = max(1, int(math.floor(top_fraction * len(totals))))
    ranked = sorted(totals, key=lambda pid: (-totals[pid], pid))
    return ranked[:count]


def payout(
    totals: Mapping[int, float],
    winners: Iterable[int],
    pool_share: float,
    equal_split: bool = False,
) -> Dict[int, float]:
    """Distribute pool_share of the all-player window total among winners.

    The split is proportional to each winner's own window total (or equal
    when ``equal_split`` is set). With no winners the pool goes undistributed.
    """
    winners = list(winners)
    if not winners:
        return {}
    pool = pool_share * math.fsum(totals.values())
    if equal_split:
        return {pid: pool / len(winners) for pid in winners}
    winner_sum = math.fsum(totals[pid] for pid in winners)
    if winner_sum <= 0.0:
        return {pid: pool / len(winners) for pid in winners}
    return {pid: pool * totals[pid] / winner_sum for pid in winners}


def update_churn(
    players: List[RetentionPlayer], winners: Iterable[int]
) -> List[RetentionPlayer]:
    """Advance miss counters and pull out the players who give up.

    Winners reset to zero misses; everyone else gains one. Players whose
    streak exceeds their tolerance are removed from ``players`` (in place)
    and returned as the departure list.
    """
    winner_set = set(winners)
    departed: List[RetentionPlayer] = []
    remaining: List[RetentionPlayer] = []
    for player in players:
        if player.id in winner_set:
            player.consecutive_misses = 0
        else:
            player.consecutive_misses += 1
        if player.consecutive_misses > player.tolerance:
            departed.append(player)
        else:
            remaining.append(player)
    players[:] = remaining
    return departed


@dataclass
class RetentionState:
    """Full world state for one repeat, stored column-wise for speed.

    ``window_matrix`` is a per-player ring buffer of the last ``window``
    contributions; rows are zero-filled at join so a row sum is always
    the player's trailing-window total. Departed players take their rows
    (and thus their ledger history) with them.
    """

    params: RetentionParams
    econ: EconParams
    iteration: int = 0
    next_id: int = 0
    ids: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    productivity: np.ndarray = field(default_factory=lambda: np.zeros(0))
    tolerance: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    misses: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    window_matrix: np.ndarray = field(default_factory=lambda: np.zeros((0, 1)))

    @property
    def active_players(self) -> int:
        return len(self.ids)


def new_state(params: RetentionParams, econ: EconParams) -> RetentionState:
    state = RetentionState(params=params, econ=econ)
    state.window_matrix = np.zeros((0, params.window))
    return state


def step(
    state: RetentionState, rng: np.random.Generator
) -> Tuple[RetentionState, IterationRecord]:
    """Advance the world by one iteration, mutating ``state`` in place.

    Phase order: (1) ungated arrivals, (2) contributions recorded into the
    trailing window, (3) ranking, winner selection and payout, (4) miss
    bookkeeping and churn, (5) mutation of survivor productivity. Stream
    consumption per iteration: one normal per joiner, then one uniform per
    joiner (tolerance), then one normal per survivor.
    """
    p = state.params
    econ = state.econ
    i = state.iteration + 1

    # (1) arrivals: same decaying cohort law as the synthesis economy, no gate
    joins = int(math.floor(p.n0 / p.alpha ** (i - 1)))
    if joins:
        fresh = init_productivity_batch(rng, joins, econ)
        span = p.tolerance_max - p.tolerance_min + 1
        tol = p.tolerance_min + (rng.random(joins) * span).astype(np.int64)
        state.ids = np.concatenate([state.ids, np.arange(state.next_id, state.next_id + joins)])
        state.productivity = np.concatenate([state.productivity, fresh])
        state.tolerance = np.concatenate([state.tolerance, tol])
        state.misses = np.concatenate([state.misses, np.zeros(joins, dtype=np.int64)])
        state.window_matrix = np.concatenate(
            [state.window_matrix, np.zeros((joins, p.window))]
        )
        state.next_id += joins

    n = state.active_players

    # (2) contributions land in the ring buffer
    total_value = float(np.sum(state.productivity))
    winner_count = 0
    payout_total = 0.0
    window_total_sum = 0.0
    departures = 0
    if n:
        state.window_matrix[:, (i - 1) % p.window] = state.productivity

        # (3) rank by trailing-window totals, pay the top fraction
        totals = state.window_matrix.sum(axis=1)
        window_total_sum = float(np.sum(totals))
        winner_count = max(1, int(math.floor(p.top_fraction * n)))
        order = np.lexsort((state.ids, -totals))
        winner_idx = order[:winner_count]
        pool = p.pool_share * window_total_sum
        if p.equal_split:
            amounts = np.full(winner_count, pool / winner_count)
        else:
            winner_sum = float(np.sum(totals[winner_idx]))
            if winner_sum <= 0.0:
                amounts = np.full(winner_count, pool / winner_count)
            else:
                amounts = pool * totals[winner_idx] / winner_sum
        payout_total = float(np.sum(amounts))

        # (4) misses and churn
        is_winner = np.zeros(n, dtype=bool)
        is_winner[winner_idx] = True
        state.misses = np.where(is_winner, 0, state.misses + 1)
        leave = state.misses > state.tolerance
        departures = int(leave.sum())
        if departures:
            keep = ~leave
            state.ids = state.ids[keep]
            state.productivity = state.productivity[keep]
            state.tolerance = state.tolerance[keep]
            state.misses = state.misses[keep]
            state.window_matrix = state.window_matrix[keep]

    # (5) mutation of survivors
    if state.active_players:
        state.productivity = mutate_productivity_batch(state.productivity, rng, econ)

    state.iteration = i
    record = IterationRecord(
        iteration=i,
        total_value=total_value,
        active_players=n,
        joins=joins,
        departures=departures,
        extra={
            "payout_total": payout_total,
            "winner_count": float(winner_count),
            "window_total_sum": window_total_sum,
        },
    )
    return state, record
