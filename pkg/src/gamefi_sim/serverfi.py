"""Fragment-lottery economy with NFT synthesis and staking payouts.

Players convert contributed value into lottery draws at a fixed exchange
rate, collect one fragment per draw (uniform over ``k`` types), and mint an
NFT whenever they hold a full set. Minted NFTs are staked immediately and
the staking pool pays out a share of each iteration's total contributed
value. Agents are rational: prospective joiners compare the expected cost
of completing a fragment set against the projected reward of one staked
NFT, and incumbents without an NFT leave once finishing their set stops
being worth it.

The per-iteration reward pool is shared by the NFTs staked during that
iteration, so heavy minting dilutes what each new NFT earns. In steady
state the marginal NFT earns about ``staking_share * k * lam`` per
iteration, which makes the join/stay economics parameter-driven rather
than a foregone conclusion (see ``step``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import (
    EconParams,
    IterationRecord,
    init_productivity_batch,
    mutate_productivity_batch,
)


@dataclass(frozen=True)
class ServerFiParams:
    """Economy constants for the synthesis model.

    ``lam`` is the contributed value consumed per lottery draw, ``k`` the
    number of fragment types, ``n0``/``alpha`` the day-one cohort size and
    the geometric decay of later cohorts, ``staking_share`` the fraction of
    each iteration's total value paid into the staking pool, and
    ``payoff_horizon`` the number of iterations of per-NFT reward a
    rational agent projects when deciding to join or leave.
    """

    lam: float = 2.0
    k: int = 8
    n0: int = 200
    alpha: float = 1.02
    staking_share: float = 0.1
    payoff_horizon: int = 50

    def validate(self, prefix: str = "serverfi") -> None:
        if not self.lam > 1:
            raise ValueError(f"{prefix}.lambda must exceed 1")
        if not 1 <= self.k <= 64:
            raise ValueError(f"{prefix}.k must be between 1 and 64")
        if self.n0 < 0:
            raise ValueError(f"{prefix}.n0 must be non-negative")
        if not self.alpha > 1:
            raise ValueError(f"{prefix}.alpha must exceed 1")
        if not 0 <= self.staking_share <= 1:
            raise ValueError(f"{prefix}.staking_share must be between 0 and 1")
        if self.payoff_horizon < 1:
            raise ValueError(f"{prefix}.payoff_horizon must be at least 1")


@dataclass
class ServerFiPlayer:
    """Scalar per-player view used by the rule-level operations."""

    id: int
    productivity: float
    draw_credit: float = 0.0
    counts: List[int] = field(default_factory=list)
    staked_nfts: int = 0


def harmonic(n: int) -> float:
    """H_n = sum_{i=1..n} 1/i, with H_0 = 0."""
    return sum(1.0 / i for i in range(1, n + 1))


def draws_for_contribution(credit: float, value: float, lam: float) -> Tuple[int, float]:
    """Convert carried credit plus newly contributed value into whole draws.

    Returns ``(num_draws, new_credit)`` with the remainder carried forward,
    so low producers lose nothing to rounding; ``credit + value`` always
    equals ``num_draws * lam + new_credit``.
    """
    total = credit + value
    num_draws = int(math.floor(total / lam))
    new_credit = total - num_draws * lam
    # guard against division rounding across an exact multiple of lam
    if new_credit < 0.0:
        num_draws -= 1
        new_credit += lam
    elif new_credit >= lam:
        num_draws += 1
        new_credit -= lam
    return num_draws, new_credit


def draw_fragments(rng: np.random.Generator, num_draws: int, k: int) -> np.ndarray:
    """Draw ``num_draws`` fragment indices, each uniform on {0..k-1}.

    Consumes exactly ``num_draws`` uniforms from ``rng``.
    """
    u = rng.random(num_draws)
    return (u * k).astype(np.int64)


def synthesize(counts: Sequence[int]) -> Tuple[int, List[int]]:
    """Mint as many NFTs as the inventory allows (one of each type per mint).

    Returns ``(minted, remaining_counts)``; ``minted`` is the minimum count
    across types, i.e. synthesis repeats until some type runs out.
    """
    minted = min(counts)
    return minted, [c - minted for c in counts]


def expected_collection_cost(k: int, lam: float) -> float:
    """Expected value a newcomer must contribute to complete a full set.

    Classic coupon-collector result: k * H_k draws on average, each draw
    costing ``lam`` of contributed value.
    """
    return lam * k * harmonic(k)


def expected_remaining_cost(missing: int, k: int, lam: float) -> float:
    """Expected further cost to obtain ``missing`` distinct types out of k."""
    if not 0 <= missing <= k:
        raise ValueError("missing must be between 0 and k")
    return lam * k * harmonic(missing)


def per_nft_reward(total_value: float, staking_share: float, staked_count: int) -> float:
    """Per-NFT payout when ``staked_count`` NFTs share the iteration pool."""
    if staked_count <= 0:
        return 0.0
    return staking_share * total_value / staked_count


def entry_gate(expected_cost: float, last_per_nft_reward: float, payoff_horizon: int) -> bool:
    """True (open) when the projected reward of one NFT covers the set cost."""
    return last_per_nft_reward * payoff_horizon >= expected_cost


def arrivals(iteration: int, n0: int, alpha: float, gate_open: bool) -> int:
    """Size of the joining cohort: floor(n0 / alpha^(i-1)), zero when gated."""
    if not gate_open:
        return 0
    return int(math.floor(n0 / alpha ** (iteration - 1)))


def should_churn(
    player: ServerFiPlayer, last_per_nft_reward: float, params: ServerFiParams
) -> bool:
    """Rational exit rule for one player (True means the player leaves).

    NFT holders always stay; a non-holder leaves when the expected cost of
    finishing their fragment set exceeds the projected payoff of the NFT it
    would mint.
    """
    if player.staked_nfts >= 1:
        return False
    missing = sum(1 for c in player.counts if c == 0)
    cost = expected_remaining_cost(missing, params.k, params.lam)
    return cost > last_per_nft_reward * params.payoff_horizon


@dataclass
class ServerFiState:
    """Full world state for one repeat, stored column-wise for speed.

    Row ``j`` of every array describes one active player; departed players
    are dropped. ``last_per_nft_reward`` is None until the first payout
    event: with no observed reward to project from, rational agents have no
    basis to stay out (the gate is open) or to quit (churn is inactive).
    """

    params: ServerFiParams
    econ: EconParams
    iteration: int = 0
    next_id: int = 0
    last_per_nft_reward: Optional[float] = None
    ids: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    joined_at: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    productivity: np.ndarray = field(default_factory=lambda: np.zeros(0))
    draw_credit: np.ndarray = field(default_factory=lambda: np.zeros(0))
    counts: np.ndarray = field(default_factory=lambda: np.zeros((0, 1), dtype=np.int64))
    staked: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def active_players(self) -> int:
        return len(self.ids)


def new_state(params: ServerFiParams, econ: EconParams) -> ServerFiState:
    state = ServerFiState(params=params, econ=econ)
    state.counts = np.zeros((0, params.k), dtype=np.int64)
    return state


def step(state: ServerFiState, rng: np.random.Generator) -> Tuple[ServerFiState, IterationRecord]:
    """Advance the world by one iteration, mutating ``state`` in place.

    Phase order: (1) gated arrivals, (2) contributions (total value T is
    the sum over everyone active now), (3) credit-to-draw conversion,
    fragment lottery and synthesis with immediate staking, (4) staking
    payout to the freshly staked cohort, (5) rational churn, (6) mutation
    of survivor productivity. Stream consumption per iteration is: one
    normal per joiner, one uniform per lottery draw, one normal per
    survivor, in that order.
    """
    p = state.params
    econ = state.econ
    i = state.iteration + 1

    # (1) arrivals
    cost = expected_collection_cost(p.k, p.lam)
    if state.last_per_nft_reward is None:
        gate_open = True
    else:
        gate_open = entry_gate(cost, state.last_per_nft_reward, p.payoff_horizon)
    joins = arrivals(i, p.n0, p.alpha, gate_open)
    if joins:
        fresh = init_productivity_batch(rng, joins, econ)
        state.ids = np.concatenate([state.ids, np.arange(state.next_id, state.next_id + joins)])
        state.joined_at = np.concatenate([state.joined_at, np.full(joins, i, dtype=np.int64)])
        state.productivity = np.concatenate([state.productivity, fresh])
        state.draw_credit = np.concatenate([state.draw_credit, np.zeros(joins)])
        state.counts = np.concatenate([state.counts, np.zeros((joins, p.k), dtype=np.int64)])
        state.staked = np.concatenate([state.staked, np.zeros(joins, dtype=np.int64)])
        state.next_id += joins

    n = state.active_players

    # (2) contributions
    total_value = float(np.sum(state.productivity))

    # (3) draws, lottery, synthesis (minted NFTs stake immediately)
    total_credit = state.draw_credit + state.productivity
    num_draws = np.floor(total_credit / p.lam).astype(np.int64)
    new_credit = total_credit - num_draws * p.lam
    neg = new_credit < 0.0
    if neg.any():
        num_draws[neg] -= 1
        new_credit[neg] += p.lam
    over = new_credit >= p.lam
    if over.any():
        num_draws[over] += 1
        new_credit[over] -= p.lam
    state.draw_credit = new_credit
    draws_total = int(num_draws.sum())
    if draws_total:
        frag = draw_fragments(rng, draws_total, p.k)
        owner = np.repeat(np.arange(n), num_draws)
        state.counts += np.bincount(owner * p.k + frag, minlength=n * p.k).reshape(n, p.k)
    minted = state.counts.min(axis=1) if n else np.zeros(0, dtype=np.int64)
    state.counts -= minted[:, None]
    state.staked = state.staked + minted
    nfts_minted = int(minted.sum())

    # (4) payout to this iteration's staked cohort
    if nfts_minted > 0:
        reward = per_nft_reward(total_value, p.staking_share, nfts_minted)
        state.last_per_nft_reward = reward
    else:
        reward = 0.0

    # (5) churn
    departures = 0
    fragments_departed = 0
    credit_departed = 0.0
    if state.last_per_nft_reward is not None and n:
        missing = (state.counts == 0).sum(axis=1)
        remaining_cost = p.lam * p.k * _harmonic_table(p.k)[missing]
        leave = (state.staked == 0) & (
            remaining_cost > state.last_per_nft_reward * p.payoff_horizon
        )
        departures = int(leave.sum())
        if departures:
            fragments_departed = int(state.counts[leave].sum())
            credit_departed = float(np.sum(state.draw_credit[leave]))
            keep = ~leave
            state.ids = state.ids[keep]
            state.joined_at = state.joined_at[keep]
            state.productivity = state.productivity[keep]
            state.draw_credit = state.draw_credit[keep]
            state.counts = state.counts[keep]
            state.staked = state.staked[keep]

    # (6) mutation of survivors
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
            "nfts_minted": float(nfts_minted),
            "staked_total": float(state.staked.sum()),
            "per_nft_reward": reward,
            "draws": float(draws_total),
            "inventory_total": float(state.counts.sum()),
            "fragments_departed": float(fragments_departed),
            "draw_credit_total": float(np.sum(state.draw_credit)),
            "credit_departed": credit_departed,
        },
    )
    return state, record


def _harmonic_table(k: int) -> np.ndarray:
    """H_0..H_k as an array for vectorized remaining-cost lookups."""
    table = np.zeros(k + 1)
    for m in range(1, k + 1):
        table[m] = harmonic(m)
    return table
