"""Experiment orchestration: repeats, aggregation, reproducibility.

An experiment is ``repeats`` independent runs of ``iterations`` steps each.
Every repeat derives its own random stream from (master_seed, repeat_index),
so results are a pure function of the ExperimentSpec and can be computed
serially or in a process pool with bit-identical output.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Sequence, Tuple

from . import retention, serverfi
from .core import MAX_SEED, EconParams, IterationRecord, derive_stream

MODELS = ("serverfi", "retention")


@dataclass(frozen=True)
class ExperimentSpec:
    """Complete, validated description of one experiment.

    Both parameter blocks are always present; ``model`` selects which one
    drives the simulation. The headline protocol is 500 iterations repeated
    100 times.
    """

    model: str = "serverfi"
    econ: EconParams = field(default_factory=EconParams)
    serverfi: serverfi.ServerFiParams = field(default_factory=serverfi.ServerFiParams)
    retention: retention.RetentionParams = field(default_factory=retention.RetentionParams)
    iterations: int = 500
    repeats: int = 100
    master_seed: int = 0

    def with_overrides(self, **kwargs) -> "ExperimentSpec":
        """Copy with top-level fields replaced (used for CLI flag overrides)."""
        return replace(self, **kwargs)


@dataclass(frozen=True)
class AggregateSeries:
    """Per-iteration statistics across repeats: the band and the mean line.

    ``min``/``max`` bound the range across repeats and ``mean`` is the
    cross-repeat average, each indexed by iteration (position 0 holds
    iteration 1).
    """

    mean_total_value: List[float]
    min_total_value: List[float]
    max_total_value: List[float]
    mean_active_players: List[float]

    def __len__(self) -> int:
        return len(self.mean_total_value)


def validate_spec(spec: ExperimentSpec) -> None:
    """Reject an invalid spec with a field-path error message."""
    if spec.model not in MODELS:
        raise ValueError("model must be 'serverfi' or 'retention'")
    spec.econ.validate("econ")
    spec.serverfi.validate("serverfi")
    spec.retention.validate("retention")
    if spec.iterations < 1:
        raise ValueError("iterations must be at least 1")
    if spec.repeats < 1:
        raise ValueError("repeats must be at least 1")
    if not 0 <= spec.master_seed < MAX_SEED:
        raise ValueError("master_seed must be a non-negative 64-bit integer")


def run_once(spec: ExperimentSpec, repeat_index: int) -> List[IterationRecord]:
    """Run one repeat; output is a pure function of (spec, repeat_index)."""
    validate_spec(spec)
    if not 0 <= repeat_index < spec.repeats:
        raise ValueError("repeat_index must be in [0, repeats)")
    rng = derive_stream(spec.master_seed, repeat_index)
    records: List[IterationRecord] = []
    if spec.model == "serverfi":
        state = serverfi.new_state(spec.serverfi, spec.econ)
        for _ in range(spec.iterations):
            state, record = serverfi.step(state, rng)
            records.append(record)
    else:
        state = retention.new_state(spec.retention, spec.econ)
        for _ in range(spec.iterations):
            state, record = retention.step(state, rng)
            records.append(record)
    return records


def aggregate(results: Sequence[Sequence[IterationRecord]]) -> AggregateSeries:
    """Pointwise mean/min/max across repeats.

    Means use exact compensated summation, so the outcome does not depend
    on the order repeats are supplied in.
    """
    if not results:
        raise ValueError("aggregate requires at least one repeat")
    length = len(results[0])
    for r, records in enumerate(results):
        if len(records) != length:
            raise ValueError(
                f"repeat {r} has {len(records)} records, expected {length}"
            )
    n = len(results)
    mean_tv: List[float] = []
    min_tv: List[float] = []
    max_tv: List[float] = []
    mean_ap: List[float] = []
    for idx in range(length):
        totals = [records[idx].total_value for records in results]
        actives = [records[idx].active_players for records in results]
        mean_tv.append(math.fsum(totals) / n)
        min_tv.append(min(totals))
        max_tv.append(max(totals))
        mean_ap.append(math.fsum(actives) / n)
    return AggregateSeries(mean_tv, min_tv, max_tv, mean_ap)


def _run_repeat(args: Tuple[ExperimentSpec, int]) -> List[IterationRecord]:
    spec, repeat_index = args
    return run_once(spec, repeat_index)


def run_experiment(
    spec: ExperimentSpec, workers: int = 1
) -> Tuple[AggregateSeries, List[List[IterationRecord]]]:
    """Run all repeats and aggregate them.

    ``workers`` > 1 fans repeats out to a process pool; scheduling cannot
    change the result because each repeat owns an independent stream and
    aggregation is keyed by repeat index.
    """
    validate_spec(spec)
    if workers < 1:
        raise ValueError("workers must be at least 1")
    if workers == 1 or spec.repeats == 1:
        results = [run_once(spec, r) for r in range(spec.repeats)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_repeat, [(spec, r) for r in range(spec.repeats)]))
    return aggregate(results), results
