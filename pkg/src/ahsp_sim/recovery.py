"""Classical post-processing: accumulate orthogonal-subgroup samples and
reconstruct the hidden subgroup.

Within the product-subgroup class, the linear-system step of subgroup
reconstruction collapses to per-component gcd accumulation: the span of
the samples is tracked as a product subgroup, and the answer is its
orthogonal complement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .groups import (
    FiniteAbelianGroup,
    GroupElement,
    ProductSubgroup,
    subgroup_generated_by,
)

#: extra plateau length on top of log2|G| for the blind stop rule
BLIND_STREAK_MARGIN = 4

DEFAULT_BUDGET = 10_000


@dataclass(frozen=True)
class RecoveryState:
    span: ProductSubgroup
    samples_consumed: int = 0
    stable_streak: int = 0

    @classmethod
    def empty(cls, group: FiniteAbelianGroup) -> "RecoveryState":
        return cls(span=group.trivial_subgroup())


def ingest(state: RecoveryState, tau: GroupElement) -> RecoveryState:
    """Fold one sample into the span; streak counts non-growing samples."""
    group = state.span.group
    if tau.group != group:
        raise ValueError("sample belongs to a different group")
    gens = [math.gcd(h % n, math.gcd(c, n)) or n
            for h, n, c in zip(state.span.generators, group.moduli, tau.coords)]
    new_span = group.subgroup(gens)
    grew = new_span.generators != state.span.generators
    return RecoveryState(
        span=new_span,
        samples_consumed=state.samples_consumed + 1,
        stable_streak=0 if grew else state.stable_streak + 1,
    )


def blind_streak_length(group: FiniteAbelianGroup) -> int:
    return math.ceil(math.log2(max(group.order, 2))) + BLIND_STREAK_MARGIN


@dataclass
class RecoveryResult:
    estimate: ProductSubgroup
    queries_used: int
    complete: bool
    matches_planted: bool | None = None


def recover_hidden_subgroup(
    group: FiniteAbelianGroup,
    sample_source: Iterator[GroupElement] | Iterable[GroupElement],
    *,
    stop_rule: str = "blind",
    planted: ProductSubgroup | None = None,
    budget: int = DEFAULT_BUDGET,
) -> RecoveryResult:
    """Consume samples of the orthogonal subgroup until the stop rule fires.

    stop_rule "blind": span stable for ceil(log2|G|) + 4 consecutive samples.
    stop_rule "verify": requires ``planted``; stop as soon as the span equals
    the planted subgroup's orthogonal complement (keeps query counts free of
    the confirmation streak).
    """
    if stop_rule not in ("blind", "verify"):
        raise ValueError(f"unknown stop rule {stop_rule!r}")
    if stop_rule == "verify" and planted is None:
        raise ValueError("verification stop rule needs the planted subgroup")
    target = planted.orthogonal() if planted is not None else None
    streak_needed = blind_streak_length(group)

    state = RecoveryState.empty(group)
    source = iter(sample_source)
    done = False
    while state.samples_consumed < budget:
        if stop_rule == "verify" and state.span.generators == target.generators:
            done = True
            break
        if stop_rule == "blind" and state.stable_streak >= streak_needed:
            done = True
            break
        try:
            tau = next(source)
        except StopIteration:
            break
        state = ingest(state, tau)
    else:
        done = stop_rule == "blind" and state.stable_streak >= streak_needed
    if stop_rule == "verify" and state.span.generators == target.generators:
        done = True

    estimate = state.span.orthogonal()
    result = RecoveryResult(
        estimate=estimate,
        queries_used=state.samples_consumed,
        complete=done,
    )
    if planted is not None:
        result.matches_planted = estimate.generators == planted.generators
    return result


def uniform_orthogonal_sampler(
    subgroup: ProductSubgroup, rng: np.random.Generator
) -> Iterator[GroupElement]:
    """Synthetic source: uniform samples of the orthogonal complement.

    Matches the proven outcome distribution of both quantum pipelines; used
    for unit tests and large recovery sweeps where full simulation is
    unnecessary.
    """
    group = subgroup.group
    steps = [n // h for n, h in zip(group.moduli, subgroup.generators)]
    highs = list(subgroup.generators)
    while True:
        ts = [int(rng.integers(h)) for h in highs]
        yield group.element(tuple(t * s for t, s in zip(ts, steps)))


@dataclass
class QuerySummary:
    group_order: int
    trials: int
    mean_queries: float
    p50_queries: float
    p90_queries: float
    success_rate: float


def query_statistics(results: Sequence[RecoveryResult]) -> QuerySummary:
    if not results:
        raise ValueError("query_statistics needs at least one trial")
    queries = np.array([r.queries_used for r in results], dtype=float)
    successes = [r.matches_planted for r in results if r.matches_planted is not None]
    success_rate = float(np.mean(successes)) if successes else float("nan")
    return QuerySummary(
        group_order=results[0].estimate.group.order,
        trials=len(results),
        mean_queries=float(queries.mean()),
        p50_queries=float(np.percentile(queries, 50)),
        p90_queries=float(np.percentile(queries, 90)),
        success_rate=success_rate,
    )
