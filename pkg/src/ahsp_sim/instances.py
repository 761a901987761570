"""Enumeration of test instances: groups up to a given order and all of
their product subgroups.

Groups are enumerated as multisets of cyclic factors >= 2 (factor order
does not affect any probability or subgroup question, and Z_1 factors are
inert), plus the trivial group itself.
"""

from __future__ import annotations

import math
from typing import Iterator

from .groups import FiniteAbelianGroup, ProductSubgroup


def _factor_multisets(max_order: int) -> Iterator[tuple[int, ...]]:
    def rec(prefix: tuple[int, ...], product: int, min_factor: int) -> Iterator[tuple[int, ...]]:
        if prefix:
            yield prefix
        for n in range(min_factor, max_order // product + 1):
            yield from rec(prefix + (n,), product * n, n)

    yield from rec((), 1, 2)


def enumerate_groups(max_order: int) -> list[FiniteAbelianGroup]:
    """All groups with order in [1, max_order], one per factor multiset."""
    groups = [FiniteAbelianGroup((1,))]
    groups.extend(FiniteAbelianGroup(m) for m in _factor_multisets(max_order))
    return groups


def enumerate_subgroups(group: FiniteAbelianGroup) -> list[ProductSubgroup]:
    """Every product subgroup: all tuples of per-component divisors."""
    divisor_lists = [
        [d for d in range(1, n + 1) if n % d == 0] for n in group.moduli
    ]

    def rec(j: int, prefix: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        if j == len(divisor_lists):
            yield prefix
            return
        for d in divisor_lists[j]:
            yield from rec(j + 1, prefix + (d,))

    return [ProductSubgroup(group, gens) for gens in rec(0, ())]


def enumerate_instances(
    max_order: int, *, max_codomain: int | None = None
) -> Iterator[tuple[FiniteAbelianGroup, ProductSubgroup]]:
    """(group, hidden subgroup) pairs for exhaustive sweeps."""
    for group in enumerate_groups(max_order):
        for sub in enumerate_subgroups(group):
            if max_codomain is not None and sub.index > max_codomain:
                continue
            yield group, sub


def instance_count(max_order: int) -> int:
    return sum(1 for _ in enumerate_instances(max_order))
