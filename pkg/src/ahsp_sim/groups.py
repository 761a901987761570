"""Exact integer arithmetic for finite abelian groups in decomposed form.

A group is given as a direct sum of cyclic factors Z_{N_1} + ... + Z_{N_k}.
Subgroups are restricted to the "product" class: per-component cyclic
subgroups generated by a divisor of each modulus.  Within that class the
orthogonal complement under the weighted inner product has a closed form,
and everything here is plain integer arithmetic (Python ints, so no
overflow concerns).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

#: Largest group order brute_force_orthogonal will scan.
ENUMERATION_BOUND = 2**20


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Direct sum of cyclic groups, with the data the inner product needs.

    ``lcm_modulus`` is the lcm M of the moduli and ``weights[j] = M // N_j``
    are the coefficients of the bilinear form
    ``x . y = sum_j weights[j] * x_j * y_j  (mod M)``.
    """

    moduli: tuple[int, ...]
    lcm_modulus: int = field(init=False, compare=False)
    weights: tuple[int, ...] = field(init=False, compare=False)
    order: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.moduli) == 0:
            raise ValueError("group needs at least one cyclic factor")
        if any(n < 1 for n in self.moduli):
            raise ValueError(f"moduli must be positive, got {self.moduli}")
        object.__setattr__(self, "moduli", tuple(int(n) for n in self.moduli))
        m = math.lcm(*self.moduli)
        object.__setattr__(self, "lcm_modulus", m)
        object.__setattr__(self, "weights", tuple(m // n for n in self.moduli))
        object.__setattr__(self, "order", math.prod(self.moduli))

    @property
    def rank(self) -> int:
        return len(self.moduli)

    def element(self, coords: Iterable[int]) -> "GroupElement":
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(coords)}")
        return GroupElement(self, tuple(c % n for c, n in zip(coords, self.moduli)))

    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.rank)

    def elements(self) -> Iterator["GroupElement"]:
        """All elements, in lexicographic coordinate order."""
        for coords in itertools.product(*(range(n) for n in self.moduli)):
            yield GroupElement(self, coords)

    def subgroup(self, generators: Iterable[int]) -> "ProductSubgroup":
        """Product subgroup from raw per-component generators (normalized)."""
        gens = tuple(generators)
        if len(gens) != self.rank:
            raise ValueError(f"expected {self.rank} generators, got {len(gens)}")
        return ProductSubgroup(
            self, tuple(normalize_generator(g, n) for g, n in zip(gens, self.moduli))
        )

    def trivial_subgroup(self) -> "ProductSubgroup":
        return ProductSubgroup(self, self.moduli)

    def full_subgroup(self) -> "ProductSubgroup":
        return ProductSubgroup(self, (1,) * self.rank)

    def __str__(self) -> str:
        return "Z" + "xZ".join(str(n) for n in self.moduli)


@dataclass(frozen=True)
class GroupElement:
    group: FiniteAbelianGroup
    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        assert len(self.coords) == self.group.rank
        assert all(0 <= c < n for c, n in zip(self.coords, self.group.moduli))

    def _check_same_group(self, other: "GroupElement") -> None:
        if self.group != other.group:
            raise ValueError(f"elements of different groups: {self.group} vs {other.group}")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check_same_group(other)
        return GroupElement(
            self.group,
            tuple((a + b) % n for a, b, n in zip(self.coords, other.coords, self.group.moduli)),
        )

    def __neg__(self) -> "GroupElement":
        return GroupElement(
            self.group, tuple((-a) % n for a, n in zip(self.coords, self.group.moduli))
        )

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def dot(self, other: "GroupElement") -> int:
        """Weighted inner product, reduced into [0, M)."""
        self._check_same_group(other)
        m = self.group.lcm_modulus
        return sum(
            w * a * b for w, a, b in zip(self.group.weights, self.coords, other.coords)
        ) % m

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.coords) + ")"


def inner_product(x: GroupElement, y: GroupElement) -> int:
    return x.dot(y)


def normalize_generator(raw: int, modulus: int) -> int:
    """Canonical generator of <raw> inside Z_modulus.

    Returns a divisor of ``modulus`` in [1, modulus]; the trivial subgroup
    {0} is encoded as the generator ``modulus`` itself so that subgroup
    orders N/h stay division-safe.
    """
    if modulus < 1:
        raise ValueError(f"modulus must be positive, got {modulus}")
    if raw < 0:
        raise ValueError(f"generator must be nonnegative, got {raw}")
    g = math.gcd(raw % modulus, modulus)
    return g if g != 0 else modulus


@dataclass(frozen=True)
class ProductSubgroup:
    """Subgroup of the form <h_1> + ... + <h_k>, h_j a divisor of N_j."""

    group: FiniteAbelianGroup
    generators: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.generators) != self.group.rank:
            raise ValueError("one generator per cyclic factor required")
        for h, n in zip(self.generators, self.group.moduli):
            if not (1 <= h <= n and n % h == 0):
                raise ValueError(
                    f"generator {h} is not a normalized divisor of modulus {n}"
                )

    @property
    def order(self) -> int:
        return math.prod(n // h for n, h in zip(self.group.moduli, self.generators))

    @property
    def index(self) -> int:
        """|G| / |H|, which is also the codomain size of a hiding function."""
        return math.prod(self.generators)

    @property
    def quotient_moduli(self) -> tuple[int, ...]:
        """Cyclic decomposition of G/H: the tuple (h_1, ..., h_k)."""
        return self.generators

    def orthogonal(self) -> "ProductSubgroup":
        """Closed-form orthogonal complement: component generators N_j / h_j."""
        return ProductSubgroup(
            self.group, tuple(n // h for n, h in zip(self.group.moduli, self.generators))
        )

    def contains(self, x: GroupElement) -> bool:
        if x.group != self.group:
            raise ValueError("element belongs to a different group")
        # coordinates sit in [0, N_j), so c % h_j == 0 also covers h_j == N_j
        return all(c % h == 0 for c, h in zip(x.coords, self.generators))

    def elements(self) -> Iterator[GroupElement]:
        """All |H| elements: coordinates q_j * h_j, q_j in [0, N_j/h_j)."""
        ranges = [range(n // h) for n, h in zip(self.group.moduli, self.generators)]
        for qs in itertools.product(*ranges):
            yield GroupElement(
                self.group, tuple(q * h for q, h in zip(qs, self.generators))
            )

    def coset_representatives(self) -> list[GroupElement]:
        """Lexicographically smallest element of each coset; |G|/|H| of them."""
        ranges = [range(h) for h in self.generators]
        return [GroupElement(self.group, coords) for coords in itertools.product(*ranges)]

    def coset_label(self, x: GroupElement) -> tuple[int, ...]:
        """Canonical representative of x's coset: coordinates mod h_j."""
        if x.group != self.group:
            raise ValueError("element belongs to a different group")
        return tuple(c % h for c, h in zip(x.coords, self.generators))

    def __str__(self) -> str:
        return "<" + ",".join(str(h) for h in self.generators) + ">"


def is_orthogonal(x: GroupElement, subgroup: ProductSubgroup, *, exhaustive: bool = False) -> bool:
    """Whether x . y = 0 for every y in the subgroup.

    The generator check suffices by bilinearity; ``exhaustive=True`` scans
    every subgroup element instead, as a cross-check.
    """
    if x.group != subgroup.group:
        raise ValueError("element belongs to a different group")
    if exhaustive:
        return all(x.dot(y) == 0 for y in subgroup.elements())
    group = subgroup.group
    m = group.lcm_modulus
    for j, h in enumerate(subgroup.generators):
        if h == group.moduli[j]:
            continue  # trivial component, generates only 0
        if (group.weights[j] * x.coords[j] * h) % m != 0:
            return False
    return True


def brute_force_orthogonal(
    subgroup: ProductSubgroup, *, bound: int = ENUMERATION_BOUND
) -> set[GroupElement]:
    """Orthogonal complement by exhaustive scan over the whole group.

    Independent of the closed-form ``ProductSubgroup.orthogonal``; used as
    the oracle that validates it.
    """
    group = subgroup.group
    if group.order > bound:
        raise ValueError(f"group order {group.order} exceeds enumeration bound {bound}")
    coords = np.stack(
        np.meshgrid(*(np.arange(n) for n in group.moduli), indexing="ij"), axis=-1
    ).reshape(-1, group.rank)
    weights = np.array(group.weights, dtype=np.int64)
    m = group.lcm_modulus
    # x is orthogonal to H iff it is orthogonal to each component generator
    gens = np.array(
        [h % n for h, n in zip(subgroup.generators, group.moduli)], dtype=np.int64
    )
    ok = np.all((coords * weights * gens) % m == 0, axis=1)
    return {GroupElement(group, tuple(int(c) for c in row)) for row in coords[ok]}


def subgroup_generated_by(
    group: FiniteAbelianGroup, samples: Iterable[GroupElement]
) -> ProductSubgroup:
    """Smallest product subgroup containing all samples (per-component gcd)."""
    gcds = [0] * group.rank
    for x in samples:
        if x.group != group:
            raise ValueError("sample belongs to a different group")
        for j, c in enumerate(x.coords):
            gcds[j] = math.gcd(gcds[j], c)
    return group.subgroup(gcds)
