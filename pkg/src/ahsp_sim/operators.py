"""Operators for the hidden-subgroup pipelines.

Covers the discrete Fourier transform per cyclic factor, coset-state
preparation with its closed-form Fourier image, hiding functions with the
oracle that evaluates them in superposition, and the phase-negation
operator used by the initialization-free pipeline.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .groups import FiniteAbelianGroup, GroupElement, ProductSubgroup
from .states import (
    MixedRadixRegister,
    PureState,
    apply_local_unitary,
    apply_matrix_on_axes,
)

HIDING_VALIDATION_BOUND = 2**16


def root_of_unity_powers(n: int, exponents: np.ndarray) -> np.ndarray:
    """exp(2 pi i * e / n) with the exponents reduced mod n as exact integers."""
    reduced = np.mod(np.asarray(exponents, dtype=np.int64), n)
    return np.exp(2j * np.pi * reduced / n)


@functools.lru_cache(maxsize=512)
def qft_matrix(n: int) -> np.ndarray:
    """DFT unitary: entry (l, j) = omega_n^(j*l) / sqrt(n)."""
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    idx = np.arange(n, dtype=np.int64)
    u = root_of_unity_powers(n, np.outer(idx, idx)) / math.sqrt(n)
    u.setflags(write=False)  # cached; callers must not mutate
    return u


def apply_qft_group(
    state: PureState,
    group: FiniteAbelianGroup,
    targets: Sequence[int],
    *,
    inverse: bool = False,
) -> PureState:
    """QFT over the group, one DFT factor per target axis."""
    if state.register.subdims(targets) != group.moduli:
        raise ValueError(
            f"target dims {state.register.subdims(targets)} do not match group {group}"
        )
    for axis, n in zip(targets, group.moduli):
        u = qft_matrix(n)
        if inverse:
            u = u.conj().T
        state = apply_local_unitary(state, u, [axis], checked=False)
    return state


def coset_state(r: GroupElement, subgroup: ProductSubgroup) -> PureState:
    """Uniform superposition over the coset r + H on a register of dims N_j."""
    group = subgroup.group
    if r.group != group:
        raise ValueError("representative belongs to a different group")
    register = MixedRadixRegister(group.moduli)
    amps = np.zeros(register.total, dtype=np.complex128)
    amps[_coset_flat_indices(r, subgroup)] = 1.0 / math.sqrt(subgroup.order)
    return PureState(register, amps)


def _member_coord_grids(subgroup: ProductSubgroup) -> list[np.ndarray]:
    """Per-component coordinates of all subgroup elements, as a meshgrid."""
    group = subgroup.group
    axes = [
        np.arange(n // h) * h
        for n, h in zip(group.moduli, subgroup.generators)
    ]
    return [g.reshape(-1) for g in np.meshgrid(*axes, indexing="ij")]


def _coset_flat_indices(r: GroupElement, subgroup: ProductSubgroup) -> np.ndarray:
    register = MixedRadixRegister(subgroup.group.moduli)
    idx = np.zeros(subgroup.order, dtype=np.int64)
    for c, grid, n, stride in zip(
        r.coords, _member_coord_grids(subgroup), subgroup.group.moduli, register.strides
    ):
        idx += ((grid + c) % n) * stride
    return idx


def qft_of_coset_state_reference(r: GroupElement, subgroup: ProductSubgroup) -> PureState:
    """Closed form of the Fourier image of a coset state.

    Builds sqrt(|H|/|G|) * sum over t in the orthogonal complement of
    omega_M^(r.t) |t> directly from group data; serves as the independent
    oracle for apply_qft_group(coset_state(...)).
    """
    group = subgroup.group
    register = MixedRadixRegister(group.moduli)
    amps = np.zeros(register.total, dtype=np.complex128)
    scale = math.sqrt(subgroup.order / group.order)
    m = group.lcm_modulus
    perp = subgroup.orthogonal()
    grids = _member_coord_grids(perp)
    idx = np.zeros(perp.order, dtype=np.int64)
    dots = np.zeros(perp.order, dtype=np.int64)
    for c, w, grid, stride in zip(r.coords, group.weights, grids, register.strides):
        idx += grid * stride
        dots += (w * c % m) * (grid % m) % m
    amps[idx] = scale * root_of_unity_powers(m, dots)
    return PureState(register, amps)


def all_coset_qft_pair(subgroup: ProductSubgroup) -> tuple[np.ndarray, np.ndarray]:
    """Simulated and closed-form QFT images of |r+H> for every r, batched.

    Returns two (|G|, |G|) arrays: row r is the Fourier image of the coset
    state of r, once by applying the QFT factor by factor and once from the
    closed form over the orthogonal complement.  Rows agreeing within
    tolerance is the geometric-series-collapse identity.
    """
    group = subgroup.group
    register = MixedRadixRegister(group.moduli)
    n = group.order
    m = group.lcm_modulus

    r_grids = [
        g.reshape(-1)
        for g in np.meshgrid(*(np.arange(nj) for nj in group.moduli), indexing="ij")
    ]

    # all coset states at once: (|G|, |H|) flat indices of the coset members
    member = _member_coord_grids(subgroup)
    idx = np.zeros((n, subgroup.order), dtype=np.int64)
    for rj, gj, nj, stride in zip(r_grids, member, group.moduli, register.strides):
        idx += ((rj[:, None] + gj[None, :]) % nj) * stride
    states = np.zeros((n, n), dtype=np.complex128)
    np.put_along_axis(states, idx, 1.0 / math.sqrt(subgroup.order), axis=1)

    sim = states.reshape(n, *group.moduli)
    for axis, nj in enumerate(group.moduli):
        sim = apply_matrix_on_axes(sim, qft_matrix(nj), [axis + 1])
    sim = sim.reshape(n, n)

    perp = subgroup.orthogonal()
    t_grids = _member_coord_grids(perp)
    t_idx = np.zeros(perp.order, dtype=np.int64)
    dots = np.zeros((n, perp.order), dtype=np.int64)
    for rj, tj, w, stride in zip(r_grids, t_grids, group.weights, register.strides):
        t_idx += tj * stride
        dots += (w % m) * (rj[:, None] % m) * (tj[None, :] % m) % m
    ref = np.zeros((n, n), dtype=np.complex128)
    ref[:, t_idx] = math.sqrt(subgroup.order / n) * root_of_unity_powers(m, dots)
    return sim, ref


@dataclass
class HidingFunction:
    """A table f: G -> Y that is constant exactly on cosets of the hidden subgroup.

    Y is the quotient group, decomposed as Z_{h_1} + ... + Z_{h_k}; values
    are coordinate tuples in that decomposition.  ``oracle_calls`` counts
    every oracle application, for the query-complexity checks.
    """

    group: FiniteAbelianGroup
    hidden: ProductSubgroup
    table: dict[tuple[int, ...], tuple[int, ...]]
    oracle_calls: int = field(default=0, compare=False)

    @property
    def y_dims(self) -> tuple[int, ...]:
        return self.hidden.quotient_moduli

    @property
    def y_size(self) -> int:
        return math.prod(self.y_dims)

    def __call__(self, coords: tuple[int, ...]) -> tuple[int, ...]:
        return self.table[coords]

    def y_elements(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(h) for h in self.y_dims)))

    def reset_counter(self) -> None:
        self.oracle_calls = 0

    def validate(self, *, bound: int = HIDING_VALIDATION_BOUND) -> None:
        """Exhaustive separation and surjectivity check."""
        if self.group.order > bound:
            raise ValueError(
                f"group order {self.group.order} exceeds validation bound {bound}"
            )
        by_value: dict[tuple[int, ...], set[tuple[int, ...]]] = {}
        for x in self.group.elements():
            by_value.setdefault(self.table[x.coords], set()).add(
                self.hidden.coset_label(x)
            )
        # constant on cosets and distinct across cosets <=> each value marks
        # exactly one coset and no two values share one
        labels_seen: set[tuple[int, ...]] = set()
        for value, labels in by_value.items():
            if len(labels) != 1:
                raise ValueError(f"value {value} spans {len(labels)} distinct cosets")
            labels_seen |= labels
        if len(by_value) != self.hidden.index:
            raise ValueError(
                f"function takes {len(by_value)} values, expected {self.hidden.index}"
            )
        if len(labels_seen) != self.hidden.index:
            raise ValueError("function does not separate all cosets")


def make_canonical_hiding_function(
    subgroup: ProductSubgroup, relabel_rng: np.random.Generator | None = None
) -> HidingFunction:
    """f(x) = (x_j mod h_j), optionally composed with a random bijection of Y.

    The relabeling breaks the linear structure of the canonical map so that
    downstream checks cannot accidentally rely on it.
    """
    group = subgroup.group
    table = {x.coords: subgroup.coset_label(x) for x in group.elements()}
    if relabel_rng is not None:
        values = list(itertools.product(*(range(h) for h in subgroup.quotient_moduli)))
        shuffled = [values[i] for i in relabel_rng.permutation(len(values))]
        relabel = dict(zip(values, shuffled))
        table = {x: relabel[y] for x, y in table.items()}
    f = HidingFunction(group, subgroup, table)
    if group.order <= HIDING_VALIDATION_BOUND:
        f.validate()
    return f


def oracle_on_grid(
    grid: np.ndarray,
    f: HidingFunction,
    a_axes: Sequence[int],
    b_axes: Sequence[int],
    *,
    inverse: bool = False,
) -> np.ndarray:
    """|x>_A |y>_B -> |x>_A |y + f(x)>_B on an amplitude grid.

    Spectator axes (e.g. a batch axis) pass through untouched.  A pure
    basis permutation, hence exactly unitary.
    """
    dims = grid.shape
    if tuple(dims[a] for a in a_axes) != f.group.moduli:
        raise ValueError("main-register axes do not match the group moduli")
    if tuple(dims[b] for b in b_axes) != f.y_dims:
        raise ValueError("auxiliary-register axes do not match the codomain dims")
    out = np.empty_like(grid)
    sign = -1 if inverse else 1
    for x in f.group.elements():
        sel: list[object] = [slice(None)] * grid.ndim
        for axis, c in zip(a_axes, x.coords):
            sel[axis] = c
        shifts = tuple(sign * v for v in f(x.coords))
        out[tuple(sel)] = np.roll(grid[tuple(sel)], shifts, axis=_shifted(b_axes, a_axes))
    return out


def _shifted(b_axes: Sequence[int], a_axes: Sequence[int]) -> tuple[int, ...]:
    """Axis numbers of the B targets after the A axes are indexed away."""
    result = []
    for b in b_axes:
        result.append(b - sum(1 for a in a_axes if a < b))
    return tuple(result)


def apply_oracle(
    state: PureState,
    f: HidingFunction,
    a_targets: Sequence[int],
    b_targets: Sequence[int],
    *,
    inverse: bool = False,
) -> PureState:
    f.oracle_calls += 1
    grid = oracle_on_grid(state.grid(), f, a_targets, b_targets, inverse=inverse)
    return PureState(state.register, grid.reshape(-1))


@functools.lru_cache(maxsize=4096)
def s_z_matrix(z_component: int, h: int) -> np.ndarray:
    """Single-factor operator: |y> -> omega_h^(z*y) |-y>."""
    if h < 1:
        raise ValueError(f"dimension must be positive, got {h}")
    u = np.zeros((h, h), dtype=np.complex128)
    ys = np.arange(h)
    u[(-ys) % h, ys] = root_of_unity_powers(h, z_component * ys)
    u.setflags(write=False)
    return u


def s_z_apply(
    state: PureState, z: tuple[int, ...], b_targets: Sequence[int]
) -> PureState:
    """Phase-negation operator on the auxiliary register, one factor at a time."""
    dims = state.register.subdims(b_targets)
    if len(z) != len(b_targets):
        raise ValueError("z must have one component per auxiliary factor")
    for zj, h, axis in zip(z, dims, b_targets):
        if not 0 <= zj < h:
            raise ValueError(f"z component {zj} out of range for dimension {h}")
        state = apply_local_unitary(state, s_z_matrix(zj, h), [axis], checked=False)
    return state


def s_z_on_grid(
    grid: np.ndarray, z: tuple[int, ...], b_axes: Sequence[int]
) -> np.ndarray:
    """Grid-level variant of s_z_apply, tolerating spectator axes."""
    for zj, axis in zip(z, b_axes):
        h = grid.shape[axis]
        grid = apply_matrix_on_axes(grid, s_z_matrix(zj, h), [axis])
    return grid
