"""End-to-end pipelines: the standard hidden-subgroup run and the
initialization-free variant, plus the z-averaged channel acting on density
matrices.

The composite register is always (A_1..A_k, B_1..B_k): main factors of
dimension N_j first, auxiliary factors of dimension h_j after them.
Closed-form reference constructions live alongside the simulated paths so
every simulated quantity has an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .groups import GroupElement, is_orthogonal
from .operators import (
    HidingFunction,
    apply_oracle,
    apply_qft_group,
    oracle_on_grid,
    qft_matrix,
    root_of_unity_powers,
    s_z_apply,
    s_z_on_grid,
)
from .rng import random_density, random_pure_amplitudes
from .states import (
    DensityMatrix,
    MixedRadixRegister,
    PureState,
    ResourceCapError,
    apply_matrix_on_axes,
    basis_state,
    exact_distribution,
    fidelity,
    marginal,
    max_amplitudes,
    measure_subregister,
)


def ab_register(f: HidingFunction) -> MixedRadixRegister:
    return MixedRadixRegister(f.group.moduli + f.y_dims)


def a_axes(f: HidingFunction) -> list[int]:
    return list(range(f.group.rank))


def b_axes(f: HidingFunction) -> list[int]:
    return list(range(f.group.rank, 2 * f.group.rank))


def y_register(f: HidingFunction) -> MixedRadixRegister:
    return MixedRadixRegister(f.y_dims)


@dataclass
class ShotRecord:
    outcome: GroupElement
    z_used: tuple[int, ...] | None
    probability_of_outcome: float
    aux_restoration_fidelity: float
    shot_index: int
    rng_seed: str
    oracle_calls: int
    post_aux_state: PureState | None = None

    def __post_init__(self) -> None:
        assert -1e-12 <= self.probability_of_outcome <= 1 + 1e-12
        assert -1e-12 <= self.aux_restoration_fidelity <= 1 + 1e-9


# ---------------------------------------------------------------------------
# standard pipeline
# ---------------------------------------------------------------------------

def standard_run_state(f: HidingFunction) -> PureState:
    """State after QFT_A, oracle, QFT_A on the all-zero initial state."""
    reg = ab_register(f)
    if reg.total > max_amplitudes():
        raise ResourceCapError(
            f"composite register of {reg.total} amplitudes exceeds cap"
        )
    state = basis_state(reg, (0,) * len(reg.dims))
    state = apply_qft_group(state, f.group, a_axes(f))
    state = apply_oracle(state, f, a_axes(f), b_axes(f))
    state = apply_qft_group(state, f.group, a_axes(f))
    return state


def psi3_reference(f: HidingFunction) -> PureState:
    """Closed form of the final standard-pipeline state.

    (|H|/|G|) * sum over coset representatives r and orthogonal elements t
    of omega_M^(r.t) |t>_A |f(r)>_B, built directly from group data.
    """
    group = f.group
    h = f.hidden
    reg = ab_register(f)
    amps = np.zeros(reg.total, dtype=np.complex128)
    scale = h.order / group.order
    m = group.lcm_modulus
    perp = list(h.orthogonal().elements())
    for r in h.coset_representatives():
        value = f(r.coords)
        for t in perp:
            phase = np.exp(2j * np.pi * (r.dot(t) % m) / m)
            amps[reg.index(t.coords + value)] += scale * phase
    return PureState(reg, amps)


def standard_exact_distribution(f: HidingFunction) -> dict[tuple[int, ...], float]:
    return exact_distribution(standard_run_state(f), a_axes(f))


def standard_post_measurement_aux(f: HidingFunction, tau: GroupElement) -> PureState:
    """Auxiliary-register state left behind by measuring outcome tau.

    Normalized sum over coset representatives of omega_M^(r.tau) |f(r)>;
    this is the state whose reset the initialization-free pipeline avoids.
    """
    if not is_orthogonal(tau, f.hidden):
        raise ValueError(f"outcome {tau} is not orthogonal to the hidden subgroup")
    reg = y_register(f)
    amps = np.zeros(reg.total, dtype=np.complex128)
    m = f.group.lcm_modulus
    for r in f.hidden.coset_representatives():
        amps[reg.index(f(r.coords))] += np.exp(2j * np.pi * (r.dot(tau) % m) / m)
    amps /= np.linalg.norm(amps)
    return PureState(reg, amps)


def standard_sample(
    f: HidingFunction, rng: np.random.Generator, shot_index: int = 0, rng_seed: str = ""
) -> ShotRecord:
    calls_before = f.oracle_calls
    state = standard_run_state(f)
    outcome, prob, post = measure_subregister(state, a_axes(f), rng)
    post_b = _extract_b_state(post, f, outcome)
    zero_b = basis_state(y_register(f), (0,) * f.group.rank)
    return ShotRecord(
        outcome=f.group.element(outcome),
        z_used=None,
        probability_of_outcome=prob,
        aux_restoration_fidelity=fidelity(post_b, zero_b),
        shot_index=shot_index,
        rng_seed=rng_seed,
        oracle_calls=f.oracle_calls - calls_before,
        post_aux_state=post_b,
    )


def _extract_b_state(post: PureState, f: HidingFunction, outcome: Sequence[int]) -> PureState:
    """B factor of a post-measurement state (support is at A = outcome)."""
    sel = tuple(outcome) + (slice(None),) * f.group.rank
    vec = post.grid()[sel].reshape(-1)
    return PureState(y_register(f), vec / np.linalg.norm(vec))


# ---------------------------------------------------------------------------
# initialization-free pipeline
# ---------------------------------------------------------------------------

def ifqa_run_state(f: HidingFunction, phi: PureState, z: tuple[int, ...]) -> PureState:
    """Final state of the initialization-free run for one fixed z.

    Sequence: QFT_A, oracle, S_z on B, oracle, S_z on B, QFT_A, starting
    from |0>_A tensor phi_B.
    """
    if phi.register.dims != f.y_dims:
        raise ValueError("auxiliary state dims do not match the codomain")
    _check_z(f, z)
    reg = ab_register(f)
    if reg.total > max_amplitudes():
        raise ResourceCapError(
            f"composite register of {reg.total} amplitudes exceeds cap"
        )
    amps = np.zeros(reg.total, dtype=np.complex128)
    amps[: phi.register.total] = phi.amplitudes  # A = 0 block
    state = PureState(reg, amps)
    state = apply_qft_group(state, f.group, a_axes(f))
    state = apply_oracle(state, f, a_axes(f), b_axes(f))
    state = s_z_apply(state, z, b_axes(f))
    state = apply_oracle(state, f, a_axes(f), b_axes(f))
    state = s_z_apply(state, z, b_axes(f))
    state = apply_qft_group(state, f.group, a_axes(f))
    return state


def _check_z(f: HidingFunction, z: tuple[int, ...]) -> None:
    if len(z) != f.group.rank or any(
        not 0 <= zj < h for zj, h in zip(z, f.y_dims)
    ):
        raise ValueError(f"z {z} is not an element of the codomain {f.y_dims}")


def ifqa_exact_distribution_for_z(
    f: HidingFunction, phi: PureState, z: tuple[int, ...]
) -> dict[tuple[int, ...], float]:
    return exact_distribution(ifqa_run_state(f, phi, z), a_axes(f))


def pr_z_reference(f: HidingFunction, z: tuple[int, ...]) -> dict[tuple[int, ...], float]:
    """Closed-form outcome distribution for fixed z, via the double sum over
    coset representatives; independent of the state-vector simulation."""
    _check_z(f, z)
    group = f.group
    h = f.hidden
    m = group.lcm_modulus
    scale = (h.order / group.order) ** 2
    reps = h.coset_representatives()
    out: dict[tuple[int, ...], float] = {}
    for t in h.orthogonal().elements():
        acc = 0j
        for r in reps:
            value = f(r.coords)
            phase = 1.0 + 0j
            for zj, vj, hj in zip(z, value, f.y_dims):
                phase *= np.exp(2j * np.pi * ((zj * vj) % hj) / hj)
            acc += phase * np.exp(2j * np.pi * (r.dot(t) % m) / m)
        out[t.coords] = float(scale * abs(acc) ** 2)
    return out


def ifqa_batched_states(f: HidingFunction, phi_amplitudes: np.ndarray) -> np.ndarray:
    """Run the initialization-free pipeline for every z at once.

    Returns an array of shape (|Y|, N_1, ..., N_k, h_1, ..., h_k): final
    states indexed by z in the order of ``f.y_elements()``.  Oracle-call
    accounting is per z value.
    """
    zs = f.y_elements()
    nz = len(zs)
    moduli = f.group.moduli
    ydims = f.y_dims
    if nz * math.prod(moduli) * math.prod(ydims) > max_amplitudes() * 4:
        raise ResourceCapError("batched z sweep exceeds the amplitude budget")
    a = [ax + 1 for ax in a_axes(f)]
    b = [ax + 1 for ax in b_axes(f)]
    arr = np.zeros((nz, *moduli, *ydims), dtype=np.complex128)
    zero_a = (slice(None),) + (0,) * len(moduli)
    arr[zero_a] = np.asarray(phi_amplitudes, dtype=np.complex128).reshape(ydims)

    qfts = [qft_matrix(n) for n in moduli]

    def qft_a(x: np.ndarray) -> np.ndarray:
        for axis, u in zip(a, qfts):
            x = apply_matrix_on_axes(x, u, [axis])
        return x

    # per-z phase tensor for the batched S_z: phase[z, y] = prod omega_hj^(zj yj)
    phase = np.ones((nz, *ydims), dtype=np.complex128)
    for j, hj in enumerate(ydims):
        zj = np.array([zt[j] for zt in zs])
        yj = np.arange(hj)
        factor = root_of_unity_powers(hj, np.outer(zj, yj))  # (nz, hj)
        shape = [nz] + [1] * len(ydims)
        shape[1 + j] = hj
        phase *= factor.reshape(shape)
    phase_full = phase.reshape(nz, *(1,) * len(moduli), *ydims)

    def s_z_batched(x: np.ndarray) -> np.ndarray:
        x = x * phase_full
        for axis, hj in zip(b, ydims):
            x = np.take(x, (-np.arange(hj)) % hj, axis=axis)
        return x

    arr = qft_a(arr)
    arr = oracle_on_grid(arr, f, a, b)
    arr = s_z_batched(arr)
    arr = oracle_on_grid(arr, f, a, b)
    arr = s_z_batched(arr)
    arr = qft_a(arr)
    f.oracle_calls += 2 * nz  # one oracle pair per z value
    return arr


def batched_a_distributions(f: HidingFunction, states: np.ndarray) -> np.ndarray:
    """|Y| x |G| array of outcome probabilities from batched final states."""
    k = f.group.rank
    probs = np.abs(states) ** 2
    return probs.sum(axis=tuple(range(1 + k, 1 + 2 * k))).reshape(states.shape[0], -1)


def batched_b_marginals(f: HidingFunction, states: np.ndarray) -> np.ndarray:
    """|Y| stacked auxiliary-register density matrices from batched states."""
    nz = states.shape[0]
    ysize = f.y_size
    psi = states.reshape(nz, -1, ysize)
    return np.einsum("zat,zau->ztu", psi, psi.conj())


def ifqa_expected_distribution(
    f: HidingFunction, aux: PureState | DensityMatrix
) -> dict[tuple[int, ...], float]:
    """Outcome distribution averaged uniformly over z (and the aux ensemble)."""
    if isinstance(aux, PureState):
        components: list[tuple[float, np.ndarray]] = [(1.0, aux.amplitudes)]
    else:
        evals, evecs = np.linalg.eigh(aux.matrix)
        components = [
            (float(w), evecs[:, i]) for i, w in enumerate(evals) if w > 1e-14
        ]
    ga = f.group
    total = np.zeros(ga.order)
    for weight, amps in components:
        states = ifqa_batched_states(f, amps / np.linalg.norm(amps))
        total += weight * batched_a_distributions(f, states).mean(axis=0)
    reg = MixedRadixRegister(ga.moduli)
    return {reg.coords(i): float(total[i]) for i in range(ga.order)}


def ifqa_sample(
    f: HidingFunction,
    aux: "ResolvedAux",
    rng: np.random.Generator,
    shot_index: int = 0,
    rng_seed: str = "",
) -> ShotRecord:
    calls_before = f.oracle_calls
    weight_idx = int(rng.choice(len(aux.ensemble), p=[p for p, _ in aux.ensemble]))
    phi = PureState(y_register(f), aux.ensemble[weight_idx][1])
    zs = f.y_elements()
    z = zs[int(rng.integers(len(zs)))]
    state = ifqa_run_state(f, phi, z)
    outcome, prob, post = measure_subregister(state, a_axes(f), rng)
    post_b = _extract_b_state(post, f, outcome)
    return ShotRecord(
        outcome=f.group.element(outcome),
        z_used=z,
        probability_of_outcome=prob,
        aux_restoration_fidelity=fidelity(post_b, phi),
        shot_index=shot_index,
        rng_seed=rng_seed,
        oracle_calls=f.oracle_calls - calls_before,
        post_aux_state=post_b,
    )


# ---------------------------------------------------------------------------
# auxiliary-state specification
# ---------------------------------------------------------------------------

AUX_KINDS = ("zero", "given-pure", "random-pure", "given-mixed", "random-mixed")


@dataclass
class AuxSpec:
    """How to prepare the auxiliary register; resolve() fixes any randomness."""

    kind: str
    payload: object = None

    def __post_init__(self) -> None:
        if self.kind not in AUX_KINDS:
            raise ValueError(f"unknown aux kind {self.kind!r}; expected one of {AUX_KINDS}")

    def resolve(
        self, y_dims: tuple[int, ...], rng: np.random.Generator
    ) -> "ResolvedAux":
        dim = math.prod(y_dims)
        if self.kind == "zero":
            amps = np.zeros(dim, dtype=np.complex128)
            amps[0] = 1.0
            return ResolvedAux(y_dims, [(1.0, amps)])
        if self.kind == "given-pure":
            amps = np.asarray(self.payload, dtype=np.complex128).reshape(-1)
            if amps.size != dim:
                raise ValueError("given-pure payload has the wrong dimension")
            return ResolvedAux(y_dims, [(1.0, amps / np.linalg.norm(amps))])
        if self.kind == "random-pure":
            return ResolvedAux(y_dims, [(1.0, random_pure_amplitudes(dim, rng))])
        if self.kind == "given-mixed":
            ensemble = [
                (float(p), np.asarray(v, dtype=np.complex128).reshape(-1))
                for p, v in self.payload
            ]
            return ResolvedAux(y_dims, _normalize_ensemble(ensemble))
        # random-mixed: Ginibre density, decomposed into its eigenensemble
        rho = random_density(dim, rng)
        evals, evecs = np.linalg.eigh(rho)
        ensemble = [
            (float(w), evecs[:, i]) for i, w in enumerate(evals) if w > 1e-14
        ]
        return ResolvedAux(y_dims, _normalize_ensemble(ensemble))


def _normalize_ensemble(
    ensemble: list[tuple[float, np.ndarray]]
) -> list[tuple[float, np.ndarray]]:
    total = sum(p for p, _ in ensemble)
    if total <= 0:
        raise ValueError("ensemble weights must sum to a positive value")
    return [(p / total, v / np.linalg.norm(v)) for p, v in ensemble]


@dataclass
class ResolvedAux:
    y_dims: tuple[int, ...]
    ensemble: list[tuple[float, np.ndarray]]

    def density(self) -> DensityMatrix:
        dim = math.prod(self.y_dims)
        rho = np.zeros((dim, dim), dtype=np.complex128)
        for p, v in self.ensemble:
            rho += p * np.outer(v, v.conj())
        return DensityMatrix(MixedRadixRegister(self.y_dims), rho)

    def is_pure(self) -> bool:
        return len(self.ensemble) == 1


# ---------------------------------------------------------------------------
# the z-averaged channel on density matrices
# ---------------------------------------------------------------------------

def lambda_z_grid(arr: np.ndarray, f: HidingFunction, z: tuple[int, ...]) -> np.ndarray:
    """One Kraus-style unitary of the channel, acting on a (batched) grid.

    The leading axes of ``arr`` beyond the register grid are spectators.
    """
    offset = arr.ndim - 2 * f.group.rank
    a = [ax + offset for ax in a_axes(f)]
    b = [ax + offset for ax in b_axes(f)]
    for axis, n in zip(a, f.group.moduli):
        arr = apply_matrix_on_axes(arr, qft_matrix(n), [axis])
    arr = oracle_on_grid(arr, f, a, b)
    arr = s_z_on_grid(arr, z, b)
    arr = oracle_on_grid(arr, f, a, b)
    arr = s_z_on_grid(arr, z, b)
    for axis, n in zip(a, f.group.moduli):
        arr = apply_matrix_on_axes(arr, qft_matrix(n), [axis])
    return arr


def lambda_channel(rho_b: DensityMatrix, f: HidingFunction) -> DensityMatrix:
    """Literal channel: average of unitary conjugations over all z, applied
    to |0><0|_A tensor rho_B."""
    if rho_b.register.dims != f.y_dims:
        raise ValueError("density matrix dims do not match the codomain")
    reg = ab_register(f)
    n = reg.total
    if n > 2**12:
        raise ResourceCapError(f"channel output dimension {n} exceeds the cap")
    ysize = f.y_size
    rho_ab = np.zeros((n, n), dtype=np.complex128)
    rho_ab[:ysize, :ysize] = rho_b.matrix  # A = 0 block is the first |Y| indices
    out = np.zeros_like(rho_ab)
    zs = f.y_elements()
    dims = reg.dims

    def conjugate(mat: np.ndarray, z: tuple[int, ...]) -> np.ndarray:
        # U M U^dagger via two batched column applications: (U (U M)^H)^H
        def apply_cols(m: np.ndarray) -> np.ndarray:
            batched = m.T.reshape(n, *dims)
            return lambda_z_grid(batched, f, z).reshape(n, n).T

        return apply_cols(apply_cols(mat).conj().T).conj().T

    for z in zs:
        out += conjugate(rho_ab, z)
    return DensityMatrix(reg, out / len(zs))


def channel_a_distribution(dm: DensityMatrix, f: HidingFunction) -> dict[tuple[int, ...], float]:
    """Measurement distribution on the main register of a channel output."""
    diag = np.real(np.diag(dm.matrix)).reshape(f.group.moduli + f.y_dims)
    k = f.group.rank
    probs = diag.sum(axis=tuple(range(k, 2 * k))).reshape(-1)
    reg = MixedRadixRegister(f.group.moduli)
    return {reg.coords(i): float(probs[i]) for i in range(reg.total)}


def channel_b_marginal_after_outcome(
    dm: DensityMatrix, f: HidingFunction, tau: GroupElement
) -> DensityMatrix:
    """Auxiliary-register state conditional on measuring tau on the main register."""
    reg = dm.register
    k = f.group.rank
    grid = dm.matrix.reshape(*reg.dims, *reg.dims)
    sel = tau.coords + (slice(None),) * k + tau.coords + (slice(None),) * k
    block = grid[sel].reshape(f.y_size, f.y_size)
    tr = np.trace(block).real
    if tr <= 1e-15:
        raise ValueError(f"outcome {tau} has vanishing probability")
    return DensityMatrix(MixedRadixRegister(f.y_dims), block / tr)
