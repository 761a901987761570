"""Dense mixed-radix state vectors and density matrices.

A register is a list of qudit dimensions; amplitudes are stored flat in
row-major order (leftmost factor most significant).  Local operators are
applied by reshaping to the dimension grid and contracting the target axes,
never by materializing the full operator.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

UNITARITY_TOL = 1e-9
ZERO_AMPLITUDE_TOL = 1e-12

DEFAULT_MAX_AMPLITUDES = 2**22
MAX_DENSITY_DIM = 2**12


class ResourceCapError(RuntimeError):
    """A requested state or matrix would exceed the configured size cap."""


def max_amplitudes() -> int:
    raw = os.environ.get("AHSP_SIM_MAX_AMPLITUDES")
    return int(raw) if raw else DEFAULT_MAX_AMPLITUDES


@dataclass(frozen=True)
class MixedRadixRegister:
    dims: tuple[int, ...]
    total: int = field(init=False, compare=False)
    strides: tuple[int, ...] = field(init=False, compare=False)

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if len(dims) == 0 or any(d < 1 for d in dims):
            raise ValueError(f"register dims must be positive, got {self.dims}")
        object.__setattr__(self, "dims", dims)
        total = 1
        strides = []
        for d in reversed(dims):
            strides.append(total)
            total *= d
        object.__setattr__(self, "total", total)
        object.__setattr__(self, "strides", tuple(reversed(strides)))

    def index(self, coords: Sequence[int]) -> int:
        if len(coords) != len(self.dims):
            raise ValueError(f"expected {len(self.dims)} coordinates, got {len(coords)}")
        for c, d in zip(coords, self.dims):
            if not 0 <= c < d:
                raise ValueError(f"coordinate {c} out of range for dimension {d}")
        return sum(c * s for c, s in zip(coords, self.strides))

    def coords(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.total:
            raise ValueError(f"index {index} out of range for register of size {self.total}")
        return tuple((index // s) % d for s, d in zip(self.strides, self.dims))

    def subdims(self, targets: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.dims[t] for t in targets)


@dataclass
class PureState:
    register: MixedRadixRegister
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != self.register.total:
            raise ValueError(
                f"amplitude vector has length {amps.size}, register needs {self.register.total}"
            )
        self.amplitudes = amps

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def check_normalized(self, tol: float = UNITARITY_TOL) -> None:
        if abs(self.norm() - 1.0) > tol:
            raise ValueError(f"state norm {self.norm()} is not 1 within {tol}")

    def copy(self) -> "PureState":
        return PureState(self.register, self.amplitudes.copy())

    def grid(self) -> np.ndarray:
        """View of the amplitudes shaped as the dimension grid."""
        return self.amplitudes.reshape(self.register.dims)


@dataclass
class DensityMatrix:
    register: MixedRadixRegister
    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=np.complex128)
        n = self.register.total
        if mat.shape != (n, n):
            raise ValueError(f"matrix shape {mat.shape} does not match register size {n}")
        self.matrix = mat

    def validate(self, tol: float = UNITARITY_TOL) -> None:
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > tol:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(self.matrix).real - 1.0) > tol:
            raise ValueError(f"density matrix trace {np.trace(self.matrix)} is not 1")
        if np.min(np.linalg.eigvalsh(self.matrix)) < -tol:
            raise ValueError("density matrix has a significantly negative eigenvalue")

    def copy(self) -> "DensityMatrix":
        return DensityMatrix(self.register, self.matrix.copy())


StateLike = Union[PureState, DensityMatrix]


def basis_state(register: MixedRadixRegister, coords: Sequence[int]) -> PureState:
    if register.total > max_amplitudes():
        raise ResourceCapError(
            f"state of {register.total} amplitudes exceeds cap {max_amplitudes()}"
        )
    amps = np.zeros(register.total, dtype=np.complex128)
    amps[register.index(coords)] = 1.0
    return PureState(register, amps)


def pure_state(register: MixedRadixRegister, amplitudes: np.ndarray) -> PureState:
    if register.total > max_amplitudes():
        raise ResourceCapError(
            f"state of {register.total} amplitudes exceeds cap {max_amplitudes()}"
        )
    state = PureState(register, np.array(amplitudes, dtype=np.complex128))
    state.check_normalized()
    return state


def density_matrix(register: MixedRadixRegister, matrix: np.ndarray) -> DensityMatrix:
    if register.total > MAX_DENSITY_DIM:
        raise ResourceCapError(
            f"density matrix of dimension {register.total} exceeds cap {MAX_DENSITY_DIM}"
        )
    dm = DensityMatrix(register, np.array(matrix, dtype=np.complex128))
    dm.validate()
    return dm


def _check_unitary(u: np.ndarray, tol: float = UNITARITY_TOL) -> None:
    d = u.shape[0]
    if u.shape != (d, d):
        raise ValueError(f"operator must be square, got shape {u.shape}")
    err = np.max(np.abs(u.conj().T @ u - np.eye(d)))
    if err > tol:
        raise ValueError(f"operator is not unitary (deviation {err:.3e})")


def apply_matrix_on_axes(
    array: np.ndarray, u: np.ndarray, axes: Sequence[int]
) -> np.ndarray:
    """Contract a d x d matrix with the given axes of an amplitude grid.

    ``d`` must equal the product of the axis lengths.  Works for any number
    of leading/trailing spectator axes, so batched arrays pass through.
    """
    axes = list(axes)
    d = int(np.prod([array.shape[a] for a in axes]))
    if u.shape != (d, d):
        raise ValueError(f"operator shape {u.shape} does not match target dims (d={d})")
    moved = np.moveaxis(array, axes, range(-len(axes), 0))
    batch_shape = moved.shape[: moved.ndim - len(axes)]
    target_shape = moved.shape[moved.ndim - len(axes):]
    flat = moved.reshape(-1, d)
    flat = flat @ u.T
    moved = flat.reshape(*batch_shape, *target_shape)
    return np.moveaxis(moved, range(-len(axes), 0), axes)


def apply_local_unitary(
    state: PureState,
    u: np.ndarray,
    targets: Sequence[int],
    *,
    checked: bool = True,
) -> PureState:
    """Apply a unitary on a subset of register factors (contiguous or not)."""
    u = np.asarray(u, dtype=np.complex128)
    if checked:
        _check_unitary(u)
    grid = apply_matrix_on_axes(state.grid(), u, targets)
    return PureState(state.register, grid.reshape(-1))


def exact_distribution(
    state: PureState, targets: Sequence[int]
) -> dict[tuple[int, ...], float]:
    """Full Born marginal over the target factors, as outcome tuple -> prob."""
    probs = np.abs(state.grid()) ** 2
    keep = list(targets)
    other = [a for a in range(len(state.register.dims)) if a not in keep]
    sub = MixedRadixRegister(state.register.subdims(targets))
    flat = np.transpose(probs, axes=[*keep, *other]).reshape(sub.total, -1).sum(axis=1)
    return {sub.coords(i): float(flat[i]) for i in range(sub.total)}


def measure_subregister(
    state: PureState, targets: Sequence[int], rng: np.random.Generator
) -> tuple[tuple[int, ...], float, PureState]:
    """Sample the target factors in the computational basis and collapse."""
    keep = list(targets)
    other = [a for a in range(len(state.register.dims)) if a not in keep]
    probs = np.abs(state.grid()) ** 2
    flat = np.transpose(probs, axes=[*keep, *other]).reshape(-1, )
    sub = MixedRadixRegister(state.register.subdims(targets))
    marg = flat.reshape(sub.total, -1).sum(axis=1)
    total = marg.sum()
    if not np.isfinite(total) or total <= 0:
        raise RuntimeError("degenerate state: total probability vanished")
    outcome_idx = int(rng.choice(sub.total, p=marg / total))
    outcome = sub.coords(outcome_idx)
    prob = float(marg[outcome_idx])

    # project: zero every amplitude whose target coordinates differ
    grid = state.grid().copy()
    sel: list[object] = [slice(None)] * grid.ndim
    for axis, c in zip(keep, outcome):
        sel[axis] = c
    projected = np.zeros_like(grid)
    projected[tuple(sel)] = grid[tuple(sel)]
    nrm = np.linalg.norm(projected)
    if nrm <= ZERO_AMPLITUDE_TOL:
        raise RuntimeError("projection onto the sampled outcome is numerically zero")
    post = PureState(state.register, (projected / nrm).reshape(-1))
    return outcome, prob, post


def marginal(state: StateLike, targets: Sequence[int]) -> DensityMatrix:
    """Partial trace onto the target factors."""
    keep = list(targets)
    dims = state.register.dims
    other = [a for a in range(len(dims)) if a not in keep]
    sub = MixedRadixRegister(state.register.subdims(targets))
    if isinstance(state, PureState):
        psi = np.transpose(state.grid(), axes=[*keep, *other]).reshape(sub.total, -1)
        rho = psi @ psi.conj().T
    else:
        n = state.register.total
        grid = state.matrix.reshape(*dims, *dims)
        perm = [*keep, *other, *(len(dims) + a for a in keep), *(len(dims) + a for a in other)]
        rest = n // sub.total
        mat = np.transpose(grid, axes=perm).reshape(sub.total, rest, sub.total, rest)
        rho = np.einsum("arbr->ab", mat)
    return DensityMatrix(sub, rho)


def _as_density(state: StateLike) -> np.ndarray:
    if isinstance(state, PureState):
        v = state.amplitudes
        return np.outer(v, v.conj())
    return state.matrix


def fidelity(a: StateLike, b: StateLike) -> float:
    """Uhlmann fidelity F(a, b), with the fast paths for pure inputs."""
    if a.register.dims != b.register.dims:
        raise ValueError("states live on different registers")
    if isinstance(a, PureState) and isinstance(b, PureState):
        return float(abs(np.vdot(a.amplitudes, b.amplitudes)))
    if isinstance(a, PureState):
        v = a.amplitudes
        return float(np.sqrt(max(np.real(np.vdot(v, b.matrix @ v)), 0.0)))
    if isinstance(b, PureState):
        return fidelity(b, a)
    # F = tr sqrt(sqrt(a) b sqrt(a)), via Hermitian eigendecompositions
    w, v = np.linalg.eigh(a.matrix)
    sqrt_a = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    inner = sqrt_a @ b.matrix @ sqrt_a
    evals = np.linalg.eigvalsh(inner)
    return float(np.sum(np.sqrt(np.clip(evals, 0.0, None))))


def trace_distance(a: StateLike, b: StateLike) -> float:
    if a.register.dims != b.register.dims:
        raise ValueError("states live on different registers")
    diff = _as_density(a) - _as_density(b)
    evals = np.linalg.eigvalsh(diff)
    return float(0.5 * np.sum(np.abs(evals)))
