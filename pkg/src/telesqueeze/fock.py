"""Truncated Fock-space linear algebra.

States are stored as complex tensors whose axes are the modes, in the order
they were listed.  Flattening uses row-major (C) order over ``(n_0, n_1, ...)``,
so ``state.vector[i]`` and ``state.amps[n_0, n_1, ...]`` address the same
amplitude.

All objects are immutable once built; every function returns a new object.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

UNITARY_TOL = 1e-10
NORMALIZED_TOL = 1e-10


def _frozen(array: np.ndarray) -> np.ndarray:
    # no defensive copy: multi-mode tensors reach hundreds of MB
    array = np.asarray(array, dtype=np.complex128)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class MultiModeState:
    """Ket over an ordered list of truncated modes.

    ``tail`` carries the probability mass known to be lost to truncation
    (from the closed-form constructors); it is bookkeeping only and never
    folded back into the amplitudes.
    """

    amps: np.ndarray
    tail: float = 0.0
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        amps = np.asarray(self.amps)
        if amps.ndim > 0 and min(amps.shape) < 1:
            raise ValueError("every mode needs a positive dimension")
        object.__setattr__(self, "amps", _frozen(amps))

    @property
    def mode_dims(self) -> tuple[int, ...]:
        return tuple(self.amps.shape)

    @property
    def n_modes(self) -> int:
        return self.amps.ndim

    @property
    def vector(self) -> np.ndarray:
        return self.amps.reshape(-1)

    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def is_normalized(self, tol: float = NORMALIZED_TOL) -> bool:
        return abs(self.norm_sq() - 1.0) <= tol

    @property
    def is_empty(self) -> bool:
        return not np.any(self.amps)

    def normalized(self) -> "MultiModeState":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize a zero state")
        return type(self)(self.amps / nrm, self.tail, self.warnings)

    def with_warning(self, message: str) -> "MultiModeState":
        return type(self)(self.amps, self.tail, self.warnings + (message,))


class SingleModeState(MultiModeState):
    """Ket of one truncated mode; ``amps[n]`` is the coefficient of ``|n>``."""

    def __post_init__(self):
        super().__post_init__()
        if self.amps.ndim != 1:
            raise ValueError(f"single-mode state needs a 1-d amplitude vector, got shape {self.amps.shape}")

    @property
    def dim(self) -> int:
        return self.amps.shape[0]


def fock_state(n: int, dim: int) -> SingleModeState:
    if not 0 <= n < dim:
        raise ValueError(f"photon number {n} outside truncation {dim}")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[n] = 1.0
    return SingleModeState(amps)


def basis_state(occupations: Sequence[int], dims: Sequence[int]) -> MultiModeState:
    amps = np.zeros(tuple(dims), dtype=np.complex128)
    amps[tuple(occupations)] = 1.0
    return MultiModeState(amps)


@dataclass(frozen=True, eq=False)
class ModeOperator:
    """Operator on one or two modes.

    Dense operators carry ``matrix`` directly.  Operators that conserve total
    photon number (beam splitters) may instead carry ``blocks``: a tuple of
    ``(flat_indices, block_matrix)`` pairs that together cover the two-mode
    space; the dense matrix is then assembled only on request.
    """

    dims: tuple[int, ...]
    matrix_data: np.ndarray | None = None
    blocks: tuple[tuple[np.ndarray, np.ndarray], ...] | None = None
    unitary: bool = False
    truncated: bool = False
    exact_photon_limit: int | None = None
    _dense: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if len(self.dims) not in (1, 2):
            raise ValueError("operators act on one or two modes")
        if (self.matrix_data is None) == (self.blocks is None):
            raise ValueError("give exactly one of matrix_data or blocks")
        side = int(np.prod(self.dims))
        if self.matrix_data is not None:
            m = _frozen(self.matrix_data)
            if m.shape != (side, side):
                raise ValueError(f"matrix shape {m.shape} does not match dims {self.dims}")
            object.__setattr__(self, "matrix_data", m)
        if self.unitary and self.block_unitarity_error() > UNITARY_TOL:
            raise ValueError("operator flagged unitary fails U^dag U = I")

    @property
    def arity(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        if len(set(self.dims)) != 1:
            raise AttributeError("operator has unequal per-mode dimensions; use .dims")
        return self.dims[0]

    @property
    def matrix(self) -> np.ndarray:
        if self.matrix_data is not None:
            return self.matrix_data
        if "m" not in self._dense:
            side = int(np.prod(self.dims))
            m = np.zeros((side, side), dtype=np.complex128)
            for idx, block in self.blocks:
                m[np.ix_(idx, idx)] = block
            m.flags.writeable = False
            self._dense["m"] = m
        return self._dense["m"]

    def block_unitarity_error(self) -> float:
        if self.blocks is None:
            return unitarity_error(self.matrix)
        return max(unitarity_error(b) for _, b in self.blocks)

    def __matmul__(self, other: "ModeOperator") -> "ModeOperator":
        if self.dims != other.dims:
            raise ValueError("operator dimensions differ")
        return ModeOperator(self.dims, matrix_data=self.matrix @ other.matrix)


def unitarity_error(matrix: np.ndarray) -> float:
    m = np.asarray(matrix)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def identity_operator(dims: Sequence[int]) -> ModeOperator:
    side = int(np.prod(dims))
    return ModeOperator(tuple(dims), matrix_data=np.eye(side), unitary=True)


def tensor(parts: Sequence[MultiModeState]) -> MultiModeState:
    """Tensor product, preserving mode order."""
    if len(parts) == 0:
        raise ValueError("tensor needs at least one part")
    amps = parts[0].amps
    for p in parts[1:]:
        amps = np.multiply.outer(amps, p.amps)
    tail = 1.0 - np.prod([1.0 - p.tail for p in parts])
    warnings = tuple(w for p in parts for w in p.warnings)
    return MultiModeState(amps, float(tail), warnings)


def _check_modes(state: MultiModeState, modes: Sequence[int]) -> list[int]:
    modes = [int(m) for m in modes]
    for m in modes:
        if not 0 <= m < state.n_modes:
            raise IndexError(f"mode {m} out of range for a {state.n_modes}-mode state")
    if len(set(modes)) != len(modes):
        raise ValueError(f"modes must be distinct, got {modes}")
    return modes


def apply_operator(op: ModeOperator, state: MultiModeState, modes: Sequence[int]) -> MultiModeState:
    """Apply ``op`` to the listed modes of ``state``; other modes untouched."""
    modes = _check_modes(state, modes)
    if len(modes) != op.arity:
        raise ValueError(f"operator acts on {op.arity} modes, {len(modes)} given")
    dims = tuple(state.mode_dims[m] for m in modes)
    if dims != op.dims:
        raise ValueError(f"operator dims {op.dims} do not match mode dims {dims}")

    moved = np.moveaxis(state.amps, modes, range(len(modes)))
    rest_shape = moved.shape[len(modes):]
    flat = moved.reshape(int(np.prod(dims)), -1)
    if op.blocks is not None:
        out = np.empty_like(flat)
        for idx, block in op.blocks:
            out[idx] = block @ flat[idx]
    else:
        out = op.matrix @ flat
    out = np.moveaxis(out.reshape(dims + rest_shape), range(len(modes)), modes)
    return MultiModeState(out, state.tail, state.warnings)


def inner_product(bra: MultiModeState, ket: MultiModeState) -> complex:
    """``<bra|ket>``, conjugate-linear in ``bra``."""
    if bra.mode_dims != ket.mode_dims:
        raise ValueError(f"shape mismatch: {bra.mode_dims} vs {ket.mode_dims}")
    return complex(np.vdot(bra.amps, ket.amps))


def partial_inner(bra: MultiModeState, ket: MultiModeState, modes: Sequence[int]) -> MultiModeState:
    """Contract ``bra`` against the listed modes of ``ket``.

    Returns the unnormalized state of the remaining modes (in their original
    order).  Contracting every mode gives a 0-mode state holding the scalar.
    """
    modes = _check_modes(ket, modes)
    if len(modes) == 0:
        raise ValueError("partial_inner needs at least one mode")
    if bra.n_modes != len(modes):
        raise ValueError(f"bra has {bra.n_modes} modes, {len(modes)} named")
    dims = tuple(ket.mode_dims[m] for m in modes)
    if bra.mode_dims != dims:
        raise ValueError(f"bra dims {bra.mode_dims} do not match ket modes {dims}")
    out = np.tensordot(bra.amps.conj(), ket.amps, axes=(list(range(len(modes))), modes))
    return MultiModeState(out, ket.tail, ket.warnings)


def reduced_density(state: MultiModeState, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix of the ``keep`` modes, flattened row-major."""
    keep = _check_modes(state, keep)
    traced = [m for m in range(state.n_modes) if m not in keep]
    moved = np.moveaxis(state.amps, keep + traced, range(state.n_modes))
    side = int(np.prod([state.mode_dims[m] for m in keep]))
    flat = moved.reshape(side, -1)
    return flat @ flat.conj().T


def is_anti_hermitian(matrix: np.ndarray, tol: float = 1e-12) -> bool:
    m = np.asarray(matrix)
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    return bool(np.max(np.abs(m + m.conj().T), initial=0.0) <= tol * scale)


def matrix_exponential(generator: np.ndarray) -> np.ndarray:
    """``exp(G)`` for a square complex matrix.

    Anti-Hermitian generators go through the spectral decomposition of the
    Hermitian matrix ``iG``, which returns a unitary to rounding error.  Any
    other matrix falls back to scaling-and-squaring (``scipy.linalg.expm``).
    """
    g = np.asarray(generator, dtype=np.complex128)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise ValueError("generator has non-finite entries")
    if g.shape[0] == 0:
        return g.copy()
    if is_anti_hermitian(g):
        h = 1j * g
        h = 0.5 * (h + h.conj().T)
        evals, evecs = np.linalg.eigh(h)
        return (evecs * np.exp(-1j * evals)) @ evecs.conj().T
    return scipy.linalg.expm(g)


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(np.complex128)


def number_expectation(state: MultiModeState, mode: int) -> float:
    _check_modes(state, [mode])
    probs = np.abs(state.amps) ** 2
    axes = tuple(m for m in range(state.n_modes) if m != mode)
    marginal = probs.sum(axis=axes)
    return float(np.arange(marginal.shape[0]) @ marginal)
