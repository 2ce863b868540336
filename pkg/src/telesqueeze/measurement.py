"""Photon counting, quasi-Bell projections and fidelities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fock import MultiModeState, SingleModeState, partial_inner, tensor
from .states import SqueezeParam, coherent, overlap_opposite_squeezed, squeezed_one_photon, squeezed_vacuum

CLAMP_TOL = 1e-14
FIDELITY_NORM_TOL = 1e-8


@dataclass(frozen=True)
class OutcomeTable:
    """Joint photon-number probabilities ``P(n, m)`` plus unenumerated mass."""

    entries: dict[tuple[int, int], float] = field(default_factory=dict)
    residual: float = 0.0

    def __getitem__(self, key: tuple[int, int]) -> float:
        return self.entries.get(key, 0.0)

    def total(self) -> float:
        return sum(self.entries.values()) + self.residual


def joint_photon_distribution(state: MultiModeState, mode_a: int, mode_b: int,
                              max_n: int | None = None) -> OutcomeTable:
    """``P(n, m) = || <n|_a <m|_b psi ||^2`` for ``n, m <= max_n``.

    Summing ``|amps|^2`` over the other modes is the same quantity as the
    squared norm of each residual ket, computed in one pass.
    """
    if mode_a == mode_b:
        raise ValueError("modes must be distinct")
    for m in (mode_a, mode_b):
        if not 0 <= m < state.n_modes:
            raise IndexError(f"mode {m} out of range")
    da, db = state.mode_dims[mode_a], state.mode_dims[mode_b]
    if max_n is None:
        max_n = min(da, db) - 1
    if max_n >= min(da, db):
        raise ValueError(f"max_n={max_n} must be below the mode dimensions ({da}, {db})")

    probs = np.abs(state.amps) ** 2
    others = tuple(m for m in range(state.n_modes) if m not in (mode_a, mode_b))
    marginal = probs.sum(axis=others)
    if mode_a > mode_b:
        marginal = marginal.T
    block = marginal[: max_n + 1, : max_n + 1]
    block = np.where(block < CLAMP_TOL, np.maximum(block, 0.0), block)
    entries = {(n, m): float(block[n, m]) for n in range(max_n + 1) for m in range(max_n + 1)}
    residual = state.norm_sq() - float(block.sum())
    return OutcomeTable(entries, residual)


def project(bra: MultiModeState, state: MultiModeState,
            modes: Sequence[int]) -> tuple[float, MultiModeState]:
    """Project ``modes`` onto ``bra``.

    Returns the outcome probability and the normalized state of the remaining
    modes.  A zero-probability outcome gives an all-zero state carrying a
    warning instead of raising.
    """
    if not bra.is_normalized(1e-8):
        raise ValueError("projection bra must be normalized")
    residual = partial_inner(bra, state, modes)
    prob = residual.norm_sq()
    if prob <= CLAMP_TOL ** 2:
        return 0.0, MultiModeState(np.zeros_like(residual.amps), residual.tail,
                                   residual.warnings + ("zero-probability outcome",))
    return prob, MultiModeState(residual.amps / math.sqrt(prob), residual.tail, residual.warnings)


def condition_on_counts(state: MultiModeState, mode_a: int, mode_b: int,
                        n: int, m: int) -> tuple[float, MultiModeState]:
    """Count ``n`` photons in ``mode_a`` and ``m`` in ``mode_b``."""
    da, db = state.mode_dims[mode_a], state.mode_dims[mode_b]
    if not (0 <= n < da and 0 <= m < db):
        return 0.0, MultiModeState(np.zeros(_rest_dims(state, (mode_a, mode_b))),
                                   state.tail, state.warnings + ("outcome beyond truncation",))
    bra = np.zeros((da, db), dtype=np.complex128)
    bra[n, m] = 1.0
    return project(MultiModeState(bra), state, [mode_a, mode_b])


def _rest_dims(state: MultiModeState, modes) -> tuple[int, ...]:
    return tuple(d for i, d in enumerate(state.mode_dims) if i not in modes)


def quasi_bell_case1(xi: SqueezeParam, alpha: complex, eta: float,
                     dims: tuple[int, int]) -> MultiModeState:
    """Modes (a, b): ``(|xi, -alpha sqrt(eta)> + |xi', alpha sqrt(eta)>) / sqrt 2``."""
    da, db = dims
    beta = alpha * math.sqrt(eta)
    amps = (tensor([squeezed_vacuum(xi, da), coherent(-beta, db)]).amps
            + tensor([squeezed_one_photon(xi, da), coherent(beta, db)]).amps) / math.sqrt(2)
    return MultiModeState(amps)


def quasi_bell_case2_norm(r: float, alpha: complex, eta: float) -> float:
    """``C = [2 (1 + <xi|-xi> exp(-2 eta |alpha|^2))]^{-1/2}``."""
    return (2.0 * (1.0 + overlap_opposite_squeezed(r) * math.exp(-2 * eta * abs(alpha) ** 2))) ** -0.5


def quasi_bell_case2(xi: SqueezeParam, alpha: complex, eta: float,
                     dims: tuple[int, int]) -> MultiModeState:
    """Modes (a, b): ``C (|xi, -alpha sqrt(eta)> + |-xi, alpha sqrt(eta)>)``."""
    da, db = dims
    beta = alpha * math.sqrt(eta)
    amps = (tensor([squeezed_vacuum(xi, da), coherent(-beta, db)]).amps
            + tensor([squeezed_vacuum(xi.negated(), da), coherent(beta, db)]).amps)
    return MultiModeState(quasi_bell_case2_norm(xi.r, alpha, eta) * amps)


def fidelity_to_target(target: SingleModeState, state: MultiModeState, bob_mode: int) -> float:
    """``<target| rho_bob |target>`` with ``rho_bob`` the reduced state of ``bob_mode``.

    Evaluated as the squared norm of ``<target|_bob state``, which for a pure
    product of Bob and environment is ``|<target|bob>|^2``.
    """
    for name, s in (("target", target), ("state", state)):
        if abs(s.norm_sq() - 1.0) > FIDELITY_NORM_TOL:
            raise ValueError(f"{name} is not normalized (norm^2 = {s.norm_sq():.12g})")
    f = partial_inner(target, state, [bob_mode]).norm_sq()
    return float(min(1.0, max(0.0, f)))
