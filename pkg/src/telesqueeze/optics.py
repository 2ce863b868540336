"""Beam splitter, squeezing and photon-loss operations in the Fock basis."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import (
    ModeOperator,
    MultiModeState,
    annihilation,
    apply_operator,
    fock_state,
    matrix_exponential,
    tensor,
)
from .states import SqueezeParam

EDGE_TAIL_TOL = 1e-10


@dataclass(frozen=True)
class LossSpec:
    """Photon loss on ``mode`` with amplitude transmittance ``sqrt(eta)``."""

    eta: float
    mode: int
    env_dim: int | None = None  # defaults to the lossy mode's dimension

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"transmittance must lie in [0, 1], got {self.eta}")
        if self.env_dim is not None and self.env_dim < 2:
            raise ValueError("environment mode needs env_dim >= 2")


def _block_generator(theta: float, occupations: np.ndarray, total: int) -> np.ndarray:
    # theta (a b^dag - a^dag b) on the states (n, total - n), n = occupations
    size = len(occupations)
    g = np.zeros((size, size))
    for i in range(size - 1):
        n = occupations[i]  # states i and i+1 differ by one photon moved from b to a
        amp = theta * math.sqrt(n + 1) * math.sqrt(total - n)
        g[i, i + 1] = amp       # a b^dag takes (n+1, N-n-1) to (n, N-n)
        g[i + 1, i] = -amp      # -a^dag b takes (n, N-n) to (n+1, N-n-1)
    return g


def beam_splitter(theta: float, dim: int, dim2: int | None = None) -> ModeOperator:
    """``exp[theta (a b^dag - a^dag b)]`` with ``a`` the first mode.

    The generator conserves ``n_a + n_b``, so each total-photon block is
    exponentiated on its own.  Blocks that do not fit entirely inside the
    truncation box (``N >= min(dims)``) are the truncated generator's exact
    exponential, not the physical beam splitter; ``exact_photon_limit``
    records where that starts.

    Conjugation gives ``a^dag -> a^dag cos(theta) + b^dag sin(theta)`` and
    ``b^dag -> b^dag cos(theta) - a^dag sin(theta)``.
    """
    d1 = int(dim)
    d2 = d1 if dim2 is None else int(dim2)
    if d1 < 1 or d2 < 1:
        raise ValueError("dimensions must be positive")
    blocks = []
    for total in range(d1 + d2 - 1):
        lo, hi = max(0, total - d2 + 1), min(total, d1 - 1)
        occ = np.arange(lo, hi + 1)
        idx = occ * d2 + (total - occ)
        block = matrix_exponential(_block_generator(theta, occ, total))
        blocks.append((idx, block))
    return ModeOperator((d1, d2), blocks=tuple(blocks), unitary=True,
                        truncated=d1 + d2 - 1 > min(d1, d2), exact_photon_limit=min(d1, d2))


def squeeze_generator(xi: SqueezeParam, dim: int) -> np.ndarray:
    a = annihilation(dim)
    ad = a.conj().T
    return 0.5 * (np.conj(xi.xi) * a @ a - xi.xi * ad @ ad)


def squeeze_operator(xi: SqueezeParam, dim: int) -> ModeOperator:
    """``S(xi) = exp[(xi* a^2 - xi a^dag^2) / 2]`` on a truncated mode."""
    if dim < 2:
        raise ValueError("squeeze operator needs dim >= 2")
    u = matrix_exponential(squeeze_generator(xi, dim))
    return ModeOperator((dim,), matrix_data=u, unitary=True, truncated=True)


def edge_index(xi: SqueezeParam, dim: int) -> int:
    return max(0, dim - 2 * math.ceil(4 * xi.r))


def squeeze(state: MultiModeState, xi: SqueezeParam, mode: int) -> MultiModeState:
    """Apply ``S(xi)`` to one mode, warning when the input sits near the edge."""
    dim = state.mode_dims[mode]
    out = apply_operator(squeeze_operator(xi, dim), state, [mode])
    probs = np.abs(state.amps) ** 2
    marginal = probs.sum(axis=tuple(m for m in range(state.n_modes) if m != mode))
    edge = edge_index(xi, dim)
    mass = float(marginal[edge:].sum())
    if mass >= EDGE_TAIL_TOL:
        out = out.with_warning(
            f"squeeze on mode {mode}: input mass {mass:.2e} above index {edge} (truncation edge)")
    return out


def loss_angle(eta: float) -> float:
    return math.acos(math.sqrt(eta))


def loss_channel(state: MultiModeState, spec: LossSpec) -> MultiModeState:
    """Couple ``spec.mode`` to a fresh vacuum environment mode appended last.

    A coherent ``|alpha>`` goes to ``|alpha sqrt(eta)>|alpha sqrt(1-eta)>_E``
    with both amplitudes positive.
    """
    if not 0 <= spec.mode < state.n_modes:
        raise IndexError(f"mode {spec.mode} out of range for a {state.n_modes}-mode state")
    dim = state.mode_dims[spec.mode]
    env_dim = dim if spec.env_dim is None else spec.env_dim
    joined = tensor([state, fock_state(0, env_dim)])
    bs = beam_splitter(loss_angle(spec.eta), dim, env_dim)
    return apply_operator(bs, joined, [spec.mode, state.n_modes])
