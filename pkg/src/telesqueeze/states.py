"""Constructors for the kets used by the teleportation protocols.

Squeezed states follow ``|xi> = S(xi)|0>`` and ``|xi'> = S(xi)|1>`` with
``S(xi) = exp[(xi* a^2 - xi a^dag^2) / 2]`` and ``xi = r e^{i phi}``.  Their
Fock coefficients are generated by ratio recursion (no factorials), so high
truncations do not overflow.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .fock import MultiModeState, SingleModeState, tensor

DEFAULT_MAX_DIM = 512
MAX_DIM_ENV = "TELESQUEEZE_MAX_DIM"


class TruncationError(ValueError):
    """Requested tail tolerance cannot be met below the dimension cap."""

    def __init__(self, message: str, *, achievable_tail: float, max_dim: int, tail_tol: float):
        super().__init__(message)
        self.achievable_tail = achievable_tail
        self.max_dim = max_dim
        self.tail_tol = tail_tol


@dataclass(frozen=True)
class SqueezeParam:
    r: float
    phi: float = 0.0

    def __post_init__(self):
        if not self.r >= 0:
            raise ValueError(f"squeeze magnitude must be >= 0, got {self.r}")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "phi", float(self.phi) % (2 * math.pi))

    @property
    def xi(self) -> complex:
        return self.r * complex(math.cos(self.phi), math.sin(self.phi))

    def negated(self) -> "SqueezeParam":
        return SqueezeParam(self.r, self.phi + math.pi)


@dataclass(frozen=True)
class InputCoefficients:
    """Amplitudes of the state to teleport.

    ``eps_plus``/``eps_minus`` weight ``|xi>`` and ``|xi'>``; ``a_plus``/``a_minus``
    weight ``|xi>`` and ``|-xi>``.
    """

    eps_plus: complex = 1.0
    eps_minus: complex = 0.0
    a_plus: complex = 1.0
    a_minus: complex = 0.0

    @classmethod
    def from_eps_minus_sq(cls, eps_minus_sq: float, phase: float = 0.0) -> "InputCoefficients":
        if not 0.0 <= eps_minus_sq <= 1.0:
            raise ValueError("|eps_-|^2 must lie in [0, 1]")
        return cls(eps_plus=math.sqrt(1.0 - eps_minus_sq),
                   eps_minus=math.sqrt(eps_minus_sq) * np.exp(1j * phase))

    @classmethod
    def from_theta(cls, theta: float) -> "InputCoefficients":
        return cls(a_plus=math.cos(theta), a_minus=math.sin(theta))


def max_dim_cap(max_dim: int | None = None) -> int:
    """Effective truncation cap; the environment variable only lowers it."""
    cap = DEFAULT_MAX_DIM if max_dim is None else int(max_dim)
    env = os.environ.get(MAX_DIM_ENV)
    if env:
        cap = min(cap, int(env))
    if cap < 2:
        raise ValueError(f"dimension cap must be >= 2, got {cap}")
    return cap


def _squeezed_log_probs(r: float, one_photon: bool, n_pairs: int) -> np.ndarray:
    # log |coefficient|^2 for pair index k (Fock index 2k or 2k+1)
    k = np.arange(n_pairs, dtype=float)
    t2 = math.tanh(r) ** 2
    if one_photon:
        lead, fact = -3.0 * math.log(math.cosh(r)), gammaln(2 * k + 2)
    else:
        lead, fact = -math.log(math.cosh(r)), gammaln(2 * k + 1)
    return lead + fact - 2 * k * math.log(2.0) - 2 * gammaln(k + 1) + k * math.log(t2)


def squeezed_tail(r: float, dim: int, one_photon: bool = False) -> float:
    """Exact-state probability mass on Fock indices >= ``dim``."""
    t2 = math.tanh(r) ** 2
    if t2 == 0.0:  # includes r so small that tanh^2 underflows
        return 0.0 if dim > int(one_photon) else 1.0
    if t2 == 1.0:  # no finite truncation carries measurable mass
        return 1.0
    offset = 1 if one_photon else 0
    first = max(0, math.ceil((dim - offset) / 2))  # first pair index at or beyond dim
    # run far enough that the geometric remainder is negligible
    horizon = first + max(64, int(60.0 / max(-math.log(t2), 1e-12)) + 1)
    horizon = min(horizon, first + 2_000_000)
    logp = _squeezed_log_probs(r, one_photon, horizon + 1)
    p = np.exp(logp[first:])
    remainder = p[-1] * t2 / (1.0 - t2)
    return float(min(1.0, p[:-1].sum() + remainder))


def coherent_tail(alpha: complex, dim: int) -> float:
    return float(poisson.sf(dim - 1, abs(alpha) ** 2))


def auto_dim(param, tail_tol: float, max_dim: int | None = None) -> int:
    """Smallest even truncation whose discarded mass is below ``tail_tol``.

    ``param`` is a :class:`SqueezeParam` (both ``|xi>`` and ``|xi'>`` must fit)
    or a complex coherent amplitude.
    """
    if not 0.0 < tail_tol < 1.0:
        raise ValueError(f"tail_tol must lie in (0, 1), got {tail_tol}")
    cap = max_dim_cap(max_dim)
    if isinstance(param, SqueezeParam):
        def tail(d):
            return max(squeezed_tail(param.r, d, False), squeezed_tail(param.r, d, True))
        what = f"squeezed state r={param.r:g}"
    else:
        def tail(d):
            return coherent_tail(complex(param), d)
        what = f"coherent state alpha={complex(param):g}"

    top = cap - cap % 2
    if top < 2 or tail(top) >= tail_tol:
        achievable = tail(max(top, 2))
        raise TruncationError(
            f"{what}: tail mass {achievable:.3e} at the cap D={top} exceeds tolerance {tail_tol:.1e}",
            achievable_tail=achievable, max_dim=cap, tail_tol=tail_tol)
    lo, hi = 1, top // 2  # search over D = 2k
    while lo < hi:
        mid = (lo + hi) // 2
        if tail(2 * mid) < tail_tol:
            hi = mid
        else:
            lo = mid + 1
    return 2 * lo


def _squeezed_amps(xi: SqueezeParam, dim: int, one_photon: bool) -> np.ndarray:
    amps = np.zeros(dim, dtype=np.complex128)
    start = 1 if one_photon else 0
    if start >= dim:
        return amps
    ch = math.cosh(xi.r)
    step = -complex(math.cos(xi.phi), math.sin(xi.phi)) * math.tanh(xi.r)
    amps[start] = ch ** -1.5 if one_photon else ch ** -0.5
    for n in range(start, dim - 2, 2):
        # |n+2>/|n> ratio: sqrt((n+1)/(n+2)) on even n, sqrt((n+2)/(n+1)) on odd n
        ratio = (n + 2) / (n + 1) if one_photon else (n + 1) / (n + 2)
        amps[n + 2] = amps[n] * step * math.sqrt(ratio)
    return amps


def squeezed_vacuum(xi: SqueezeParam, dim: int) -> SingleModeState:
    """``S(xi)|0>``: even Fock support only."""
    if dim < 2:
        raise ValueError("squeezed vacuum needs dim >= 2")
    return SingleModeState(_squeezed_amps(xi, dim, False), squeezed_tail(xi.r, dim, False))


def squeezed_one_photon(xi: SqueezeParam, dim: int) -> SingleModeState:
    """``S(xi)|1>``: odd Fock support only."""
    if dim < 2:
        raise ValueError("squeezed one-photon state needs dim >= 2")
    return SingleModeState(_squeezed_amps(xi, dim, True), squeezed_tail(xi.r, dim, True))


def coherent(alpha: complex, dim: int) -> SingleModeState:
    if dim < 1:
        raise ValueError("dim must be >= 1")
    alpha = complex(alpha)
    amps = np.zeros(dim, dtype=np.complex128)
    amps[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(dim - 1):
        amps[n + 1] = amps[n] * alpha / math.sqrt(n + 1)
    return SingleModeState(amps, coherent_tail(alpha, dim))


def two_mode_squeezed(xi: SqueezeParam, dim: int) -> MultiModeState:
    """``sech r * sum_n (-e^{i phi} tanh r)^n |n, n>``."""
    if dim < 2:
        raise ValueError("dim must be >= 2")
    n = np.arange(dim)
    step = -complex(math.cos(xi.phi), math.sin(xi.phi)) * math.tanh(xi.r)
    amps = np.zeros((dim, dim), dtype=np.complex128)
    amps[n, n] = step ** n / math.cosh(xi.r)
    return MultiModeState(amps, math.tanh(xi.r) ** (2 * dim))


def overlap_opposite_squeezed(r: float) -> float:
    """``<xi|-xi> = sqrt((1 - tanh^2 r) / (1 + tanh^2 r))``, equal to ``1/sqrt(cosh 2r)``."""
    # 1 - tanh^2 r written as sech^2 r to avoid cancellation at large r
    return 1.0 / (math.cosh(r) * math.sqrt(1.0 + math.tanh(r) ** 2))


def case2_input_norm(a_plus: complex, a_minus: complex, r: float) -> float:
    """Normalization of ``a+ |xi> + a- |-xi>``."""
    cross = 2.0 * (np.conj(a_plus) * a_minus).real
    return float((abs(a_plus) ** 2 + abs(a_minus) ** 2 + cross * overlap_opposite_squeezed(r)) ** -0.5)


def case2_channel_norm(r: float, alpha: complex) -> float:
    return (1.0 + math.exp(-2 * abs(alpha) ** 2) * overlap_opposite_squeezed(r)) ** -0.5 / math.sqrt(2)


def input_case0(eps_plus: complex, eps_minus: complex, xi: SqueezeParam, dim: int) -> SingleModeState:
    """``eps+ |xi> + eps- |xi'>``; already normalized because the parities differ."""
    if abs(abs(eps_plus) ** 2 + abs(eps_minus) ** 2 - 1.0) > 1e-12:
        raise ValueError("|eps+|^2 + |eps-|^2 must equal 1")
    vac, one = squeezed_vacuum(xi, dim), squeezed_one_photon(xi, dim)
    tail = abs(eps_plus) ** 2 * vac.tail + abs(eps_minus) ** 2 * one.tail
    return SingleModeState(eps_plus * vac.amps + eps_minus * one.amps, tail)


def input_case2(a_plus: complex, a_minus: complex, xi: SqueezeParam, dim: int) -> SingleModeState:
    if a_plus == 0 and a_minus == 0:
        raise ValueError("input coefficients are both zero")
    norm = case2_input_norm(a_plus, a_minus, xi.r)
    plus, minus = squeezed_vacuum(xi, dim), squeezed_vacuum(xi.negated(), dim)
    state = SingleModeState(norm * (a_plus * plus.amps + a_minus * minus.amps))
    return SingleModeState(state.amps, max(0.0, 1.0 - state.norm_sq()))


def _pair_sum(first: tuple, second: tuple, weight: float) -> MultiModeState:
    amps = weight * (tensor(first).amps + tensor(second).amps)
    tails = [s.tail for s in first + second]
    return MultiModeState(amps, float(max(tails)))


def channel_squeezed(xi: SqueezeParam, dim: int) -> MultiModeState:
    """Modes (b, c): ``(|-xi>|xi'> + |-xi'>|xi>) / sqrt 2``."""
    neg = xi.negated()
    return _pair_sum((squeezed_vacuum(neg, dim), squeezed_one_photon(xi, dim)),
                     (squeezed_one_photon(neg, dim), squeezed_vacuum(xi, dim)),
                     1 / math.sqrt(2))


def channel_case1(xi: SqueezeParam, alpha: complex, dim_b: int, dim_c: int) -> MultiModeState:
    """Modes (b, c): ``(|alpha>|xi'> + |-alpha>|xi>) / sqrt 2``.

    The plain ``1/sqrt 2`` is exact: the squeezed factors have opposite
    parity, so the cross terms vanish whatever ``<alpha|-alpha>`` is.
    """
    return _pair_sum((coherent(alpha, dim_b), squeezed_one_photon(xi, dim_c)),
                     (coherent(-alpha, dim_b), squeezed_vacuum(xi, dim_c)),
                     1 / math.sqrt(2))


def channel_case2(xi: SqueezeParam, alpha: complex, dim_b: int, dim_c: int) -> MultiModeState:
    """Modes (b, c): ``M (|alpha>|-xi> + |-alpha>|xi>)``."""
    return _pair_sum((coherent(alpha, dim_b), squeezed_vacuum(xi.negated(), dim_c)),
                     (coherent(-alpha, dim_b), squeezed_vacuum(xi, dim_c)),
                     case2_channel_norm(xi.r, alpha))
