"""Brute-force reference for the lossy quasi-Bell protocols.

Shares only the single-mode kets with the main path.  Everything else is
done differently on purpose: the loss is a dense ``scipy.linalg.expm`` of the
full truncated two-mode generator, and all tensor assembly and contraction is
spelled out with ``np.einsum``.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

from . import states as st
from .states import SqueezeParam


def dense_loss_unitary(eta: float, dim: int, env_dim: int) -> np.ndarray:
    theta = math.acos(math.sqrt(eta))
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    e = np.diag(np.sqrt(np.arange(1, env_dim)), 1)
    gen = theta * (np.kron(a, e.T) - np.kron(a.T, e))
    return scipy.linalg.expm(gen).reshape(dim, env_dim, dim, env_dim)


def _lossy(channel: np.ndarray, eta: float, env_dim: int) -> np.ndarray:
    u = dense_loss_unitary(eta, channel.shape[0], env_dim)
    # environment starts in |0>: only the e=0 column of U is needed
    return np.einsum("xyb,bc->xcy", u[:, :, :, 0], channel)


def _project(psi: np.ndarray, lossy: np.ndarray, bra: np.ndarray) -> tuple[float, np.ndarray]:
    whole = np.einsum("a,bce->abce", psi, lossy)
    residual = np.einsum("ab,abce->ce", bra.conj(), whole)
    return float(np.sum(np.abs(residual) ** 2)), residual


def case1_dense_oracle(eps_plus, eps_minus, xi: SqueezeParam, alpha: complex, eta: float,
                       dims) -> tuple[float, np.ndarray]:
    """Probability and unnormalized (c, E) residual of the case-1 projection."""
    da, db, dc, de = dims
    vac_a, one_a = st.squeezed_vacuum(xi, da).amps, st.squeezed_one_photon(xi, da).amps
    vac_c, one_c = st.squeezed_vacuum(xi, dc).amps, st.squeezed_one_photon(xi, dc).amps
    psi = eps_plus * vac_a + eps_minus * one_a
    channel = (np.einsum("b,c->bc", st.coherent(alpha, db).amps, one_c)
               + np.einsum("b,c->bc", st.coherent(-alpha, db).amps, vac_c)) / math.sqrt(2)
    beta = alpha * math.sqrt(eta)
    bra = (np.einsum("a,b->ab", vac_a, st.coherent(-beta, db).amps)
           + np.einsum("a,b->ab", one_a, st.coherent(beta, db).amps)) / math.sqrt(2)
    return _project(psi, _lossy(channel, eta, de), bra)


def case2_dense_oracle(a_plus, a_minus, xi: SqueezeParam, alpha: complex, eta: float,
                       dims) -> tuple[float, np.ndarray]:
    """Probability and unnormalized (c, E) residual of the case-2 projection."""
    da, db, dc, de = dims
    neg = xi.negated()
    plus_a, minus_a = st.squeezed_vacuum(xi, da).amps, st.squeezed_vacuum(neg, da).amps
    plus_c, minus_c = st.squeezed_vacuum(xi, dc).amps, st.squeezed_vacuum(neg, dc).amps
    s = 1.0 / math.sqrt(math.cosh(2 * xi.r))
    cross = 2 * (np.conj(a_plus) * a_minus).real
    psi = (a_plus * plus_a + a_minus * minus_a) / math.sqrt(abs(a_plus) ** 2 + abs(a_minus) ** 2 + cross * s)
    m = 1.0 / math.sqrt(2 * (1 + math.exp(-2 * abs(alpha) ** 2) * s))
    channel = m * (np.einsum("b,c->bc", st.coherent(alpha, db).amps, minus_c)
                   + np.einsum("b,c->bc", st.coherent(-alpha, db).amps, plus_c))
    beta = alpha * math.sqrt(eta)
    c = 1.0 / math.sqrt(2 * (1 + s * math.exp(-2 * eta * abs(alpha) ** 2)))
    bra = c * (np.einsum("a,b->ab", plus_a, st.coherent(-beta, db).amps)
               + np.einsum("a,b->ab", minus_a, st.coherent(beta, db).amps))
    return _project(psi, _lossy(channel, eta, de), bra)
