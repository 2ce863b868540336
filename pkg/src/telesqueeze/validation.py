"""Desk-scale invariant checks behind the ``validate`` command."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np

from . import states as st
from .fock import (
    MultiModeState,
    SingleModeState,
    apply_operator,
    fock_state,
    inner_product,
    matrix_exponential,
    number_expectation,
    partial_inner,
    reduced_density,
    tensor,
    unitarity_error,
)
from .measurement import fidelity_to_target, joint_photon_distribution, quasi_bell_case1, quasi_bell_case2
from .optics import LossSpec, beam_splitter, loss_channel, squeeze_operator
from .oracle import case2_dense_oracle
from .protocols import (
    analytic_fidelity_case1,
    analytic_p,
    build_lossless_output,
    project_case2,
    run_case1,
    run_lossless,
)
from .states import SqueezeParam


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str


def _random_state(rng: np.random.Generator, dims) -> MultiModeState:
    amps = rng.normal(size=dims) + 1j * rng.normal(size=dims)
    return MultiModeState(amps / np.linalg.norm(amps))


def _fock_checks():
    rng = np.random.default_rng(7)
    psi = _random_state(rng, (4, 3, 5))
    bs = beam_splitter(0.37, 4, 3)
    out = apply_operator(bs, psi, [0, 1])
    yield "unitary application keeps the norm", abs(out.norm() - psi.norm()) <= 1e-10, f"{abs(out.norm() - psi.norm()):.1e}"

    phi = _random_state(rng, (3,))
    chi = _random_state(rng, (4, 2))
    back = partial_inner(phi, tensor([phi, chi]), [0])
    err = float(np.max(np.abs(back.amps - chi.amps)))
    yield "partial_inner undoes tensor", err <= 1e-12, f"{err:.1e}"

    ket = _random_state(rng, (3, 4))
    total = sum(partial_inner(fock_state(k, 3), ket, [0]).norm_sq() for k in range(3))
    yield "partial_inner completeness", abs(total - 1.0) <= 1e-12, f"{abs(total - 1):.1e}"

    g = np.array([[0, -1], [1, 0]]) * math.pi / 4
    u = matrix_exponential(g)
    err = float(np.max(np.abs(np.abs(u) - 1 / math.sqrt(2))))
    yield "expm block rotation", err <= 1e-14 and unitarity_error(u) <= 1e-10, f"{err:.1e}"


def _states_checks():
    for r in (0.3, 1.0, 2.0):
        xi = SqueezeParam(r, 0.4)
        vac, one = st.squeezed_vacuum(xi, 42), st.squeezed_one_photon(xi, 42)
        worst = 0.0
        for n in range(21):
            t = mpmath.tanh(r) * mpmath.exp(1j * mpmath.mpf(0.4))
            c = (-t) ** n * mpmath.sqrt(mpmath.factorial(2 * n)) / (2 ** n * mpmath.factorial(n)) / mpmath.sqrt(mpmath.cosh(r))
            d = (-t) ** n * mpmath.sqrt(mpmath.factorial(2 * n + 1)) / (2 ** n * mpmath.factorial(n)) / mpmath.cosh(r) ** 1.5
            for got, want in ((vac.amps[2 * n], c), (one.amps[2 * n + 1], d)):
                want = complex(want)
                worst = max(worst, abs(got - want) / abs(want))
        yield f"coefficient recursion r={r}", worst <= 1e-12, f"{worst:.1e}"
        parity = not np.any(vac.amps[1::2]) and not np.any(one.amps[0::2])
        yield f"parity support r={r}", parity, ""

    for r in (0.5, 1.0, 1.5):
        xi = SqueezeParam(r)
        d = st.auto_dim(xi, 1e-12)
        trunc = inner_product(st.squeezed_vacuum(xi, d), st.squeezed_vacuum(xi.negated(), d)).real
        err = max(abs(trunc - st.overlap_opposite_squeezed(r)), abs(trunc - 1 / math.sqrt(math.cosh(2 * r))))
        yield f"<xi|-xi> identity r={r}", err <= 1e-8, f"{err:.1e}"

    xi = SqueezeParam(1.0)
    for name, s in (("squeezed channel", st.channel_squeezed(xi, 108)),
                    ("case-1 channel", st.channel_case1(xi, 2.0, 26, 108)),
                    ("case-2 channel", st.channel_case2(xi, 2.0, 26, 108))):
        yield f"{name} normalized", abs(s.norm_sq() - 1) <= 1e-10, f"{abs(s.norm_sq() - 1):.1e}"


def _optics_checks():
    d = 12
    bs = beam_splitter(0.61, d)
    yield "beam splitter block unitarity", bs.block_unitarity_error() <= 1e-12, f"{bs.block_unitarity_error():.1e}"
    comp = beam_splitter(0.2, d).matrix @ beam_splitter(0.41, d).matrix
    err = float(np.max(np.abs(comp - bs.matrix)))
    yield "beam splitter composition", err <= 1e-10, f"{err:.1e}"

    rng = np.random.default_rng(3)
    amps = np.zeros((d, d), dtype=complex)
    for na in range(d):
        for nb in range(d - na):
            amps[na, nb] = rng.normal() + 1j * rng.normal()
    psi = MultiModeState(amps / np.linalg.norm(amps))
    out = apply_operator(bs, psi, [0, 1])
    before = number_expectation(psi, 0) + number_expectation(psi, 1)
    after = number_expectation(out, 0) + number_expectation(out, 1)
    yield "photon number conserved", abs(before - after) <= 1e-10, f"{abs(before - after):.1e}"

    for r in (0.5, 1.2):
        xi = SqueezeParam(r, 0.3)
        dim = st.auto_dim(xi, 1e-12)
        s_op = squeeze_operator(xi, dim)
        for k, ref in ((0, st.squeezed_vacuum(xi, dim)), (1, st.squeezed_one_photon(xi, dim))):
            ov = abs(inner_product(ref, apply_operator(s_op, fock_state(k, dim), [0]))) ** 2
            yield f"S(xi)|{k}> vs expansion r={r}", ov >= 1 - 1e-9, f"1-F={1 - ov:.1e}"

    xi = SqueezeParam(1.0)
    dim = st.auto_dim(xi, 1e-12)
    built = apply_operator(beam_splitter(math.pi / 4, dim),
                           tensor([st.squeezed_vacuum(xi, dim), st.squeezed_vacuum(xi.negated(), dim)]), [0, 1])
    ov = abs(inner_product(st.two_mode_squeezed(xi, dim), built)) ** 2
    yield "two-mode squeezed from beam splitter", ov >= 1 - 1e-9, f"1-F={1 - ov:.1e}"

    for eta in (0.25, 0.75):
        out = loss_channel(st.coherent(2.0, 40), LossSpec(eta, 0))
        ref = tensor([st.coherent(2 * math.sqrt(eta), 40), st.coherent(2 * math.sqrt(1 - eta), 40)])
        f = abs(inner_product(ref, out)) ** 2
        yield f"loss on coherent eta={eta}", f >= 1 - 1e-9, f"1-F={1 - f:.1e}"

    psi = _random_state(rng, (8,))
    twice = loss_channel(loss_channel(psi, LossSpec(0.7, 0)), LossSpec(0.6, 0))
    once = loss_channel(psi, LossSpec(0.42, 0))
    err = float(np.max(np.abs(reduced_density(twice, [0]) - reduced_density(once, [0]))))
    yield "loss semigroup", err <= 1e-10, f"{err:.1e}"


def _measurement_checks():
    xi = SqueezeParam(1.0)
    psi, out = build_lossless_output(math.sqrt(0.7), math.sqrt(0.3), xi, 60)
    table = joint_photon_distribution(out, 0, 1, 20)
    yield "outcome table mass", abs(table.total() - out.norm_sq()) <= 1e-10, f"{abs(table.total() - out.norm_sq()):.1e}"

    for r, alpha, eta in ((0.3, 1.0, 0.8), (1.0, 2.0, 1.0)):
        x = SqueezeParam(r)
        dims = (st.auto_dim(x, 1e-13), st.auto_dim(alpha, 1e-13))
        for label, qb in (("case-1", quasi_bell_case1(x, alpha, eta, dims)),
                          ("case-2", quasi_bell_case2(x, alpha, eta, dims))):
            err = abs(qb.norm_sq() - 1)
            yield f"{label} quasi-Bell norm r={r} alpha={alpha} eta={eta}", err <= 1e-10, f"{err:.1e}"

    rng = np.random.default_rng(11)
    bob, env = _random_state(rng, (5,)), _random_state(rng, (4,))
    target = SingleModeState(_random_state(rng, (5,)).amps)
    f1 = fidelity_to_target(target, tensor([bob, env]), 0)
    f2 = abs(inner_product(target, bob)) ** 2
    yield "fidelity on product states", abs(f1 - f2) <= 1e-12, f"{abs(f1 - f2):.1e}"


def _protocol_checks():
    for r in (0.3, 0.8, 1.2):
        rep = run_lossless(math.sqrt(0.6), math.sqrt(0.4) * 1j, SqueezeParam(r))
        rel = rep.analytic["max_relative_error"]
        fids = [o["bob_fidelity"] for o in rep.outcomes if o["kind"] == "success"]
        yield f"lossless P(n,n+1) r={r}", rel <= 1e-6, f"rel={rel:.1e}"
        yield f"lossless bob fidelity r={r}", min(fids) >= 1 - 1e-8, f"1-F={1 - min(fids):.1e}"
    partial = sum(analytic_p(n, 1.0) for n in range(61))
    yield "success sum to 0.25", abs(partial - 0.25) <= 1e-6, f"{abs(partial - 0.25):.1e}"

    for eps_minus_sq in (0.0, 1.0):
        rep = run_case1(math.sqrt(1 - eps_minus_sq), math.sqrt(eps_minus_sq), SqueezeParam(0.5), 2.0, 0.8)
        f = rep.outcomes[0]["bob_fidelity"]
        yield f"case-1 endpoint |eps-|^2={eps_minus_sq}", abs(f - 1) <= 5e-4, f"1-F={1 - f:.1e}"

    grid = np.linspace(0, 1, 101)
    vals = np.array([analytic_fidelity_case1(x, 0.9, 2.0) for x in grid])
    yield "case-1 closed form symmetric", float(np.max(np.abs(vals - vals[::-1]))) <= 1e-12, ""


def _oracle_checks():
    for r in (0.5, 1.2):
        for alpha, eta in ((1.0, 0.8), (2.0, 0.9)):
            xi = SqueezeParam(r)
            da, db = st.auto_dim(xi, 1e-10), st.auto_dim(alpha, 1e-12)
            dims = (da, db, da, db)
            a = (0.6, 0.8j)
            prob, bob = project_case2(*a, xi, alpha, eta, dims)
            o_prob, o_res = case2_dense_oracle(*a, xi, alpha, eta, dims)
            err = max(abs(prob - o_prob), float(np.max(np.abs(bob.amps * math.sqrt(prob) - o_res))))
            yield f"case-2 oracle r={r} alpha={alpha} eta={eta}", err <= 1e-12, f"{err:.1e}"


SUITES: dict[str, Callable] = {
    "fock": _fock_checks,
    "states": _states_checks,
    "optics": _optics_checks,
    "measurement": _measurement_checks,
    "protocols": _protocol_checks,
    "case2-oracle": _oracle_checks,
}


def run_suites(names=None) -> list[CheckResult]:
    names = list(SUITES) if not names else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    results = []
    for name in names:
        for check, ok, detail in SUITES[name]():
            results.append(CheckResult(name, check, bool(ok), detail))
    return results
