import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as hst

from conftest import random_state
from telesqueeze import (
    MultiModeState,
    SingleModeState,
    SqueezeParam,
    auto_dim,
    basis_state,
    condition_on_counts,
    fidelity_to_target,
    joint_photon_distribution,
    project,
    quasi_bell_case1,
    quasi_bell_case2,
    tensor,
)
from telesqueeze.measurement import quasi_bell_case2_norm
from telesqueeze.protocols import analytic_p, build_lossless_output
from telesqueeze.states import input_case0


def test_distribution_on_vacuum():
    table = joint_photon_distribution(basis_state([0, 0], [3, 3]), 0, 1)
    assert table[(0, 0)] == 1
    assert table.total() == pytest.approx(1)
    assert sum(v for k, v in table.entries.items() if k != (0, 0)) == 0


def test_distribution_on_bell_like_state():
    amps = np.zeros((2, 2))
    amps[0, 1] = amps[1, 0] = 2**-0.5
    table = joint_photon_distribution(MultiModeState(amps), 0, 1)
    assert table[(0, 1)] == pytest.approx(0.5) and table[(1, 0)] == pytest.approx(0.5)


def test_distribution_mode_order(rng):
    psi = random_state(rng, (3, 4, 2))
    t01, t10 = joint_photon_distribution(psi, 0, 1, 2), joint_photon_distribution(psi, 1, 0, 2)
    for n in range(3):
        for m in range(3):
            assert t01[(n, m)] == pytest.approx(t10[(m, n)])


def test_distribution_errors(rng):
    psi = random_state(rng, (3, 3))
    with pytest.raises(ValueError):
        joint_photon_distribution(psi, 0, 0)
    with pytest.raises(ValueError):
        joint_photon_distribution(psi, 0, 1, max_n=3)
    with pytest.raises(IndexError):
        joint_photon_distribution(psi, 0, 2)


@given(hst.integers(0, 2**32 - 1), hst.integers(0, 3))
def test_outcome_mass_is_conserved(seed, max_n):
    psi = random_state(np.random.default_rng(seed), (4, 5, 3))
    assert joint_photon_distribution(psi, 0, 1, max_n).total() == pytest.approx(1.0, abs=1e-12)


def test_lossless_first_outcome():
    xi = SqueezeParam(1.0)
    _, out = build_lossless_output(1, 0, xi, auto_dim(xi, 1e-12))
    table = joint_photon_distribution(out, 0, 1, 8)
    assert table[(0, 1)] == pytest.approx(1 / (4 * math.cosh(1) ** 4), rel=1e-10)
    assert table[(0, 1)] == pytest.approx(0.0440946, abs=1e-7)


def test_conditioning_on_success_recovers_input():
    xi = SqueezeParam(1.0)
    d = auto_dim(xi, 1e-12)
    eps = (math.sqrt(0.7), math.sqrt(0.3))
    psi, out = build_lossless_output(*eps, xi, d)
    prob, bob = condition_on_counts(out, 0, 1, 0, 1)
    assert prob == pytest.approx(analytic_p(0, 1.0), rel=1e-9)
    assert fidelity_to_target(psi, bob, 0) >= 1 - 1e-8


def test_conditioning_on_non_success_outcome():
    xi = SqueezeParam(1.0)
    d = auto_dim(xi, 1e-12)
    psi, out = build_lossless_output(math.sqrt(0.7), math.sqrt(0.3), xi, d)
    prob, bob = condition_on_counts(out, 0, 1, 0, 0)
    # brute-force: <0,0|_ab of the output equals the (0,0) slice
    assert prob == pytest.approx(float(np.sum(np.abs(out.amps[0, 0]) ** 2)), rel=1e-12)
    assert 0 < prob < 1
    assert fidelity_to_target(psi, bob, 0) < 0.99


def test_conditioning_deep_outcome_at_small_squeezing():
    xi = SqueezeParam(0.3)
    d = auto_dim(xi, 1e-12)
    _, out = build_lossless_output(math.sqrt(0.7), math.sqrt(0.3), xi, d)
    prob, _ = condition_on_counts(out, 0, 1, 5, 6)
    assert prob == pytest.approx(analytic_p(5, 0.3), rel=1e-6)
    assert 0 < prob < 1e-4


def test_zero_probability_outcome_is_flagged():
    prob, bob = condition_on_counts(basis_state([0, 0, 1], [3, 3, 2]), 0, 1, 1, 0)
    assert prob == 0 and bob.is_empty and bob.warnings
    prob, bob = condition_on_counts(basis_state([0, 0, 1], [3, 3, 2]), 0, 1, 5, 0)
    assert prob == 0 and bob.warnings


def test_project_requires_normalized_bra(rng):
    psi = random_state(rng, (3, 3))
    with pytest.raises(ValueError):
        project(MultiModeState(np.ones(3)), psi, [0])


@given(hst.floats(0, 2 * math.pi), hst.floats(0, 2 * math.pi), hst.integers(0, 2**32 - 1))
def test_projection_probability_ignores_global_phases(p1, p2, seed):
    r = np.random.default_rng(seed)
    psi, bra = random_state(r, (3, 4)), random_state(r, (3,))
    p0, _ = project(bra, psi, [0])
    p, _ = project(MultiModeState(bra.amps * cmath.exp(1j * p1)),
                   MultiModeState(psi.amps * cmath.exp(1j * p2)), [0])
    assert p == pytest.approx(p0, abs=1e-14)


def test_quasi_bell_degenerate_limits():
    qb = quasi_bell_case1(SqueezeParam(0), 0, 1.0, (3, 3))
    expected = np.zeros((3, 3))
    expected[0, 0] = expected[1, 0] = 2**-0.5
    assert np.allclose(qb.amps, expected)
    assert quasi_bell_case2_norm(0, 0, 1.0) == pytest.approx(0.5)
    qb = quasi_bell_case2(SqueezeParam(0), 0, 1.0, (3, 3))
    assert qb.amps[0, 0] == pytest.approx(1) and qb.norm_sq() == pytest.approx(1)


@pytest.mark.parametrize("r", [0.3, 1.0, 1.5])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("eta", [0.5, 1.0])
def test_quasi_bell_unit_norm(r, alpha, eta):
    xi = SqueezeParam(r, 0.4)
    dims = (auto_dim(xi, 1e-13), auto_dim(alpha, 1e-13))
    assert abs(quasi_bell_case1(xi, alpha, eta, dims).norm_sq() - 1) <= 1e-10
    assert abs(quasi_bell_case2(xi, alpha, eta, dims).norm_sq() - 1) <= 1e-10


def test_fidelity_self_and_errors(rng):
    target = SingleModeState(random_state(rng, (4,)).amps)
    assert fidelity_to_target(target, target, 0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        fidelity_to_target(target, MultiModeState(2 * target.amps), 0)


def test_fidelity_against_closed_form_bob_state():
    # eps = (1/sqrt2, 1/sqrt2): Bob carries the environment coherent amplitudes
    xi, alpha, eta = SqueezeParam(1.0), 2.0, 0.8
    d, dc = auto_dim(xi, 1e-13), auto_dim(alpha, 1e-13)
    psi = input_case0(2**-0.5, 2**-0.5, xi, d)
    from telesqueeze import coherent, squeezed_one_photon, squeezed_vacuum

    g = alpha * math.sqrt(1 - eta)
    amps = (tensor([squeezed_vacuum(xi, d), coherent(-g, dc)]).amps
            + tensor([squeezed_one_photon(xi, d), coherent(g, dc)]).amps) / math.sqrt(2)
    f = fidelity_to_target(psi, MultiModeState(amps), 0)
    assert f == pytest.approx(0.5 + 0.5 * math.exp(-1.6), abs=1e-10)
    assert f == pytest.approx(0.60095, abs=1e-5)


@given(hst.integers(0, 2**32 - 1))
def test_fidelity_on_products_and_range(seed):
    r = np.random.default_rng(seed)
    bob, env = random_state(r, (4,)), random_state(r, (3,))
    target = SingleModeState(random_state(r, (4,)).amps)
    f = fidelity_to_target(target, tensor([bob, env]), 0)
    assert f == pytest.approx(abs(np.vdot(target.amps, bob.amps)) ** 2, abs=1e-12)
    g = fidelity_to_target(target, random_state(r, (4, 3)), 0)
    assert 0 <= g <= 1
