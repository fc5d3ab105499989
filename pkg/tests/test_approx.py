"""Renormalized couplings, squeezed-well approximation, and convergence."""

import math

import numpy as np
import pytest

from diracshell import approx, fiber, mat2
from diracshell.approx import (
    RegularizedModel,
    bound_states_for_matrix,
    convergence_sweep,
    epsilon_bound_states,
    renormalize,
    resolvent_norm_bound_check,
)
from diracshell.coupling import Coupling
from diracshell.errors import NoBoundState, UnsupportedRegime
from diracshell.mat2 import exp_closed, pauli_matrix


def test_renormalize_identity_at_d_zero():
    c = Coupling(1.0, 1.0, 0.0, 0.0, 1.0)  # d = 0
    rn = renormalize(c)
    assert rn.factor == pytest.approx(1.0)
    assert rn.eta_t == pytest.approx(1.0)
    assert rn.tau_t == pytest.approx(1.0)
    assert rn.lambda_t == pytest.approx(0.0)


def test_renormalize_electrostatic_critical():
    rn = renormalize(Coupling(2.0, 0.0, 0.0, 0.0, 1.0))
    assert rn.eta_t == pytest.approx(math.pi / 2, abs=1e-12)
    lam_mat = exp_closed((-1j * pauli_matrix(0, 1, 0, 0)) @ rn.a_matrix)
    assert np.allclose(lam_mat.array, -1j * pauli_matrix(0, 1, 0, 0).array, atol=1e-12)


def test_exp_identity_many_couplings():
    rng = np.random.default_rng(31)
    count = 0
    while count < 500:
        eta, tau, lam = rng.uniform(-3, 3, size=3)
        c = Coupling(eta, tau, lam, 0.0, 1.0)
        if c.d <= -3.9 or c.d > 10.0:
            continue
        # the non-principal branch scales the generator by ~2*pi/sqrt(d),
        # so keep it away from tiny d where that factor is ill-conditioned
        rn = renormalize(c, l=count % 2 if c.d > 0.05 else 0)
        assert approx.exp_identity_residual(rn) < 1e-11
        count += 1


def test_renorm_factor_continuous_at_zero():
    lo = approx._renorm_factor(-1e-6, 0)
    hi = approx._renorm_factor(1e-6, 0)
    assert lo == pytest.approx(1.0, abs=1e-6)
    assert hi == pytest.approx(1.0, abs=1e-6)


def test_branch_choices_agree_on_transmission():
    c = Coupling(3.0, 1.0, 0.5, 0.0, 1.0)
    lam = fiber.transmission_matrix(c).lambda_matrix.array
    for l in (0, 1, -1):
        rn = renormalize(c, l=l)
        got = exp_closed((-1j * pauli_matrix(0, 1, 0, 0)) @ rn.a_matrix)
        assert np.max(np.abs(got.array - lam)) < 1e-10


def test_unsupported_regime():
    with pytest.raises(UnsupportedRegime):
        renormalize(Coupling(0.0, -2.0, 0.0, 0.0, 1.0))  # d = -4
    with pytest.raises(UnsupportedRegime):
        renormalize(Coupling(0.0, 3.0, 0.0, 0.0, 1.0))  # d < -4


def test_zero_matrix_has_no_well_states():
    model = RegularizedModel(
        renorm=renormalize(Coupling(0.0, 0.0, 0.0, 0.0, 1.0)),
        k=0.0,
        mass=1.0,
        epsilon=1e-3,
    )
    assert epsilon_bound_states(model) == []


def test_small_eps_root_near_delta_eigenvalue():
    c = Coupling(2.0, 0.0, 0.0, 0.0, 1.0)
    targets = [z for z, _ in fiber.fiber_eigenvalues(fiber.FiberContext(c, 0.0))]
    assert targets == [pytest.approx(0.0, abs=1e-12)]
    model = RegularizedModel(renorm=renormalize(c), k=0.0, mass=1.0, epsilon=1e-3)
    roots = epsilon_bound_states(model)
    assert len(roots) == 1
    assert abs(roots[0] - targets[0]) < 5e-3


@pytest.mark.parametrize(
    "coupling",
    [Coupling(1.0, 0.0, 0.0, 0.0, 1.0), Coupling(2.0, 0.0, 0.0, 0.0, 1.0)],
)
def test_convergence_sweep(coupling):
    report = convergence_sweep(coupling, k=0.0, eps_list=[0.2, 0.02, 0.002])
    errs = [row.abs_error for row in report.rows]
    assert errs == sorted(errs, reverse=True)
    assert report.monotone
    assert report.final_error < 5e-3


def test_naive_matrix_limit_differs():
    # using the bare coupling matrix in the well (no renormalization)
    # converges to the wrong energy
    z_naive = bound_states_for_matrix(pauli_matrix(1, 0, 0, 0), k=0.0, mass=1.0, eps=1e-4)
    ctx = fiber.FiberContext(Coupling(1.0, 0.0, 0.0, 0.0, 1.0), 0.0)
    z_delta = fiber.fiber_eigenvalues(ctx)[0][0]
    assert z_delta == pytest.approx(-0.6, abs=1e-12)
    assert abs(z_naive[0] - z_delta) > 1e-2


def test_sweep_without_bound_state():
    with pytest.raises(NoBoundState):
        convergence_sweep(Coupling(0.0, 0.0, 0.0, 0.0, 1.0), k=1.0, eps_list=[0.1])


def test_eigenvalue_count_bounded():
    rng = np.random.default_rng(33)
    found = 0
    for _ in range(30):
        eta, tau, lam = rng.uniform(-2.5, 2.5, size=3)
        c = Coupling(eta, tau, lam, 0.0, 1.0)
        if c.d <= -3.9:
            continue
        model = RegularizedModel(renorm=renormalize(c), k=0.4, mass=1.0, epsilon=0.05)
        roots = epsilon_bound_states(model)
        assert len(roots) <= 2
        found += len(roots)
    assert found > 0


def test_resolvent_bound_check():
    c = Coupling(1.0, 0.0, 0.0, 0.0, 1.0)
    # at k = 0 the bound is trivially satisfied
    est0 = resolvent_norm_bound_check(c, k=0.0, eps=0.05)
    assert 0.0 < est0 < 1.0
    # at |k| = 2 the check asserts estimate <= 9 * estimate(0) * 1.1
    est2 = resolvent_norm_bound_check(c, k=2.0, eps=0.05)
    assert est2 <= 9.0 * est0 * 1.1


def test_resolvent_estimate_improves_with_eps():
    c = Coupling(1.0, 0.0, 0.0, 0.0, 1.0)
    big = resolvent_norm_bound_check(c, k=0.0, eps=0.05)
    small = resolvent_norm_bound_check(c, k=0.0, eps=0.025)
    assert small < big * 1.1
