"""Regime classification and the two unitary-equivalence reductions."""

import numpy as np
import pytest

from diracshell.coupling import (
    Coupling,
    classify,
    minus_four_over_d_partner,
    omega_reduction_pair,
    reduce_omega,
)
from diracshell.errors import InvalidRegime


def test_classify_examples():
    free = classify(Coupling(0, 0, 0, 0, 0))
    assert not free.is_critical and not free.is_confining and free.d == 0

    conf = classify(Coupling(0, 0, 2, 0, 0))
    assert conf.is_confining and conf.is_critical and conf.d == -4
    assert not conf.det_condition

    d4 = classify(Coupling(3, 2, 1, 0, 1))
    assert d4.is_case_d4 and d4.d == pytest.approx(4)


def test_confining_implies_det_zero():
    rng = np.random.default_rng(5)
    for _ in range(50):
        tau = rng.uniform(-2, 2)
        lam_sq = 4 + rng.uniform(0, 4) - tau * tau  # eta^2 - tau^2 - lam^2 = -4
        eta = np.sqrt(rng.uniform(0, 4))
        lam = np.sqrt(max(eta * eta - tau * tau + 4, 0))
        c = Coupling(float(eta), float(tau), float(lam), 0.0, 1.0)
        assert abs(c.d + 4.0) < 1e-9
        assert not classify(c).det_condition


def test_omega_reduction_example():
    red = reduce_omega(Coupling(0, 0, 0, 1, 1))
    assert red.x_factor == pytest.approx(0.8)
    assert red.phase == pytest.approx(0.6 + 0.8j)
    assert red.reduced.omega == 0.0


def test_omega_zero_is_identity():
    c = Coupling(1, 2, 3, 0, 1)
    red = reduce_omega(c)
    assert red.x_factor == 1.0 and red.phase == 1.0 and red.reduced == c


def test_phase_unimodular_and_root_quadratic():
    rng = np.random.default_rng(6)
    for _ in range(1000):
        c = Coupling(*rng.uniform(-3, 3, size=4), rng.uniform(-2, 2))
        red = reduce_omega(c)
        x = red.x_factor
        # x solves d x^2 + (4 - d + w^2) x - 4 = 0
        res = c.d * x * x + (4 - c.d + c.omega**2) * x - 4
        assert abs(res) < 1e-9
        assert abs(abs(red.phase) - 1.0) < 1e-12


def test_omega_reduction_pair_distinct():
    a, b = omega_reduction_pair(Coupling(1, 0, 0, 1, 1))
    assert a.x_factor != b.x_factor


def test_partner_involution():
    rng = np.random.default_rng(7)
    n = 0
    while n < 200:
        c = Coupling(*rng.uniform(-3, 3, size=3), 0.0, rng.uniform(-2, 2))
        if abs(c.d) < 0.1 or abs(c.d + 4) < 0.1:
            continue
        n += 1
        back = minus_four_over_d_partner(minus_four_over_d_partner(c))
        for attr in ("eta", "tau", "lam", "mass"):
            assert getattr(back, attr) == pytest.approx(getattr(c, attr), abs=1e-12)


def test_partner_rejects_degenerate():
    with pytest.raises(InvalidRegime):
        minus_four_over_d_partner(Coupling(0, 0, 0, 0, 1))  # d = 0
    with pytest.raises(InvalidRegime):
        minus_four_over_d_partner(Coupling(0, 0, 2, 0, 1))  # d = -4
    with pytest.raises(InvalidRegime):
        minus_four_over_d_partner(Coupling(1, 0, 0, 0.5, 1))  # omega != 0
