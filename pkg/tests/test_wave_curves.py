"""Shock curves: closed forms, critical parameters, Lax admissibility."""

import numpy as np
import pytest

from shockstab import models, wave_curves as wc
from shockstab.errors import DegenerateBaseError, UsageError

SC = models.ScalarCubic()
EL = models.Elastodynamics(m=1.0)


def test_scalar_shock_point_anchor():
    p = wc.shock_point(SC, 1, 1.0, 1.0)
    assert np.isclose(p.state[0], 2.0)
    assert np.isclose(p.speed, -7.0)


def test_elastodynamics_shock_point_anchor():
    p = wc.shock_point(EL, 1, (1.0, 0.0), -3.0)
    assert np.allclose(p.state, [-2.0, -6.0])
    assert np.isclose(p.speed, -2.0)


def test_zero_strength_limit_is_characteristic():
    rng = np.random.default_rng(0)
    for m in (SC, EL):
        for _ in range(50):
            u = rng.uniform(-3, 3, m.n)
            if abs(u[0]) < 0.1:
                continue
            p = wc.shock_point(m, 1, u, 0.0)
            assert np.allclose(p.state, u)
            assert abs(p.speed - float(m.eigenvalue(u, 1))) < 1e-12


def test_rankine_hugoniot_residual_random():
    rng = np.random.default_rng(1)
    for m in (SC, EL):
        for _ in range(200):
            u = rng.uniform(-2, 2, m.n)
            if abs(u[0]) < 0.1:
                continue
            s = rng.uniform(-2, 2)
            p = wc.shock_point(m, 1, u, s)
            assert wc.rh_residual(m, u, p.state, p.speed) <= 1e-10


def test_speed_derivative_matches_difference_quotient():
    rng = np.random.default_rng(2)
    h = 1e-6
    for m in (SC, EL):
        for _ in range(100):
            u = rng.uniform(-2, 2, m.n)
            if abs(u[0]) < 0.1:
                continue
            s = rng.uniform(-2, 2)
            d = float(m.shock_speed(1, u, s + h) - m.shock_speed(1, u, s - h)) / (2 * h)
            assert abs(d - float(m.shock_speed_deriv(1, u, s))) < 1e-6


def test_critical_params_anchors():
    cp = wc.critical_params(EL, 1, (1.0, 0.0))
    assert np.isclose(cp.s_natural, -1.5)
    assert np.isclose(cp.s_minus_natural, -3.0)
    assert cp.orientation == 1.0
    # negative first component: signs flip
    cp2 = wc.critical_params(EL, 1, (-2.0, 0.0))
    assert np.isclose(cp2.s_natural, 3.0)
    assert np.isclose(cp2.s_minus_natural, 6.0)
    assert cp2.orientation == -1.0


def test_critical_params_speed_structure():
    # sigma' changes sign exactly at s_natural; speed at s_minus_natural
    # returns to the characteristic value
    rng = np.random.default_rng(3)
    for m in (SC, EL):
        for _ in range(50):
            u = rng.uniform(-3, 3, m.n)
            if abs(u[0]) < 0.2:
                continue
            cp = wc.critical_params(m, 1, u)
            assert abs(float(m.shock_speed_deriv(1, u, cp.s_natural))) < 1e-10
            sig = float(m.shock_speed(1, u, cp.s_minus_natural))
            lam = float(m.eigenvalue(u, 1))
            assert abs(sig - lam) < 1e-10


def test_degenerate_base_rejected():
    with pytest.raises(DegenerateBaseError):
        wc.critical_params(SC, 1, 0.0)
    with pytest.raises(DegenerateBaseError):
        wc.critical_params(EL, 1, (0.0, 1.0))


def test_lax_admissibility_interval():
    s = np.linspace(-5.0, 3.0, 1601)
    adm = wc.lax_admissible(EL, 1, (1.0, 0.0), s)
    inside = (s > -3.0 + 1e-6) & (s < -1e-6)
    assert not np.any(adm & inside)
    outside = (s < -3.0 - 1e-6) | (s > 1e-6)
    assert np.all(adm[outside])


def test_lax_admissibility_negative_base():
    # orientation flips: forward branch has raw s < 0
    s = np.linspace(-3.0, 5.0, 1601)
    adm = wc.lax_admissible(EL, 1, (-1.0, 0.0), s)
    inside = (s > 1e-6) & (s < 3.0 - 1e-6)
    assert not np.any(adm & inside)


def test_curve_extent_first_component_cap():
    neg, pos = wc.curve_extent(EL, 1, (1.0, 0.0))
    assert neg == -6.0 and pos == 4.0
    neg, pos = wc.curve_extent(EL, 1, (-1.0, 0.0))
    assert neg == -6.0 and pos == 4.0  # oriented parameter, mirrored base


def test_oriented_helpers():
    p = wc.shock_point_oriented(EL, 1, (-1.0, 0.0), 0.5)
    # oriented forward from a negative base decreases w
    assert p.state[0] == pytest.approx(-1.5)


def test_curve_table_columns():
    t = wc.curve_table(EL, 1, (1.0, 0.0), np.linspace(-4, 2, 13))
    assert set(t) == {"s", "state", "sigma", "sigma_prime", "lax_admissible"}
    assert t["state"].shape == (13, 2)


def test_base_outside_box_rejected():
    with pytest.raises(UsageError):
        wc.shock_point(SC, 1, 100.0, 0.1)
