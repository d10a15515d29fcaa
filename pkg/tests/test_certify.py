"""Weight certification, the moderate-strength threshold, entropy
construction and region maps."""

import numpy as np
import pytest

from shockstab import certify as cf, dissipation as dp, models
from shockstab.errors import UsageError

SC = models.ScalarCubic()
EL = models.Elastodynamics(m=1.0)


def test_epsilon_scalar_anchor():
    eps = cf.compute_epsilon(SC, 1, 1.0)
    assert abs(eps.epsilon - 3.0) < 1e-8
    assert not eps.truncated


def test_epsilon_level_property():
    # eta(u_L|S(eps)) matches eta(u_L|S(s_minus_natural)) by construction
    for m, uL in [(SC, 1.0), (EL, (1.0, 0.0))]:
        eps = cf.compute_epsilon(m, 1, uL)
        u = models.as_state(m, uL)
        orient = float(m.orientation(1, u))
        smn = float(m.s_minus_natural(1, u))
        lvl_eps = float(models.rel_entropy(m, u, m.shock_state(1, u, orient * eps.epsilon)))
        lvl_mnat = float(models.rel_entropy(m, u, m.shock_state(1, u, smn)))
        assert abs(lvl_eps - lvl_mnat) < 1e-8
        assert eps.epsilon > 0


def test_epsilon_mirrored_base():
    # negative first component: same threshold by symmetry
    e1 = cf.compute_epsilon(EL, 1, (1.0, 0.0)).epsilon
    e2 = cf.compute_epsilon(EL, 1, (-1.0, 0.0)).epsilon
    assert abs(e1 - e2) < 1e-10


def test_scan_weight_includes_reference_witness():
    setup = dp.ShockSetup(SC, 1.0, 1.0, 0.3)
    eps = cf.compute_epsilon(SC, 1, 1.0)
    rec = cf.scan_weight(setup, cf.CertGrid(), eps.epsilon)
    # the reference shock itself is on the grid and dissipates exactly zero,
    # so the max can never be below it
    assert rec["drh_max"] >= -1e-14


def test_certify_weight_scalar():
    rep = cf.certify_weight(SC, 1, 1.0, 1.0)
    assert rep.certified and rep.a_star > 0
    assert rep.moderate_strength_ok
    last_pass = [r for r in rep.records if r["passed"]][-1]
    assert last_pass["dcont_max"] <= 1e-12
    assert last_pass["drh_max"] <= 1e-12
    # failures only above the certified weight
    for r in rep.records:
        if not r["passed"]:
            assert r["a"] > rep.a_star - 1e-15


def test_certify_family_2_reports_reciprocal():
    rep = cf.certify_weight(EL, 2, (1.0, 0.0), 0.5,
                            cf.SearchSpec(steps=6, grid=cf.CertGrid(
                                n_directions=48, n_radii=12, n_s=80)))
    assert rep.family == 2
    assert rep.a_star_reciprocal == pytest.approx(1.0 / rep.a_star)


def test_build_scalar_entropy_feasible():
    spec = cf.build_scalar_entropy(1.0, 5.0)
    assert 0 < spec.slope < 26.0 / 47.0
    m = models.ScalarCubic(entropy=spec)
    # closed form of the reference jump
    e = float(models.rel_entropy(m, 1.0, 5.0))
    assert abs(e - 0.5 * spec.slope * 16.0) < 1e-9
    # covered: threshold exceeds the shock size
    assert cf.compute_epsilon(m, 1, 1.0).epsilon > 4.0


def test_build_scalar_entropy_rejects_bad_orientation():
    with pytest.raises(UsageError):
        cf.build_scalar_entropy(-1.0, 5.0)
    with pytest.raises(UsageError):
        cf.build_scalar_entropy(2.0, 1.0)


def test_region_map_scalar_partition():
    rm = cf.region_map(SC, 1, 1.0, cf.RegionGrid(n_first=241))
    cls = rm["class"]
    # exactly one class per state
    assert set(cls) == {cf.NOT_ADMISSIBLE, cf.ADMISSIBLE_NOT_COVERED,
                        cf.COVERED_STABLE}
    u = rm["state"][:, 0]
    du = u[1] - u[0]
    # class changes exactly at the excluded band and threshold edges
    transitions = u[np.nonzero(cls[1:] != cls[:-1])[0]]
    expected = np.array([-2.0, 1.0, 1.0 + rm["epsilon"]])
    assert len(transitions) == 3
    assert np.all(np.abs(transitions - expected) <= du + 1e-12)


def test_region_map_adaptive_covers_forward_branch():
    rm = cf.region_map(SC, 1, 1.0, cf.RegionGrid(n_first=121),
                       entropy_policy="adaptive")
    u = rm["state"][:, 0]
    forward = (u > 1.0 + 1e-9) & (u < 5.9)
    assert np.all(rm["class"][forward] == cf.COVERED_STABLE)


def test_region_map_adaptive_system_rejected():
    with pytest.raises(UsageError):
        cf.region_map(EL, 1, (1.0, 0.0), entropy_policy="adaptive")


def test_region_map_system_off_curve_flag():
    rm = cf.region_map(EL, 1, (1.0, 0.0), cf.RegionGrid(n_first=41, n_second=41))
    off = rm["covered_reason"] == "off_curve"
    assert np.all(rm["class"][off] == cf.NOT_ADMISSIBLE)
    assert np.any(rm["class"] == cf.COVERED_STABLE)
