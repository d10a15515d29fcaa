"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest -v tests/test_acceptance.py` (add -s to see the lines on
passing runs).
"""

import time

import numpy as np
import pytest

from shockstab import certify as cf, dissipation as dp, models, sim
from shockstab import wave_curves as wc

SC = models.ScalarCubic()
EL = models.Elastodynamics(m=1.0)


def report(n, ok, detail):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"criterion {n}: {detail}"


def elapsed(t0):
    return time.perf_counter() - t0


def test_criterion_01_elastodynamics_curve_anchors():
    t0 = time.perf_counter()
    cp = wc.critical_params(EL, 1, (1.0, 0.0))
    p = wc.shock_point(EL, 1, (1.0, 0.0), cp.s_minus_natural)
    lam = float(EL.eigenvalue(np.array([1.0, 0.0]), 1))
    err = max(abs(cp.s_natural + 1.5), abs(cp.s_minus_natural + 3.0),
              abs(p.speed - lam), abs(p.speed + 2.0))
    resid = wc.rh_residual(EL, (1.0, 0.0), p.state, p.speed)
    dt = elapsed(t0)
    ok = err <= 1e-8 and resid <= 1e-10 and dt < 1.0
    report(1, ok, f"curve anchors err={err:.2e} rh={resid:.2e} t={dt:.2f}s")


def test_criterion_02_scalar_epsilon_anchor():
    t0 = time.perf_counter()
    eps = cf.compute_epsilon(SC, 1, 1.0).epsilon
    dt = elapsed(t0)
    ok = abs(eps - 3.0) <= 1e-8 and dt < 1.0
    report(2, ok, f"epsilon={eps!r} t={dt:.2f}s")


def test_criterion_03_shock_dissipation_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(42)
    worst = 0.0
    vdep = 0.0
    count = 0
    while count < 1000:
        m = SC if rng.random() < 0.5 else EL
        u = rng.uniform(-2.5, 2.5, m.n)
        if abs(u[0]) < 0.2:
            continue
        s = rng.uniform(-2.0, 2.0)
        v1 = rng.uniform(-2.5, 2.5, m.n)
        v2 = rng.uniform(-2.5, 2.5, m.n)
        lhs1 = dp.shock_dissipation_lhs(m, v1, u, s)
        lhs2 = dp.shock_dissipation_lhs(m, v2, u, s)
        rhs = dp.dissipation_integral(m, v1, u, s)
        worst = max(worst, abs(lhs1 - rhs))
        vdep = max(vdep, abs(lhs1 - lhs2))
        count += 1
    dt = elapsed(t0)
    ok = worst <= 1e-8 and vdep <= 1e-10 and dt < 30.0
    report(3, ok, f"identity={worst:.2e} v-dep={vdep:.2e} t={dt:.1f}s")


def test_criterion_04_backward_branch_dissipation_sign():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst = -np.inf
    for m in (SC, EL):
        count = 0
        while count < 100:
            u = rng.uniform(-2.5, 2.5, m.n)
            if abs(u[0]) < 0.2:
                continue
            smn = float(m.s_minus_natural(1, u))
            worst = max(worst, dp.dissipation_integral(m, u, u, smn))
            count += 1
    dt = elapsed(t0)
    ok = worst <= 1e-10
    report(4, ok, f"max integral={worst:.2e} over 2x100 bases t={dt:.1f}s")


def test_criterion_05_pia_diameter_scaling():
    details = []
    ok = True
    for name, m, uL, s0 in [("scalar", SC, 1.0, 1.0),
                            ("elastodynamics", EL, (1.0, 0.0), 0.5)]:
        avals = np.array([1e-4, 1e-3, 1e-2])
        diams = [dp.pia_diameter(dp.ShockSetup(m, uL, s0, a)) for a in avals]
        slope = float(np.polyfit(np.log(avals), np.log(diams), 1)[0])
        ok = ok and abs(slope - 0.5) <= 0.1
        details.append(f"{name} slope={slope:.3f}")
    report(5, ok, "; ".join(details))


@pytest.fixture(scope="module")
def certified():
    out = {}
    for name, m, uL, s0 in [("scalar", SC, 1.0, 1.0),
                            ("elastodynamics", EL, (1.0, 0.0), 0.5)]:
        t0 = time.perf_counter()
        rep = cf.certify_weight(m, 1, uL, s0)
        out[name] = (m, uL, s0, rep, elapsed(t0))
    return out


def test_criterion_06_weight_certification(certified):
    details = []
    ok = True
    for name, (m, uL, s0, rep, dt) in certified.items():
        good = rep.certified and rep.a_star > 0 and dt < 300.0
        setup = dp.ShockSetup(m, uL, s0, rep.a_star)
        base = cf.scan_weight(setup, cf.CertGrid(), rep.epsilon)
        fine = cf.scan_weight(setup, cf.CertGrid().refined(2), rep.epsilon)
        for rec in (base, fine):
            good = good and rec["dcont_max"] <= 1e-12 and rec["drh_max"] <= 1e-12
        # maxima stable under refinement: within 10% (or both at noise level)
        for key in ("dcont_max", "drh_max"):
            b, f = base[key], fine[key]
            good = good and abs(f - b) <= 0.1 * max(abs(b), 1e-12)
        ok = ok and good
        details.append(f"{name} a*={rep.a_star:.4g} t={dt:.0f}s "
                       f"refine d(cont)={fine['dcont_max'] - base['dcont_max']:.1e}")
    report(6, ok, "; ".join(details))


def test_criterion_07_constructed_entropy_end_to_end():
    t0 = time.perf_counter()
    spec = cf.build_scalar_entropy(1.0, 5.0)
    m = models.ScalarCubic(entropy=spec)
    eps = cf.compute_epsilon(m, 1, 1.0).epsilon
    rep = cf.certify_weight(m, 1, 1.0, 4.0)
    dt = elapsed(t0)
    ok = (spec.slope < 26.0 / 47.0 and eps > 4.0 and rep.certified
          and rep.a_star > 0 and dt < 300.0)
    report(7, ok, f"slope={spec.slope:.4g} eps={eps:.4g} a*={rep.a_star:.4g} "
                  f"t={dt:.0f}s")


def test_criterion_08_scalar_region_map_boundaries():
    rm = cf.region_map(SC, 1, 1.0, cf.RegionGrid(n_first=481))
    u = rm["state"][:, 0]
    cls = rm["class"]
    du = u[1] - u[0]
    present = set(cls) == {cf.NOT_ADMISSIBLE, cf.ADMISSIBLE_NOT_COVERED,
                           cf.COVERED_STABLE}
    transitions = u[np.nonzero(cls[1:] != cls[:-1])[0]]
    expected = np.array([-2.0, 1.0, 1.0 + rm["epsilon"]])
    ok = (present and len(transitions) == 3
          and np.all(np.abs(transitions - expected) <= du + 1e-12))
    report(8, ok, f"boundaries at u={np.round(transitions, 3).tolist()} "
                  f"(cell={du:.4g})")


def test_criterion_09_simulation_contraction():
    setup = dp.ShockSetup(EL, (1.0, 0.0), 0.5, 0.41)

    t0 = time.perf_counter()
    clean = sim.run_simulation(setup, sim.SimConfig(n_cells=2000, cfl=0.45))
    t_clean = elapsed(t0)
    speed_err = abs(clean.front_speed - clean.sigma_LR) / abs(clean.sigma_LR)
    energy_ok = float(np.max(clean.energy)) <= clean.energy[0] + clean.tol_scheme

    pert = sim.Perturbation(amplitude=0.1)
    t0 = time.perf_counter()
    p1 = sim.run_simulation(setup, sim.SimConfig(n_cells=2000, cfl=0.45,
                                                 perturbation=pert))
    t_p1 = elapsed(t0)
    t0 = time.perf_counter()
    p2 = sim.run_simulation(setup, sim.SimConfig(n_cells=4000, cfl=0.45,
                                                 perturbation=pert))
    t_p2 = elapsed(t0)
    diss_frac = float(np.mean(p1.boundary_dissipation <= p1.tol_scheme))
    ratio = p1.max_energy_jump / p2.max_energy_jump
    ok = (speed_err <= 0.02 and energy_ok and diss_frac >= 0.99
          and 1.4 <= ratio <= 2.6
          and max(t_clean, t_p1, t_p2) < 120.0)
    report(9, ok, f"speed_err={speed_err:.2e} energy_ok={energy_ok} "
                  f"diss_frac={diss_frac:.4f} jump_ratio={ratio:.2f} "
                  f"t=({t_clean:.0f},{t_p1:.0f},{t_p2:.0f})s")


def test_criterion_10_reflection_consistency():
    refl = models.reflect(EL)
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(200):
        u = rng.uniform(-2.5, 2.5, 2)
        if abs(u[0]) < 0.2:
            continue
        s = rng.uniform(-2.0, 2.0)
        # family-2 quantities vs mirrored family-1 of the reflection
        worst = max(worst, float(np.max(np.abs(
            EL.shock_state(2, u, s) - refl.shock_state(1, u, s)))))
        worst = max(worst, abs(float(EL.shock_speed(2, u, s))
                               + float(refl.shock_speed(1, u, s))))
        worst = max(worst, abs(float(EL.eigenvalue(u, 2))
                               + float(refl.eigenvalue(u, 1))))
    s_grid = np.linspace(-4.0, 3.0, 701)
    adm2 = wc.lax_admissible(EL, 2, (1.0, 0.0), s_grid)
    adm1 = wc.lax_admissible(refl, 1, (1.0, 0.0), s_grid)
    same_adm = bool(np.all(adm2 == adm1))
    cp2 = wc.critical_params(EL, 2, (1.0, 0.0))
    cp1 = wc.critical_params(refl, 1, (1.0, 0.0))
    worst = max(worst, abs(cp2.s_natural - cp1.s_natural),
                abs(cp2.s_minus_natural - cp1.s_minus_natural))
    ok = worst <= 1e-12 and same_adm
    report(10, ok, f"max deviation={worst:.2e} admissibility match={same_adm}")
