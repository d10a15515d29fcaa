"""Numerical certification of the contraction weight and stability-region maps.

`certify_weight` searches for the largest weight a such that both
dissipation functionals are nonpositive on sampled grids (a covering of the
region Pi_a for the continuous functional, and its product with an
admissible shock-parameter grid for the jump functional).  Family-n requests
are served by reflecting the model and analyzing family 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from shockstab.errors import CertificationFailure, UsageError
from shockstab.models import EntropySpec, ScalarCubic, as_state, reflect, rel_entropy
from shockstab import wave_curves
from shockstab.dissipation import PiaRegion, ShockSetup, d_cont, d_rh
from shockstab.numerics import bisect_scalar

PASS_TOL = 1e-12


# ---------------------------------------------------------------------------
# epsilon: the moderate-strength threshold
# ---------------------------------------------------------------------------

@dataclass
class EpsilonResult:
    epsilon: float
    truncated: bool
    target_level: float

    def __float__(self):
        return self.epsilon


def compute_epsilon(model, family, u_L) -> EpsilonResult:
    """Solve eta(u_L|S(eps)) = eta(u_L|S(s_minus_natural)) for eps > 0.

    The level is unique by the monotonicity of s -> eta(u|S(s)); solved by
    bisection in the oriented parameter.  If the level is unreachable within
    the curve extent, returns the cap with the truncated flag set.
    """
    if family != 1:
        return compute_epsilon(reflect(model), 1, u_L)
    u_L = as_state(model, u_L)
    if np.any(model.degenerate(1, u_L)):
        raise UsageError("u_L lies on the degenerate manifold")
    orient = float(model.orientation(1, u_L))
    s_mnat_or = orient * float(model.s_minus_natural(1, u_L))

    def level(s_or):
        state = model.shock_state(1, u_L, orient * s_or)
        return float(rel_entropy(model, u_L, state))

    target = level(s_mnat_or)
    _, pos_cap = wave_curves.curve_extent(model, 1, u_L)
    if level(pos_cap) < target:
        return EpsilonResult(epsilon=pos_cap, truncated=True, target_level=target)
    eps = bisect_scalar(lambda s: level(s) - target, 0.0, pos_cap, tol=1e-12)
    return EpsilonResult(epsilon=float(eps), truncated=False, target_level=target)


# ---------------------------------------------------------------------------
# weight certification
# ---------------------------------------------------------------------------

@dataclass
class CertGrid:
    n_directions: int | None = None
    n_radii: int = 24
    n_s: int = 160
    refine_levels: int = 3
    refine_factor: int = 4

    def resolved(self, n_dim):
        g = CertGrid(**self.__dict__)
        if g.n_directions is None:
            g.n_directions = 2 if n_dim == 1 else 96
        return g

    def refined(self, factor: int):
        g = CertGrid(**self.__dict__)
        if g.n_directions is not None:
            g.n_directions *= factor
        g.n_radii *= factor
        g.n_s *= factor
        return g

    def to_json(self):
        return dict(self.__dict__)


@dataclass
class SearchSpec:
    a_min: float = 1e-8
    a_max: float = 1.0 - 1e-8
    steps: int = 30
    # candidates passing the base grid are re-verified on a grid refined by
    # this factor, so the certified weight is stable under refinement
    verify_refine: int = 2
    grid: CertGrid = field(default_factory=CertGrid)

    def to_json(self):
        d = dict(self.__dict__)
        d["grid"] = self.grid.to_json()
        return d


@dataclass
class CertificationReport:
    a_star: float | None
    family: int
    a_star_reciprocal: float | None
    epsilon: float
    epsilon_truncated: bool
    moderate_strength_ok: bool
    records: list
    search: dict
    setup: dict

    @property
    def certified(self):
        return self.a_star is not None

    def to_json(self):
        return {
            "a_star": self.a_star,
            "family": self.family,
            "a_star_reciprocal": self.a_star_reciprocal,
            "epsilon": self.epsilon,
            "epsilon_truncated": self.epsilon_truncated,
            "moderate_strength_ok": self.moderate_strength_ok,
            "records": self.records,
            "search": self.search,
            "setup": self.setup,
        }


def _local_stencil(n_dim):
    if n_dim == 1:
        return np.array([[-1.0], [-0.5], [0.5], [1.0]])
    ax = np.array([-1.0, 0.0, 1.0])
    g = np.stack(np.meshgrid(ax, ax, indexing="ij"), axis=-1).reshape(-1, 2)
    return g[np.any(g != 0.0, axis=1)]


def scan_weight(setup: ShockSetup, grid: CertGrid, epsilon: float) -> dict:
    """Grid maxima of both dissipation functionals for one candidate weight.

    Returns a record with the maxima, their witnesses and the per-level
    refinement history.
    """
    m = setup.model
    g = grid.resolved(m.n)
    region = PiaRegion(setup, g.n_directions)
    pts = region.radial_grid(g.n_radii)
    scale = max(region.diameter() / max(g.n_radii, 1), 1e-14)
    stencil = _local_stencil(m.n)

    # --- D_cont over Pi_a with local refinement around the top decile
    vals = np.asarray(d_cont(setup, pts))
    dcont_levels = [float(np.max(vals))]
    cur_pts, cur_vals, cur_scale = pts, vals, scale
    for _ in range(g.refine_levels):
        cut = np.quantile(cur_vals, 0.9)
        seeds = cur_pts[cur_vals >= cut]
        cand = (seeds[:, None, :] + cur_scale * stencil[None, :, :]).reshape(-1, m.n)
        cand = cand[region.contains(cand)]
        if len(cand) == 0:
            break
        cvals = np.asarray(d_cont(setup, cand))
        cur_pts = np.concatenate([seeds, cand])
        cur_vals = np.concatenate([cur_vals[cur_vals >= cut], cvals])
        cur_scale /= g.refine_factor
        dcont_levels.append(float(np.max(cur_vals)))
    i = int(np.argmax(cur_vals))
    dcont_max = float(cur_vals[i])
    dcont_arg = cur_pts[i].tolist()

    # --- D_RH over Pi_a x admissible s-grid
    neg_cap, pos_cap = wave_curves.curve_extent(m, 1, setup.u_L)
    s_extent = min(2.0 * epsilon, pos_cap)
    s_mnat_or = np.asarray(setup.s_minus_natural_oriented(pts))
    s_pos = np.linspace(0.0, s_extent, g.n_s)
    s_pos[np.argmin(np.abs(s_pos - setup.s0))] = setup.s0
    s_neg = np.linspace(neg_cap, float(np.max(s_mnat_or)), g.n_s)
    s_all = np.concatenate([s_neg, s_pos])

    def drh_masked(u_pts, s_grid):
        mnat = np.asarray(setup.s_minus_natural_oriented(u_pts))
        adm = (s_grid[None, :] >= 0.0) | (s_grid[None, :] <= mnat[:, None])
        v = np.asarray(
            d_rh(setup, u_pts[:, None, :], s_grid[None, :], check_admissible=False)
        )
        return np.where(adm, v, -np.inf)

    v = drh_masked(pts, s_all)
    drh_levels = [float(np.max(v))]
    flat = np.argmax(v)
    iu, isx = np.unravel_index(flat, v.shape)
    drh_max = float(v[iu, isx])
    drh_arg_u, drh_arg_s = pts[iu], float(s_all[isx])
    s_scale = s_extent / g.n_s
    u_scale = scale
    for _ in range(g.refine_levels):
        cut = np.quantile(v[np.isfinite(v)], 0.9)
        sel_u, sel_s = np.nonzero(v >= cut)
        # cap the refinement set to keep the scan bounded
        if len(sel_u) > 4000:
            order = np.argsort(v[sel_u, sel_s])[::-1][:4000]
            sel_u, sel_s = sel_u[order], sel_s[order]
        seeds_u = pts[sel_u]
        seeds_s = s_all[sel_s]
        offs = np.array([-1.0, -0.5, 0.5, 1.0])
        cand_u = np.repeat(seeds_u, len(offs), axis=0)
        cand_s = (seeds_s[:, None] + s_scale * offs[None, :]).reshape(-1)
        keep = region.contains(cand_u)
        cand_u, cand_s = cand_u[keep], cand_s[keep]
        if len(cand_u) == 0:
            break
        mnat = np.asarray(setup.s_minus_natural_oriented(cand_u))
        adm = (cand_s >= 0.0) | (cand_s <= mnat)
        cand_u, cand_s = cand_u[adm], cand_s[adm]
        if len(cand_u) == 0:
            break
        cvals = np.asarray(d_rh(setup, cand_u, cand_s, check_admissible=False))
        j = int(np.argmax(cvals))
        if cvals[j] > drh_max:
            drh_max = float(cvals[j])
            drh_arg_u, drh_arg_s = cand_u[j], float(cand_s[j])
        drh_levels.append(drh_max)
        s_scale /= g.refine_factor
        u_scale /= g.refine_factor

    return {
        "a": setup.a,
        "dcont_max": dcont_max,
        "dcont_argmax": dcont_arg,
        "dcont_refinement": dcont_levels,
        "drh_max": drh_max,
        "drh_argmax_state": np.asarray(drh_arg_u).tolist(),
        "drh_argmax_s": drh_arg_s,
        "drh_refinement": drh_levels,
        "passed": bool(dcont_max <= PASS_TOL and drh_max <= PASS_TOL),
    }


def certify_weight(model, family, u_L, s0: float,
                   search: SearchSpec | None = None) -> CertificationReport:
    """Bisection search (on a log scale) for the largest certifiable weight.

    For family n the model is reflected and family 1 analyzed; the report
    then also carries the reciprocal weight 1/a* relevant to the n-family
    normalization.
    """
    if family != 1:
        rep = certify_weight(reflect(model), 1, u_L, s0, search)
        return CertificationReport(
            a_star=rep.a_star,
            family=family,
            a_star_reciprocal=(1.0 / rep.a_star) if rep.a_star else None,
            epsilon=rep.epsilon,
            epsilon_truncated=rep.epsilon_truncated,
            moderate_strength_ok=rep.moderate_strength_ok,
            records=rep.records,
            search=rep.search,
            setup=rep.setup,
        )
    spec = search or SearchSpec()
    eps = compute_epsilon(model, 1, u_L)
    moderate_ok = s0 < eps.epsilon

    records = []

    def attempt(a):
        setup = ShockSetup(model, u_L, s0, a)
        rec = scan_weight(setup, spec.grid, eps.epsilon)
        rec["refined"] = False
        records.append(rec)
        if rec["passed"] and spec.verify_refine > 1:
            fine = scan_weight(setup, spec.grid.refined(spec.verify_refine),
                               eps.epsilon)
            fine["refined"] = True
            records.append(fine)
            return fine["passed"], setup
        return rec["passed"], setup

    lo, hi = np.log(spec.a_min), np.log(spec.a_max)
    ok_lo, setup0 = attempt(spec.a_min)
    if not ok_lo:
        report = CertificationReport(
            a_star=None, family=1, a_star_reciprocal=None,
            epsilon=eps.epsilon, epsilon_truncated=eps.truncated,
            moderate_strength_ok=moderate_ok, records=records,
            search=spec.to_json(), setup=setup0.to_json(),
        )
        raise CertificationFailure(report)
    ok_hi, _ = attempt(spec.a_max)
    if ok_hi:
        a_star = spec.a_max
    else:
        for _ in range(spec.steps):
            mid = 0.5 * (lo + hi)
            ok, _ = attempt(float(np.exp(mid)))
            if ok:
                lo = mid
            else:
                hi = mid
        a_star = float(np.exp(lo))
    setup_star = ShockSetup(model, u_L, s0, a_star)
    return CertificationReport(
        a_star=a_star,
        family=1,
        a_star_reciprocal=None,
        epsilon=eps.epsilon,
        epsilon_truncated=eps.truncated,
        moderate_strength_ok=moderate_ok,
        records=records,
        search=spec.to_json(),
        setup=setup_star.to_json(),
    )


# ---------------------------------------------------------------------------
# scalar entropy construction
# ---------------------------------------------------------------------------

def build_scalar_entropy(u_L: float, u_R: float, box=(-6.0, 6.0)) -> EntropySpec:
    """Construct a piecewise entropy making the shock (u_L, u_R) certifiable.

    Picks the flat-slope parameter small enough that the moderate-strength
    threshold exceeds the shock size, starting from half the analytic
    feasibility estimate and halving until all verified conditions hold.
    """
    if not (u_L > 0 and u_R > u_L):
        raise UsageError("normalized orientation requires 0 < u_L < u_R")
    s0 = u_R - u_L
    s_state = -2.0 * u_L  # backward Lax re-entry state S(s_minus_natural)
    slope = 0.5 * min(1.0, s_state**2 / (2.0 * s0**2))
    for _ in range(80):
        spec = EntropySpec(kind="piecewise", slope=slope, anchor=u_L)
        model = ScalarCubic(box=box, entropy=spec)
        hess_ok = bool(
            np.all(model.entropy_hess(np.linspace(box[0], box[1], 101)) > 0)
        )
        e_ref = float(rel_entropy(model, u_L, u_R))
        closed = 0.5 * slope * s0**2
        closed_ok = abs(e_ref - closed) <= 1e-9 * max(closed, 1.0)
        barrier = float(rel_entropy(model, u_L, s_state))
        eps = compute_epsilon(model, 1, u_L)
        if hess_ok and closed_ok and e_ref < barrier and eps.epsilon > s0:
            return spec
        if eps.truncated and eps.epsilon <= s0:
            # the threshold is capped by the box, not the slope
            break
        slope *= 0.5
    raise CertificationFailure("no feasible entropy slope found")


# ---------------------------------------------------------------------------
# stability-region maps
# ---------------------------------------------------------------------------

NOT_ADMISSIBLE = "NOT_ADMISSIBLE"
ADMISSIBLE_NOT_COVERED = "ADMISSIBLE_NOT_COVERED"
COVERED_STABLE = "COVERED_STABLE"


@dataclass
class RegionGrid:
    """Candidate-state grid for region maps; defaults span the model box."""

    n_first: int = 241
    n_second: int = 241
    v_tol: float | None = None

    def to_json(self):
        return dict(self.__dict__)


def region_map(model, family, u_base, grid: RegionGrid | None = None,
               entropy_policy: str = "fixed"):
    """Classify candidate states as targets of a shock from a fixed base.

    Each grid state lands in exactly one class: NOT_ADMISSIBLE (no Lax shock
    from the base, including off-curve system states), ADMISSIBLE_NOT_COVERED
    (backward branch, or forward beyond the moderate-strength threshold under
    a fixed entropy), or COVERED_STABLE.  entropy_policy="adaptive" (scalar
    only) rebuilds the entropy per target so every forward shock is covered.
    """
    if entropy_policy not in ("fixed", "adaptive"):
        raise UsageError(f"unknown entropy policy {entropy_policy!r}")
    if family != 1:
        return region_map(reflect(model), 1, u_base, grid, entropy_policy)
    if entropy_policy == "adaptive" and model.n != 1:
        raise UsageError("adaptive entropy policy applies to the scalar model only")
    g = grid or RegionGrid()
    u_base = as_state(model, u_base)
    if np.any(model.degenerate(1, u_base)):
        raise UsageError("base state lies on the degenerate manifold")
    orient = float(model.orientation(1, u_base))
    s_mnat_or = orient * float(model.s_minus_natural(1, u_base))
    eps = compute_epsilon(model, 1, u_base)
    box = model.state_box

    first = np.linspace(box[0, 0], box[0, 1], g.n_first)
    if model.n == 1:
        states = first[:, None]
        s_raw = first - float(u_base[0])
        on_curve = np.ones(len(states), dtype=bool)
        resid = np.zeros(len(states))
    else:
        second = np.linspace(box[1, 0], box[1, 1], g.n_second)
        W, V = np.meshgrid(first, second, indexing="ij")
        states = np.stack([W.ravel(), V.ravel()], axis=-1)
        s_raw = states[:, 0] - float(u_base[0])
        curve = model.shock_state(1, u_base, s_raw)
        resid = np.abs(states[:, 1] - curve[:, 1])
        v_tol = g.v_tol if g.v_tol is not None else 0.5 * (second[1] - second[0])
        on_curve = resid <= v_tol

    s_or = orient * s_raw
    classes = np.full(len(states), NOT_ADMISSIBLE, dtype=object)
    reasons = np.full(len(states), "", dtype=object)
    reasons[~on_curve] = "off_curve"
    excluded = on_curve & (s_or > s_mnat_or) & (s_or < 0.0)
    reasons[excluded] = "excluded_band"
    backward = on_curve & (s_or <= s_mnat_or)
    classes[backward] = ADMISSIBLE_NOT_COVERED
    reasons[backward] = "backward_branch"
    forward = on_curve & (s_or >= 0.0)
    cov = forward & (s_or < eps.epsilon)
    classes[cov] = COVERED_STABLE
    reasons[cov] = "moderate_strength"
    beyond = forward & ~cov
    if entropy_policy == "adaptive":
        base_val = float(u_base[0]) * orient
        for i in np.nonzero(beyond)[0]:
            # normalized frame: base positive, target further from the origin
            try:
                spec = build_scalar_entropy(base_val, base_val + s_or[i],
                                            box=tuple(model.state_box[0]))
            except CertificationFailure:
                # curve leaves the box before the threshold can cover the shock
                classes[i] = ADMISSIBLE_NOT_COVERED
                reasons[i] = "beyond_epsilon"
                continue
            adapted = ScalarCubic(box=tuple(model.state_box[0]), entropy=spec)
            eps_i = compute_epsilon(adapted, 1, abs(float(u_base[0])))
            if eps_i.epsilon > s_or[i]:
                classes[i] = COVERED_STABLE
                reasons[i] = "adaptive_entropy"
            else:
                classes[i] = ADMISSIBLE_NOT_COVERED
                reasons[i] = "beyond_epsilon"
    else:
        classes[beyond] = ADMISSIBLE_NOT_COVERED
        reasons[beyond] = "beyond_epsilon"

    return {
        "state": states,
        "class": classes,
        "s_param": s_or,
        "covered_reason": reasons,
        "epsilon": eps.epsilon,
        "grid": g.to_json(),
    }
