"""Dissipation functionals, the weighted region Pi_a, and constants estimation.

Everything here works on family-1 shock setups; family-n analyses go through
reflected models (see `shockstab.certify`).  All sup/inf estimates are
sampled evidence over explicit grids, not certified constants, and the
report carries the grid metadata needed to reproduce them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from shockstab.errors import InvariantViolation, UsageError
from shockstab.models import (
    as_state,
    in_box,
    quadratic_bounds,
    rel_entropy,
    rel_entropy_flux,
)
from shockstab import wave_curves
from shockstab.numerics import bisect_scalar, bisect_vectorized, integrate

_TINY = 1e-13


# ---------------------------------------------------------------------------
# shock setup
# ---------------------------------------------------------------------------

class ShockSetup:
    """A fixed reference 1-shock (u_L, u_R = S(s0)) with contraction weight a.

    s0 is given in the oriented parameter (always > 0); for base states with
    negative first component the raw curve parameter is -s0.
    """

    def __init__(self, model, u_L, s0: float, a: float, family: int = 1):
        if family != 1:
            raise UsageError(
                "setups are built on family-1 curves; reflect the model for family n"
            )
        if s0 <= 0:
            raise UsageError("shock size s0 must be positive (oriented parameter)")
        if not (0.0 < a < 1.0):
            raise UsageError("weight a must lie in (0, 1)")
        self.model = model
        self.family = 1
        self.u_L = as_state(model, u_L)
        if np.any(model.degenerate(1, self.u_L)):
            raise UsageError("u_L lies on the degenerate manifold")
        self.s0 = float(s0)
        self.a = float(a)
        self.orientation = float(model.orientation(1, self.u_L))
        self.s0_raw = self.orientation * self.s0
        point = wave_curves.shock_point(model, 1, self.u_L, self.s0_raw)
        self.u_R = point.state
        self.sigma_LR = point.speed
        if not wave_curves.lax_admissible(model, 1, self.u_L, self.s0_raw):
            raise UsageError("reference shock is not Lax-admissible")
        if not (np.all(in_box(model, self.u_L)) and np.all(in_box(model, self.u_R))):
            raise UsageError("reference shock leaves the state box")

    # oriented curve helpers from an arbitrary base inside the setup
    def curve_state(self, u, s_oriented):
        raw = self._raw(u, s_oriented)
        return self.model.shock_state(1, u, raw)

    def curve_speed(self, u, s_oriented):
        return self.model.shock_speed(1, u, self._raw(u, s_oriented))

    def curve_speed_deriv_raw(self, u, s_raw):
        return self.model.shock_speed_deriv(1, u, s_raw)

    def s_minus_natural_oriented(self, u):
        u = as_state(self.model, u)
        orient = self.model.orientation(1, u)
        return orient * self.model.s_minus_natural(1, u)

    def _raw(self, u, s_oriented):
        u = as_state(self.model, u)
        return self.model.orientation(1, u) * np.asarray(s_oriented, dtype=float)

    def to_json(self):
        return {
            "model": self.model.to_json(),
            "family": 1,
            "u_L": self.u_L.tolist(),
            "s0": self.s0,
            "a": self.a,
            "u_R": self.u_R.tolist(),
            "sigma_LR": self.sigma_LR,
        }


# ---------------------------------------------------------------------------
# dissipation functionals
# ---------------------------------------------------------------------------

def d_cont(setup: ShockSetup, u):
    """Continuous-state dissipation functional, vectorized over states."""
    m = setup.model
    lam = m.eigenvalue(u, 1)
    right = rel_entropy_flux(m, u, setup.u_R) - lam * rel_entropy(m, u, setup.u_R)
    left = rel_entropy_flux(m, u, setup.u_L) - lam * rel_entropy(m, u, setup.u_L)
    return setup.a * right - left


def d_rh(setup: ShockSetup, u_minus, s_oriented, check_admissible=True):
    """Rankine-Hugoniot dissipation functional for the shock S(u_minus, s).

    u_minus and s broadcast against each other (states on the last axis).
    """
    m = setup.model
    u_minus = as_state(m, u_minus)
    raw = setup._raw(u_minus, s_oriented)
    if check_admissible:
        adm = wave_curves.lax_admissible(m, 1, u_minus, raw)
        if not np.all(adm):
            raise UsageError("(u_minus, s) is not a Lax-admissible shock")
    u_plus = m.shock_state(1, u_minus, raw)
    sigma = m.shock_speed(1, u_minus, raw)
    right = rel_entropy_flux(m, u_plus, setup.u_R) - sigma * rel_entropy(m, u_plus, setup.u_R)
    left = rel_entropy_flux(m, u_minus, setup.u_L) - sigma * rel_entropy(m, u_minus, setup.u_L)
    return setup.a * right - left


# ---------------------------------------------------------------------------
# the region Pi_a
# ---------------------------------------------------------------------------

class PiaRegion:
    """The convex compact region where eta(u|u_L) <= a eta(u|u_R)."""

    def __init__(self, setup: ShockSetup, n_directions: int | None = None):
        self.setup = setup
        n = setup.model.n
        if n_directions is None:
            n_directions = 2 if n == 1 else 256
        if n == 1:
            self.directions = np.array([[1.0], [-1.0]])[: n_directions]
        else:
            ang = 2.0 * np.pi * np.arange(n_directions) / n_directions
            self.directions = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        self._boundary = None
        self._truncated = None

    def defining(self, u):
        s = self.setup
        return rel_entropy(s.model, u, s.u_L) - s.a * rel_entropy(s.model, u, s.u_R)

    def contains(self, u):
        return self.defining(u) <= 0.0

    def boundary(self):
        """Boundary samples found by bisection along each direction from u_L.

        Rays with no sign change inside the box stop at the box edge and are
        flagged as truncated.
        """
        if self._boundary is not None:
            return self._boundary
        s = self.setup
        uL = s.u_L
        box = s.model.state_box
        span = float(np.max(box[:, 1] - box[:, 0]))
        n_dir = len(self.directions)

        # distance to the box edge along each ray
        t_edge = np.full(n_dir, 2.0 * span)
        for i in range(s.model.n):
            d = self.directions[:, i]
            with np.errstate(divide="ignore"):
                t_lo = np.where(d < 0, (box[i, 0] - uL[i]) / d, np.inf)
                t_hi = np.where(d > 0, (box[i, 1] - uL[i]) / d, np.inf)
            t_edge = np.minimum(t_edge, np.minimum(t_lo, t_hi))

        phi_edge = self.defining(uL + t_edge[:, None] * self.directions)
        truncated = phi_edge <= 0.0

        def phi_of(t):
            return self.defining(uL + t[:, None] * self.directions)

        t_star = bisect_vectorized(phi_of, np.zeros(n_dir), t_edge)
        t_star = np.where(truncated, t_edge, t_star)
        self._boundary = uL + t_star[:, None] * self.directions
        self._radii = t_star
        self._truncated = truncated
        return self._boundary

    def truncated(self):
        self.boundary()
        return self._truncated

    def diameter(self) -> float:
        b = self.boundary()
        diff = b[:, None, :] - b[None, :, :]
        return float(np.sqrt(np.max(np.sum(diff**2, axis=-1))))

    def radial_grid(self, n_radii: int = 32):
        """Covering grid: u_L plus points along each ray up to the boundary."""
        self.boundary()
        radii = np.linspace(0.0, 1.0, n_radii + 1)[1:]
        pts = (
            self.setup.u_L
            + (radii[:, None, None] * self._radii[None, :, None]) * self.directions[None, :, :]
        ).reshape(-1, self.setup.model.n)
        return np.concatenate([self.setup.u_L[None, :], pts], axis=0)


def pia_contains(setup: ShockSetup, u):
    return PiaRegion(setup).contains(u)


def pia_boundary(setup: ShockSetup, n_directions: int | None = None):
    return PiaRegion(setup, n_directions).boundary()


def pia_diameter(setup: ShockSetup, n_directions: int | None = None) -> float:
    return PiaRegion(setup, n_directions).diameter()


# ---------------------------------------------------------------------------
# dissipation integrals along the curve
# ---------------------------------------------------------------------------

def shock_dissipation_lhs(model, v, u_minus, s_raw: float, family: int = 1):
    """q(u+;v) - sigma eta(u+|v) - q(u-;v) + sigma eta(u-|v) for u+ = S(u-, s)."""
    u_plus = model.shock_state(family, u_minus, s_raw)
    sigma = model.shock_speed(family, u_minus, s_raw)
    return float(
        rel_entropy_flux(model, u_plus, v)
        - sigma * rel_entropy(model, u_plus, v)
        - rel_entropy_flux(model, u_minus, v)
        + sigma * rel_entropy(model, u_minus, v)
    )


def dissipation_integral(model, v, u_minus, s_raw: float, family: int = 1,
                         tol: float = 1e-10) -> float:
    """Entropy lost traveling along the shock curve from 0 to s.

    Returns the quadrature of sigma'(t) eta(u_-|S(t)); equals
    `shock_dissipation_lhs` for any v (v only enters the left-hand side).
    """
    u_minus = as_state(model, u_minus)

    def integrand(t):
        dsig = model.shock_speed_deriv(family, u_minus, t)
        # eta(u_-|S(t)): relative entropy of the base against the curve point
        eta = rel_entropy(model, u_minus, model.shock_state(family, u_minus, t))
        return dsig * eta

    return integrate(integrand, 0.0, float(s_raw), tol=tol)


def curve_dissipation(setup: ShockSetup, u, s_oriented: float, check: bool = True,
                      check_tol: float = 1e-8) -> float:
    """Net dissipation between the curve points at s and s0 from base u.

    Computed directly as q(S(s); S(s0)) - sigma(s) eta(S(s)|S(s0)) and, when
    check=True, cross-validated against the integral identity
    int_{s0}^{s} sigma'(t) (eta(u|S(t)) - eta(u|S(s0))) dt.
    """
    m = setup.model
    u = as_state(m, u)
    direct = float(_curve_dissipation_direct(setup, u, np.asarray(s_oriented)))
    if check:
        raw0 = float(setup._raw(u, setup.s0))
        raw1 = float(setup._raw(u, s_oriented))
        eta_s0 = float(rel_entropy(m, u, m.shock_state(1, u, raw0)))

        def integrand(t):
            dsig = m.shock_speed_deriv(1, u, t)
            eta = rel_entropy(m, u, m.shock_state(1, u, t))
            return dsig * (eta - eta_s0)

        via_integral = integrate(integrand, raw0, raw1, tol=1e-10)
        if abs(direct - via_integral) > check_tol:
            raise InvariantViolation(
                f"curve dissipation identity violated: {direct} vs {via_integral}"
            )
    return direct


def _curve_dissipation_direct(setup: ShockSetup, u, s_oriented):
    m = setup.model
    raw = setup._raw(u, s_oriented)
    raw0 = setup._raw(u, setup.s0)
    s_state = m.shock_state(1, u, raw)
    s0_state = m.shock_state(1, u, raw0)
    sigma = m.shock_speed(1, u, raw)
    return rel_entropy_flux(m, s_state, s0_state) - sigma * rel_entropy(m, s_state, s0_state)


# ---------------------------------------------------------------------------
# constants estimation
# ---------------------------------------------------------------------------

@dataclass
class ConstantsGrid:
    """Grid densities for the sampled constants; defaults resolve both models."""

    n_directions: int | None = None
    n_radii: int = 32
    n_box: int | None = None
    n_sigma0: int = 64
    n_s: int = 256
    sample_count: int = 4000
    seed: int = 0

    def resolved(self, n_dim: int):
        d = ConstantsGrid(**self.__dict__)
        if d.n_directions is None:
            d.n_directions = 2 if n_dim == 1 else 256
        if d.n_box is None:
            d.n_box = 2001 if n_dim == 1 else 161
        return d

    def to_json(self):
        return dict(self.__dict__)


@dataclass
class ConstantsReport:
    c_star: float
    c_2star: float
    C_star: float
    L: float
    kappa: float
    delta_loc: float
    sigma0: float
    beta: float
    Theta: float
    nu: float
    C1: float
    pia_diameter: float
    sigma0_feasible: bool
    grid: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "c_star": self.c_star,
            "c_2star": self.c_2star,
            "C_star": self.C_star,
            "L": self.L,
            "kappa": self.kappa,
            "delta_loc": self.delta_loc,
            "sigma0": self.sigma0,
            "beta": self.beta,
            "Theta": self.Theta,
            "nu": self.nu,
            "C1": self.C1,
            "pia_diameter": self.pia_diameter,
            "sigma0_feasible": self.sigma0_feasible,
            "grid": self.grid,
        }


def _box_grid(model, n_per_dim):
    axes = [np.linspace(model.state_box[i, 0], model.state_box[i, 1], n_per_dim)
            for i in range(model.n)]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def backward_speed_match(setup: ShockSetup) -> float:
    """Oriented parameter s0* on the backward branch with sigma(s0*) = sigma_LR."""
    m = setup.model
    uL = setup.u_L
    s_mnat = float(setup.s_minus_natural_oriented(uL))

    def level(s_or):
        return float(setup.curve_speed(uL, s_or)) - setup.sigma_LR

    lo = s_mnat
    step = max(abs(s_mnat), setup.s0, 1.0)
    while level(lo) > 0:
        lo -= step
    return bisect_scalar(level, lo, s_mnat, tol=1e-12)


def estimate_constants(setup: ShockSetup, grid: ConstantsGrid | None = None) -> ConstantsReport:
    """Numerically estimate every constant appearing in the contraction proofs."""
    m = setup.model
    g = (grid or ConstantsGrid()).resolved(m.n)
    region = PiaRegion(setup, g.n_directions)
    boundary = region.boundary()
    pia_pts = region.radial_grid(g.n_radii)

    c_star, c_2star = quadratic_bounds(m, sample_count=g.sample_count, seed=g.seed)

    box_pts = _box_grid(m, g.n_box)
    lam_box = m.eigenvalue(box_pts, 1)
    L = float(np.max(np.abs(lam_box)))

    # C*: entropy-flux control ratio over the constrained subset of the complement
    phi = region.defining(box_pts)
    comp = box_pts[phi > 0.0]
    q_l = rel_entropy_flux(m, comp, setup.u_L)
    q_r = rel_entropy_flux(m, comp, setup.u_R)
    e_l = rel_entropy(m, comp, setup.u_L)
    e_r = rel_entropy(m, comp, setup.u_R)
    num = q_l / setup.a - q_r
    den = e_l / setup.a - e_r
    sel = (num <= 0.0) & (np.abs(den) > _TINY)
    C_star = float(np.max(np.abs(num[sel]) / np.abs(den[sel]))) if np.any(sel) else 0.0

    # (sigma0, beta): largest beta over a sigma0 scan making both one-sided
    # entropy-flux bounds hold on Pi_a
    lam_L = float(m.eigenvalue(setup.u_L, 1))
    lam_pia_min = float(np.min(m.eigenvalue(pia_pts, 1)))
    e_l_p = rel_entropy(m, pia_pts, setup.u_L)
    e_r_p = rel_entropy(m, pia_pts, setup.u_R)
    q_l_p = rel_entropy_flux(m, pia_pts, setup.u_L)
    q_r_p = rel_entropy_flux(m, pia_pts, setup.u_R)
    sigma0_grid = setup.sigma_LR + (lam_L - setup.sigma_LR) * np.linspace(
        0.05, 0.95, g.n_sigma0
    )
    sigma0_grid = sigma0_grid[sigma0_grid <= lam_pia_min]
    best_sigma0, best_beta = float("nan"), -np.inf
    okl = e_l_p > _TINY
    okr = e_r_p > _TINY
    for s0c in sigma0_grid:
        r1 = (q_l_p[okl] - s0c * e_l_p[okl]) / e_l_p[okl]
        r2 = (s0c * e_r_p[okr] - q_r_p[okr]) / e_r_p[okr]
        beta_c = min(
            float(np.min(r1)) if r1.size else np.inf,
            float(np.min(r2)) if r2.size else np.inf,
        )
        if beta_c > best_beta:
            best_beta, best_sigma0 = beta_c, float(s0c)
    sigma0_feasible = best_beta > 0.0 and np.isfinite(best_sigma0)

    # kappa / delta_loc from the curve-dissipation lower bounds near and far from s0
    scan_pts = np.concatenate([setup.u_L[None, :], boundary], axis=0)
    neg_cap, pos_cap = wave_curves.curve_extent(m, 1, setup.u_L)
    pos_cap = max(pos_cap, setup.s0)
    s_mnat_or = setup.s_minus_natural_oriented(scan_pts)
    s_pos = np.linspace(0.0, pos_cap, g.n_s)
    s_neg = np.linspace(neg_cap, float(np.max(s_mnat_or)), g.n_s)
    s_all = np.concatenate([s_neg, s_pos])
    U = scan_pts[:, None, :]
    S = s_all[None, :]
    adm = (S >= 0.0) | (S <= s_mnat_or[:, None])
    value = _curve_dissipation_direct(setup, U, S)
    sig = setup.curve_speed(U, S)
    sig0 = setup.curve_speed(U, setup.s0 * np.ones_like(S))
    dsig = np.abs(sig - sig0)
    valid = adm & (dsig > 1e-9)

    near = valid & (np.abs(S - setup.s0) <= 0.499 * setup.s0)
    far = valid & ~near
    ratio_sq = np.where(near, -value / np.maximum(dsig**2, _TINY), np.inf)
    ratio_lin = np.where(far, -value / np.maximum(dsig, _TINY), np.inf)

    # delta_loc: widest window around s0 (capped below s0/2) on which the
    # quadratic bound stays positive
    delta_cap = 0.499 * setup.s0
    deltas = np.linspace(delta_cap / 64, delta_cap, 64)
    delta_loc = 0.0
    for d in deltas:
        window = valid & (np.abs(S - setup.s0) <= d)
        if np.any(window) and np.all(value[window] <= 0):
            rs = -value[window] / np.maximum(dsig[window] ** 2, _TINY)
            if np.min(rs) > 0:
                delta_loc = float(d)
            else:
                break
        else:
            break
    kappa_near = float(np.min(ratio_sq[near])) if np.any(near) else np.inf
    kappa_far = float(np.min(ratio_lin[far])) if np.any(far) else np.inf
    kappa = float(min(kappa_near, kappa_far))

    # Theta, nu, C1 over Pi_a
    s0_star = backward_speed_match(setup)
    mid = 0.5 * (s_mnat_or[: len(scan_pts)] + s0_star)
    sig_half = setup.curve_speed(scan_pts, 0.5 * setup.s0 * np.ones(len(scan_pts)))
    sig_mid = setup.curve_speed(scan_pts, mid)
    sig_ref = setup.curve_speed(scan_pts, setup.s0 * np.ones(len(scan_pts)))
    Theta = float(
        np.min(
            np.minimum(np.abs(sig_half - sig_ref), np.abs(sig_mid - sig_ref))
        )
    )
    eta_mnat = rel_entropy(m, pia_pts, setup.curve_state(
        pia_pts, setup.s_minus_natural_oriented(pia_pts)))
    eta_s0 = rel_entropy(m, pia_pts, setup.curve_state(
        pia_pts, setup.s0 * np.ones(len(pia_pts))))
    nu = float(np.min(eta_mnat - eta_s0))
    C1 = float(np.max(rel_entropy(m, pia_pts, setup.u_R)))

    meta = g.to_json()
    meta.update({
        "pia_points": int(len(pia_pts)),
        "boundary_truncated_rays": int(np.sum(region.truncated())),
        "s0_star": float(s0_star),
    })
    return ConstantsReport(
        c_star=c_star,
        c_2star=c_2star,
        C_star=C_star,
        L=L,
        kappa=kappa,
        delta_loc=delta_loc,
        sigma0=best_sigma0,
        beta=float(best_beta),
        Theta=Theta,
        nu=nu,
        C1=C1,
        pia_diameter=region.diameter(),
        sigma0_feasible=bool(sigma0_feasible),
        grid=meta,
    )
