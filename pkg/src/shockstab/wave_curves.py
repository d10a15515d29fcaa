"""Closed-form shock curves, speeds, critical parameters and admissibility.

Curves are parameterized by the offset of the first state component (w for
elastodynamics, u itself for the scalar law), not by arc length, so the
closed forms stay closed.  For base states with negative first component the
curve orientation flips: the branch along which the speed decreases from the
characteristic speed has s < 0.  The raw-s functions below work in the
signed parameter; ``oriented`` helpers normalize so that "forward" always
means the decreasing-speed side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from shockstab.errors import DegenerateBaseError, InvariantViolation, UsageError
from shockstab.models import as_state, in_box
from shockstab.numerics import bisect_scalar

RH_TOL = 1e-10
BOUNDARY_TOL = 1e-10


@dataclass
class ShockPoint:
    """One point of a shock curve: state, speed and speed derivative."""

    base: np.ndarray
    family: int
    s: float
    state: np.ndarray
    speed: float
    speed_deriv: float


@dataclass
class CriticalParams:
    """Raw critical parameters of a curve from a fixed base state.

    ``s_natural`` is the sign change of the speed derivative, and
    ``s_minus_natural`` the re-entry point of Lax admissibility.  For bases
    with positive first component both are negative and
    s_minus_natural < s_natural < 0; for negative bases the signs flip
    (multiply by ``orientation`` to recover the normalized frame).
    """

    s_natural: float
    s_minus_natural: float
    orientation: float


def _check_base(model, family, u):
    u = as_state(model, u)
    if np.any(model.degenerate(family, u)):
        raise DegenerateBaseError(
            "base state lies on the degenerate manifold; the shock family "
            "has no Lax structure there"
        )
    return u


def shock_point(model, family, u, s: float) -> ShockPoint:
    """Evaluate the family shock curve from base u at parameter s.

    The Rankine-Hugoniot residual of the returned triple is verified to
    RH_TOL.  At s = 0 the speed is the characteristic speed (removable
    singularity of the defining ratio).
    """
    u = as_state(model, u)
    if not np.all(in_box(model, u)):
        raise UsageError("base state outside the model state box")
    state = model.shock_state(family, u, s)
    speed = float(model.shock_speed(family, u, s))
    deriv = float(model.shock_speed_deriv(family, u, s))
    resid = rh_residual(model, u, state, speed)
    if resid > RH_TOL:
        raise InvariantViolation(f"Rankine-Hugoniot residual {resid:.2e}")
    return ShockPoint(base=u, family=family, s=float(s), state=state,
                      speed=speed, speed_deriv=deriv)


def rh_residual(model, u_minus, u_plus, sigma) -> float:
    """Max-norm residual of f(u+) - f(u-) - sigma (u+ - u-)."""
    r = model.flux(u_plus) - model.flux(u_minus) - np.asarray(sigma)[..., np.newaxis] * (
        as_state(model, u_plus) - as_state(model, u_minus)
    )
    return float(np.max(np.abs(r)))


def critical_params(model, family, u, cross_validate=True) -> CriticalParams:
    """Critical parameters s_natural, s_minus_natural for a base state.

    Uses the closed forms (-3w/2, -3w) and, optionally, cross-validates by
    root-finding sigma' = 0 and sigma = lambda on the backward branch.
    """
    u = _check_base(model, family, u)
    s_nat = float(model.s_natural(family, u))
    s_mnat = float(model.s_minus_natural(family, u))
    orient = float(model.orientation(family, u))
    if cross_validate:
        lam = float(model.eigenvalue(u, family))
        span = max(abs(s_mnat), 1.0)

        def dspeed(s):
            return float(model.shock_speed_deriv(family, u, s))

        root = bisect_scalar(dspeed, s_nat - 0.25 * span, s_nat + 0.25 * span,
                             tol=1e-12)
        if abs(root - s_nat) > 1e-8:
            raise InvariantViolation("speed-derivative root disagrees with closed form")

        def level(s):
            return float(model.shock_speed(family, u, s)) - lam

        # bracket straddling s_mnat on the backward branch, valid for either
        # curve orientation
        beyond = s_mnat + 0.25 * (s_mnat - s_nat)
        root2 = bisect_scalar(level, min(beyond, 0.5 * (s_mnat + s_nat)),
                              max(beyond, 0.5 * (s_mnat + s_nat)), tol=1e-12)
        if abs(root2 - s_mnat) > 1e-8:
            raise InvariantViolation("Lax re-entry root disagrees with closed form")
    return CriticalParams(s_natural=s_nat, s_minus_natural=s_mnat, orientation=orient)


def lax_admissible(model, family, u, s, check_characterization=True):
    """Lax admissibility of the curve point at parameter s (vectorized in s).

    Checks the direct inequality lambda(u) >= sigma >= lambda(S(s)) for
    family 1 (reversed for family n) and asserts agreement with the interval
    characterization s in (-inf, s_minus_natural] U [0, inf) up to the
    orientation convention.
    """
    u = _check_base(model, family, u)
    s = np.asarray(s, dtype=float)
    sigma = model.shock_speed(family, u, s)
    lam_base = model.eigenvalue(u, family)
    lam_far = model.eigenvalue(model.shock_state(family, u, s), family)
    if model.speed_trend(family) < 0:
        direct = (lam_base >= sigma - BOUNDARY_TOL) & (sigma >= lam_far - BOUNDARY_TOL)
    else:
        # family-n curves give left states: lambda(S) >= sigma >= lambda(u)
        direct = (lam_far >= sigma - BOUNDARY_TOL) & (sigma >= lam_base - BOUNDARY_TOL)
    if check_characterization:
        orient = model.orientation(family, u)
        s_or = orient * s
        s_mnat_or = orient * model.s_minus_natural(family, u)
        interval = (s_or >= -BOUNDARY_TOL) | (s_or <= s_mnat_or + BOUNDARY_TOL)
        # ignore disagreement within a narrow band around the two boundary
        # points, where the sigma-space and s-space tolerances differ
        band = 1e-8
        near = (np.abs(s_or) <= band) | (np.abs(s_or - s_mnat_or) <= band)
        if np.any((direct != interval) & ~near):
            raise InvariantViolation(
                "direct Lax check disagrees with the s-interval characterization"
            )
    if s.ndim == 0:
        return bool(direct)
    return direct


def oriented_to_raw(model, family, u, s_oriented):
    """Map oriented parameters (forward = decreasing speed) to raw s."""
    u = _check_base(model, family, u)
    return model.orientation(family, u) * np.asarray(s_oriented, dtype=float)


def shock_point_oriented(model, family, u, s_oriented: float) -> ShockPoint:
    """Curve point in the oriented parameter (positive branch is Lax-forward)."""
    return shock_point(model, family, u, float(oriented_to_raw(model, family, u, s_oriented)))


def curve_extent(model, family, u) -> tuple[float, float]:
    """Oriented-parameter interval keeping the curve's first component in the box.

    The curve parameter is a first-component offset, so the cap is exact:
    returns (neg_cap, pos_cap) with neg_cap <= 0 <= pos_cap.  (The second
    component of system curves may leave the box earlier; scans over the
    state box itself are handled separately.)
    """
    u = _check_base(model, family, u)
    w = float(u[..., 0])
    lo, hi = model.state_box[0]
    raw_lo, raw_hi = lo - w, hi - w
    orient = float(model.orientation(family, u))
    if orient >= 0:
        return raw_lo, raw_hi
    return -raw_hi, -raw_lo


def curve_table(model, family, u, s_values):
    """Tabulate the curve at raw parameters: rows for the `curve` CLI command.

    Columns: s, state components, sigma, sigma_prime, lax_admissible.
    """
    u = _check_base(model, family, u)
    s_values = np.asarray(s_values, dtype=float)
    states = model.shock_state(family, u, s_values)
    sigma = model.shock_speed(family, u, s_values)
    sigma_p = model.shock_speed_deriv(family, u, s_values)
    adm = lax_admissible(model, family, u, s_values)
    return {
        "s": s_values,
        "state": np.atleast_2d(states),
        "sigma": sigma,
        "sigma_prime": sigma_p,
        "lax_admissible": adm.astype(int),
    }
