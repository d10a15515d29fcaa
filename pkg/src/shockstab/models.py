"""Concrete conservation-law systems and their entropy machinery.

Two systems are instantiated:

* ``ScalarCubic``      -- u_t + (-u^3)_x = 0, a convex-concave scalar law.
* ``Elastodynamics``   -- w_t - v_x = 0, v_t + p(w)_x = 0 with
                          p(w) = -w^3 - m w, m > 0.

Both carry closed-form entropy pairs, eigenstructure and shock curves.
``ReflectedModel`` wraps any model with the flux negated (x -> -x), which
turns family-n objects into family-1 objects of the reflection; every
downstream module accepts reflected models unchanged.

States are numpy arrays whose last axis has length ``model.n``.  All
operations broadcast over leading axes and are pure, so models are freely
shareable between threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PPoly

from shockstab.errors import UsageError, InvariantViolation


# ---------------------------------------------------------------------------
# entropy specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EntropySpec:
    """Choice of entropy for a model.

    kind "canonical": u^2/2 for the scalar law, v^2/2 + w^4/4 + m w^2/2 for
    elastodynamics.  kind "piecewise" (scalar only): a strictly convex
    entropy defined through its second derivative, equal to 1 left of 0,
    affine down to ``slope`` on [0, anchor], and constantly ``slope`` beyond.
    """

    kind: str = "canonical"
    slope: float = 1.0
    anchor: float = 1.0

    def __post_init__(self):
        if self.kind not in ("canonical", "piecewise"):
            raise UsageError(f"unknown entropy kind {self.kind!r}")
        if self.kind == "piecewise":
            if not (0.0 < self.slope <= 1.0):
                raise UsageError("piecewise entropy needs slope in (0, 1]")
            if self.anchor <= 0.0:
                raise UsageError("piecewise entropy needs anchor > 0")

    def to_json(self):
        if self.kind == "canonical":
            return "canonical"
        return {"kind": "piecewise", "slope": self.slope, "anchor": self.anchor}


def _ppoly_times_poly(pp: PPoly, coeffs) -> PPoly:
    """Multiply a piecewise polynomial by a global polynomial (descending coeffs)."""
    breaks = pp.x
    pieces = []
    for i in range(pp.c.shape[1]):
        # shift the global polynomial to the local variable xi = x - breaks[i]
        shifted = np.poly1d(coeffs)(np.poly1d([1.0, breaks[i]]))
        prod = np.convolve(pp.c[:, i], shifted.coeffs)
        pieces.append(prod)
    deg = max(len(p) for p in pieces)
    c = np.zeros((deg, len(pieces)))
    for i, p in enumerate(pieces):
        c[deg - len(p):, i] = p
    return PPoly(c, breaks, extrapolate=True)


class _PiecewiseEntropy:
    """Exact piecewise-polynomial entropy pair for the scalar cubic flux.

    The second derivative is piecewise affine, so the entropy is piecewise
    cubic and the entropy flux (antiderivative of eta'(s) f'(s)) is piecewise
    quintic; both are held as PPoly objects with exact breakpoints.
    """

    def __init__(self, slope: float, anchor: float, box_halfwidth: float):
        # keep the outer breakpoints tight: wide pieces blow up the local
        # coefficients of the quintic entropy flux and cancellation destroys
        # accuracy; extrapolation beyond the edges is exact anyway because
        # the end pieces already carry the constant-curvature polynomials
        edge = max(box_halfwidth, anchor) + 2.0
        breaks = np.array([-edge, 0.0, anchor, edge])
        c2 = np.array([
            [0.0, (slope - 1.0) / anchor, 0.0],
            [1.0, 1.0, slope],
        ])
        self.eta2 = PPoly(c2, breaks, extrapolate=True)
        eta1 = self.eta2.antiderivative()
        eta1.c[-1, :] -= eta1(0.0)
        self.eta1 = eta1
        eta0 = self.eta1.antiderivative()
        eta0.c[-1, :] -= eta0(0.0)
        self.eta0 = eta0
        # q' = eta'(s) * f'(s) with f'(s) = -3 s^2
        q1 = _ppoly_times_poly(self.eta1, [-3.0, 0.0, 0.0])
        q0 = q1.antiderivative()
        q0.c[-1, :] -= q0(0.0)
        self.q0 = q0


# ---------------------------------------------------------------------------
# state helpers
# ---------------------------------------------------------------------------

def as_state(model, u) -> np.ndarray:
    """Coerce scalars / sequences to a state array and check the dimension."""
    arr = np.asarray(u, dtype=float)
    if model.n == 1 and (arr.ndim == 0 or arr.shape[-1] != 1):
        arr = arr[..., np.newaxis]
    if arr.shape[-1] != model.n:
        raise UsageError(
            f"state has dimension {arr.shape[-1]}, model expects {model.n}"
        )
    return arr


def in_box(model, u) -> np.ndarray:
    u = as_state(model, u)
    box = model.state_box
    ok = np.ones(u.shape[:-1], dtype=bool)
    for i in range(model.n):
        ok &= (u[..., i] >= box[i, 0]) & (u[..., i] <= box[i, 1])
    return ok


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------

class ScalarCubic:
    """Scalar conservation law with flux f(u) = -u^3 (convex-concave)."""

    kind = "scalar_cubic"
    n = 1

    def __init__(self, box=(-6.0, 6.0), entropy: EntropySpec | None = None):
        self.state_box = np.array([box], dtype=float)
        self.entropy_spec = entropy or EntropySpec()
        if self.entropy_spec.kind == "piecewise":
            half = float(np.max(np.abs(self.state_box)))
            self._pw = _PiecewiseEntropy(
                self.entropy_spec.slope, self.entropy_spec.anchor, half
            )
        else:
            self._pw = None

    # -- flux and eigenstructure ------------------------------------------
    def flux(self, u):
        u = as_state(self, u)
        return -u**3

    def flux_jac(self, u):
        u = as_state(self, u)
        return (-3.0 * u**2)[..., np.newaxis]

    def eigenvalue(self, u, family=1):
        self._check_family(family)
        u = as_state(self, u)
        return -3.0 * u[..., 0] ** 2

    def eigenvector(self, u, family=1):
        self._check_family(family)
        u = as_state(self, u)
        return np.ones_like(u)

    def max_abs_speed(self, u):
        u = as_state(self, u)
        return 3.0 * u[..., 0] ** 2

    # -- entropy pair ------------------------------------------------------
    def entropy(self, u):
        x = as_state(self, u)[..., 0]
        if self._pw is None:
            return 0.5 * x**2
        return self._pw.eta0(x)

    def entropy_grad(self, u):
        x = as_state(self, u)[..., 0]
        g = x if self._pw is None else self._pw.eta1(x)
        return np.asarray(g)[..., np.newaxis]

    def entropy_hess(self, u):
        x = as_state(self, u)[..., 0]
        h = np.ones_like(x) if self._pw is None else self._pw.eta2(x)
        return np.asarray(h)[..., np.newaxis, np.newaxis]

    def entropy_flux(self, u):
        x = as_state(self, u)[..., 0]
        if self._pw is None:
            return -0.75 * x**4
        return self._pw.q0(x)

    # -- shock curve (family 1) -------------------------------------------
    def shock_state(self, family, u, s):
        self._check_family(family)
        u = as_state(self, u)
        s = np.asarray(s, dtype=float)
        return (u[..., 0] + s)[..., np.newaxis]

    def shock_speed(self, family, u, s):
        self._check_family(family)
        x = as_state(self, u)[..., 0]
        s = np.asarray(s, dtype=float)
        return -(s**2 + 3.0 * x * s + 3.0 * x**2)

    def shock_speed_deriv(self, family, u, s):
        self._check_family(family)
        x = as_state(self, u)[..., 0]
        s = np.asarray(s, dtype=float)
        return -(2.0 * s + 3.0 * x)

    def s_natural(self, family, u):
        self._check_family(family)
        return -1.5 * as_state(self, u)[..., 0]

    def s_minus_natural(self, family, u):
        self._check_family(family)
        return -3.0 * as_state(self, u)[..., 0]

    def orientation(self, family, u):
        self._check_family(family)
        return np.sign(as_state(self, u)[..., 0])

    def degenerate(self, family, u):
        """True where the base state sits on the degenerate manifold {0}."""
        self._check_family(family)
        return as_state(self, u)[..., 0] == 0.0

    def speed_trend(self, family):
        self._check_family(family)
        return -1

    def field_type(self, family):
        self._check_family(family)
        return "convex-concave"

    def _check_family(self, family):
        if family != 1:
            raise UsageError(f"scalar model has a single family, got {family}")

    def to_json(self):
        return {
            "kind": "scalar_cubic",
            "box": self.state_box.tolist(),
            "entropy": self.entropy_spec.to_json(),
        }


class Elastodynamics:
    """2x2 system w_t - v_x = 0, v_t + p(w)_x = 0 with p(w) = -w^3 - m w.

    States are ordered (w, v).  The sound speed is c(w) = sqrt(3 w^2 + m),
    eigenvalues -c, +c.  The family-1 field is convex-concave and the
    family-2 field concave-convex, both degenerate on {w = 0}.
    """

    kind = "elastodynamics"
    n = 2

    def __init__(self, m=1.0, box=((-5.0, 5.0), (-5.0, 5.0)),
                 entropy: EntropySpec | None = None):
        if m <= 0:
            raise UsageError("elastic modulus m must be positive")
        spec = entropy or EntropySpec()
        if spec.kind != "canonical":
            raise UsageError("elastodynamics supports the canonical entropy only")
        self.m = float(m)
        self.state_box = np.array(box, dtype=float)
        self.entropy_spec = spec

    def p(self, w):
        return -(w**3) - self.m * w

    def c(self, w):
        return np.sqrt(3.0 * w**2 + self.m)

    # -- flux and eigenstructure ------------------------------------------
    def flux(self, u):
        u = as_state(self, u)
        w, v = u[..., 0], u[..., 1]
        return np.stack([-v, self.p(w)], axis=-1)

    def flux_jac(self, u):
        u = as_state(self, u)
        w = u[..., 0]
        z = np.zeros_like(w)
        row0 = np.stack([z, -np.ones_like(w)], axis=-1)
        row1 = np.stack([-3.0 * w**2 - self.m, z], axis=-1)
        return np.stack([row0, row1], axis=-2)

    def eigenvalue(self, u, family):
        self._check_family(family)
        c = self.c(as_state(self, u)[..., 0])
        return -c if family == 1 else c

    def eigenvector(self, u, family):
        self._check_family(family)
        u = as_state(self, u)
        c = self.c(u[..., 0])
        first = np.ones_like(c) if family == 1 else -np.ones_like(c)
        return np.stack([first, c], axis=-1)

    def max_abs_speed(self, u):
        return self.c(as_state(self, u)[..., 0])

    # -- entropy pair ------------------------------------------------------
    def entropy(self, u):
        u = as_state(self, u)
        w, v = u[..., 0], u[..., 1]
        return 0.5 * v**2 + 0.25 * w**4 + 0.5 * self.m * w**2

    def entropy_grad(self, u):
        u = as_state(self, u)
        w, v = u[..., 0], u[..., 1]
        return np.stack([w**3 + self.m * w, v], axis=-1)

    def entropy_hess(self, u):
        u = as_state(self, u)
        w = u[..., 0]
        z = np.zeros_like(w)
        row0 = np.stack([3.0 * w**2 + self.m, z], axis=-1)
        row1 = np.stack([z, np.ones_like(w)], axis=-1)
        return np.stack([row0, row1], axis=-2)

    def entropy_flux(self, u):
        # q = v * p(w), the exact flux compatible with the canonical entropy
        u = as_state(self, u)
        return u[..., 1] * self.p(u[..., 0])

    # -- shock curves ------------------------------------------------------
    def _g(self, w, s):
        # -(p(w+s) - p(w))/s simplifies to this polynomial, positive for all s
        return s**2 + 3.0 * w * s + 3.0 * w**2 + self.m

    def shock_state(self, family, u, s):
        self._check_family(family)
        u = as_state(self, u)
        w, v = u[..., 0], u[..., 1]
        s = np.asarray(s, dtype=float)
        root = np.sqrt(self._g(w, s))
        sign = 1.0 if family == 1 else -1.0
        w_new, v_new = np.broadcast_arrays(w + s, v + sign * s * root)
        return np.stack([w_new, v_new], axis=-1)

    def shock_speed(self, family, u, s):
        self._check_family(family)
        w = as_state(self, u)[..., 0]
        s = np.asarray(s, dtype=float)
        root = np.sqrt(self._g(w, s))
        return -root if family == 1 else root

    def shock_speed_deriv(self, family, u, s):
        self._check_family(family)
        w = as_state(self, u)[..., 0]
        s = np.asarray(s, dtype=float)
        d = (2.0 * s + 3.0 * w) / (2.0 * np.sqrt(self._g(w, s)))
        return -d if family == 1 else d

    def s_natural(self, family, u):
        self._check_family(family)
        return -1.5 * as_state(self, u)[..., 0]

    def s_minus_natural(self, family, u):
        self._check_family(family)
        return -3.0 * as_state(self, u)[..., 0]

    def orientation(self, family, u):
        self._check_family(family)
        return np.sign(as_state(self, u)[..., 0])

    def degenerate(self, family, u):
        self._check_family(family)
        return as_state(self, u)[..., 0] == 0.0

    def speed_trend(self, family):
        self._check_family(family)
        return -1 if family == 1 else 1

    def field_type(self, family):
        self._check_family(family)
        return "convex-concave" if family == 1 else "concave-convex"

    def _check_family(self, family):
        if family not in (1, 2):
            raise UsageError(f"family must be 1 or 2, got {family}")

    def to_json(self):
        return {
            "kind": "elastodynamics",
            "m": self.m,
            "box": self.state_box.tolist(),
            "entropy": self.entropy_spec.to_json(),
        }


class ReflectedModel:
    """The model obtained from u(t, x) -> u(t, -x): flux and speeds negated.

    Family i of the reflection corresponds to family n+1-i of the inner
    model, so family-n analyses of a model are family-1 analyses of its
    reflection.
    """

    kind = "reflected"

    def __init__(self, inner):
        self.inner = inner
        self.n = inner.n
        self.state_box = inner.state_box
        self.entropy_spec = inner.entropy_spec

    def _map(self, family):
        mapped = self.n + 1 - family
        if not (1 <= family <= self.n):
            raise UsageError(f"family must be in 1..{self.n}, got {family}")
        return mapped

    def flux(self, u):
        return -self.inner.flux(u)

    def flux_jac(self, u):
        return -self.inner.flux_jac(u)

    def eigenvalue(self, u, family):
        return -self.inner.eigenvalue(u, self._map(family))

    def eigenvector(self, u, family):
        return self.inner.eigenvector(u, self._map(family))

    def max_abs_speed(self, u):
        return self.inner.max_abs_speed(u)

    def entropy(self, u):
        return self.inner.entropy(u)

    def entropy_grad(self, u):
        return self.inner.entropy_grad(u)

    def entropy_hess(self, u):
        return self.inner.entropy_hess(u)

    def entropy_flux(self, u):
        return -self.inner.entropy_flux(u)

    def shock_state(self, family, u, s):
        return self.inner.shock_state(self._map(family), u, s)

    def shock_speed(self, family, u, s):
        return -self.inner.shock_speed(self._map(family), u, s)

    def shock_speed_deriv(self, family, u, s):
        return -self.inner.shock_speed_deriv(self._map(family), u, s)

    def s_natural(self, family, u):
        return self.inner.s_natural(self._map(family), u)

    def s_minus_natural(self, family, u):
        return self.inner.s_minus_natural(self._map(family), u)

    def orientation(self, family, u):
        return self.inner.orientation(self._map(family), u)

    def degenerate(self, family, u):
        return self.inner.degenerate(self._map(family), u)

    def speed_trend(self, family):
        return -self.inner.speed_trend(self._map(family))

    def field_type(self, family):
        t = self.inner.field_type(self._map(family))
        return "concave-convex" if t == "convex-concave" else "convex-concave"

    def to_json(self):
        return {"kind": "reflected", "inner": self.inner.to_json()}


def reflect(model):
    """Reflect a model; reflecting twice returns the original object."""
    if isinstance(model, ReflectedModel):
        return model.inner
    return ReflectedModel(model)


# ---------------------------------------------------------------------------
# relative entropy machinery
# ---------------------------------------------------------------------------

def rel_entropy(model, u, v):
    """eta(u|v) = eta(u) - eta(v) - eta'(v).(u - v); nonnegative, 0 iff u = v."""
    u = as_state(model, u)
    v = as_state(model, v)
    dg = model.entropy_grad(v)
    return model.entropy(u) - model.entropy(v) - np.sum(dg * (u - v), axis=-1)


def rel_entropy_flux(model, u, v):
    """q(u;v) = q(u) - q(v) - eta'(v).(f(u) - f(v))."""
    u = as_state(model, u)
    v = as_state(model, v)
    dg = model.entropy_grad(v)
    df = model.flux(u) - model.flux(v)
    return model.entropy_flux(u) - model.entropy_flux(v) - np.sum(dg * df, axis=-1)


def entropy_pair(model, u):
    """Return (eta(u), q(u))."""
    return model.entropy(u), model.entropy_flux(u)


def quadratic_bounds(model, region=None, sample_count=4000, seed=0):
    """Sampled bounds c* <= eta(u|v)/|u-v|^2 <= c** over pairs in a box region.

    region defaults to the model state box; pairs with u = v are excluded.
    """
    box = np.asarray(region, dtype=float) if region is not None else model.state_box
    if np.any(box[:, 1] <= box[:, 0]):
        raise UsageError("degenerate region for quadratic bounds")
    rng = np.random.default_rng(seed)
    lo, hi = box[:, 0], box[:, 1]
    u = lo + (hi - lo) * rng.random((sample_count, model.n))
    v = lo + (hi - lo) * rng.random((sample_count, model.n))
    d2 = np.sum((u - v) ** 2, axis=-1)
    keep = d2 > 1e-14
    ratio = rel_entropy(model, u[keep], v[keep]) / d2[keep]
    return float(np.min(ratio)), float(np.max(ratio))


# ---------------------------------------------------------------------------
# field classification
# ---------------------------------------------------------------------------

@dataclass
class FieldClassification:
    classification: str
    m_sign_pattern: str
    degenerate_manifold: dict
    consistent: bool

    def to_json(self):
        return {
            "class": self.classification,
            "m_sign_pattern": self.m_sign_pattern,
            "degenerate_manifold": self.degenerate_manifold,
            "consistent": self.consistent,
        }


def field_classification(model, family, sample_count=40):
    """Classify a characteristic field as concave-convex or convex-concave.

    Evaluates m(u) = lambda'(u).r(u) and its directional derivative along r
    by central differences on a box grid, checks the sign conditions of the
    definition, and locates the degenerate manifold {m = 0}.
    """
    if sample_count < 10:
        raise UsageError("sample_count must be at least 10")
    box = model.state_box
    axes = [np.linspace(box[i, 0], box[i, 1], sample_count) for i in range(model.n)]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)

    h = 1e-5

    def m_of(u):
        r = model.eigenvector(u, family)
        lp = model.eigenvalue(u + h * r, family)
        lm = model.eigenvalue(u - h * r, family)
        return (lp - lm) / (2.0 * h)

    m_vals = m_of(pts)
    r = model.eigenvector(pts, family)
    dm = (m_of(pts + h * r) - m_of(pts - h * r)) / (2.0 * h)

    if np.all(dm > 0):
        cls, pattern = "concave-convex", "dm>0"
    elif np.all(dm < 0):
        cls, pattern = "convex-concave", "dm<0"
    else:
        raise InvariantViolation(
            "inconsistent sign of the directional derivative of m along r"
        )

    # the manifold {m = 0} for both instantiated models is {first component = 0};
    # estimate the zero crossing of m along the first coordinate
    res = axes[0][1] - axes[0][0]
    first = pts[..., 0]
    near_zero = np.abs(m_vals) <= np.max(np.abs(dm)) * res
    estimate = float(np.mean(first[near_zero])) if np.any(near_zero) else float("nan")
    manifold = {"component": 0, "value": estimate, "resolution": float(res)}
    consistent = bool(np.isfinite(estimate) and abs(estimate) <= res)
    return FieldClassification(cls, pattern, manifold, consistent)


# ---------------------------------------------------------------------------
# JSON descriptors
# ---------------------------------------------------------------------------

def _parse_entropy(spec) -> EntropySpec:
    if spec is None or spec == "canonical":
        return EntropySpec()
    if isinstance(spec, dict):
        kind = spec.get("kind", "piecewise")
        if kind == "canonical":
            return EntropySpec()
        return EntropySpec(
            kind="piecewise",
            slope=float(spec["slope"]),
            anchor=float(spec["anchor"]),
        )
    raise UsageError(f"bad entropy descriptor {spec!r}")


def parse_model(desc: dict):
    """Build a model from a JSON descriptor.

    {"kind": "elastodynamics", "m": 1.0, "box": [[-5,5],[-5,5]],
     "entropy": "canonical"}
    """
    if not isinstance(desc, dict) or "kind" not in desc:
        raise UsageError("model descriptor must be an object with a 'kind'")
    kind = desc["kind"]
    known = {"kind", "m", "box", "entropy", "inner"}
    extra = set(desc) - known
    if extra:
        raise UsageError(f"unknown model fields: {sorted(extra)}")
    if kind == "scalar_cubic":
        box = desc.get("box", [[-6.0, 6.0]])
        return ScalarCubic(box=tuple(box[0]), entropy=_parse_entropy(desc.get("entropy")))
    if kind == "elastodynamics":
        box = desc.get("box", [[-5.0, 5.0], [-5.0, 5.0]])
        return Elastodynamics(
            m=float(desc.get("m", 1.0)),
            box=box,
            entropy=_parse_entropy(desc.get("entropy")),
        )
    if kind == "reflected":
        return ReflectedModel(parse_model(desc["inner"]))
    raise UsageError(f"unknown model kind {kind!r}")
