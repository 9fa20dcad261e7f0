"""One-cut equilibrium measures with prescribed mass in a polynomial field.

The measure solved for here has density (1/pi) sqrt((b-x)(x-a)) h(x) on a
single interval [a, b], where h is a polynomial of degree d-2. Endpoints
come from a damped Newton iteration on the two moment conditions

    int_a^b V_t'(y) / sqrt((y-a)(b-y)) dy = 0,
    (1/2pi) int_a^b y V_t'(y) / sqrt((y-a)(b-y)) dy = mass,

both evaluated by Gauss-Chebyshev quadrature, which is exact for
polynomial integrands. h is the polynomial part of the expansion of
V_t'(z) ((z-a)(z-b))^{-1/2} at infinity, divided by two; the expansion
coefficients are exact binomial convolutions, so h carries no quadrature
error.

Logarithmic potentials are evaluated through the finite Chebyshev
expansion of G(y) = (b-y)(y-a) h(y): against the arcsine measure of
[a, b] the log kernel acts diagonally on Chebyshev polynomials, which
turns int log|x-y| dmu(y) into a short exact sum for every real x and
analogously int log(z-y) dmu(y) for complex z.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
from numpy.polynomial import chebyshev as ncheb
from numpy.polynomial import polynomial as npoly
from numpy.polynomial.legendre import leggauss

from .errors import (
    BranchCutError,
    InvalidParameterError,
    NoConvergenceError,
    NotOneCutRegularError,
)
from .potential import Potential

_MOMENT_NODES = 64
_NEWTON_TOL = 1e-13
_NEWTON_MAXIT = 100


@dataclass(frozen=True)
class EquilibriumData:
    """One-cut measure of total `mass` for the field V/t, plus derived data.

    h_coeffs are the coefficients of h (degree d-2); ell is the Lagrange
    constant of the variational equality. The Chebyshev expansion of
    (b-y)(y-a) h(y) is precomputed for the log-potential machinery.
    Immutable after solve; evaluation methods are pure.
    """

    potential: Potential
    mass: float
    t: float
    a: float
    b: float
    h_coeffs: tuple[float, ...]
    ell: float
    cheb: tuple[float, ...] = field(repr=False, default=())

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def radius(self) -> float:
        return 0.5 * (self.b - self.a)

    def vt(self, x, order: int = 0):
        return self.potential.eval(x, order) / self.t

    def h(self, x):
        return npoly.polyval(x, np.asarray(self.h_coeffs))

    def json_dict(self) -> dict:
        return {
            "mass": self.mass,
            "t": self.t,
            "a": self.a,
            "b": self.b,
            "h_coeffs": list(self.h_coeffs),
            "ell": self.ell,
        }


def _moment_system(dv1: np.ndarray, dv2: np.ndarray, a: float, b: float):
    """Moment conditions and their Jacobian in (a, b), exact for polynomials."""
    j = np.arange(1, _MOMENT_NODES + 1)
    cos_t = np.cos((2 * j - 1) * np.pi / (2 * _MOMENT_NODES))
    mid, rad = 0.5 * (a + b), 0.5 * (b - a)
    y = mid + rad * cos_t
    w = np.pi / _MOMENT_NODES
    vp = npoly.polyval(y, dv1)
    vpp = npoly.polyval(y, dv2)
    f1 = w * np.sum(vp)
    f2 = w * np.sum(y * vp) / (2 * np.pi)
    dy_da = 0.5 * (1 - cos_t)
    dy_db = 0.5 * (1 + cos_t)
    jac = np.array(
        [
            [w * np.sum(vpp * dy_da), w * np.sum(vpp * dy_db)],
            [
                w * np.sum((vp + y * vpp) * dy_da) / (2 * np.pi),
                w * np.sum((vp + y * vpp) * dy_db) / (2 * np.pi),
            ],
        ]
    )
    return np.array([f1, f2]), jac


def moment_residuals(potential: Potential, t: float, a: float, b: float, mass: float):
    """Residuals of the two endpoint conditions at (a, b)."""
    dv1 = potential.deriv_coeffs(1) / t
    dv2 = potential.deriv_coeffs(2) / t
    f, _ = _moment_system(dv1, dv2, a, b)
    return f[0], f[1] - mass


def _h_from_expansion(dv1: np.ndarray, a: float, b: float) -> np.ndarray:
    """Polynomial part of V_t'(z) ((z-a)(z-b))^{-1/2} at infinity, over two."""
    deg = len(dv1) - 1  # degree of V_t'
    ca = np.array([comb(2 * j, j) * (a / 4.0) ** j for j in range(deg + 1)])
    cb = np.array([comb(2 * j, j) * (b / 4.0) ** j for j in range(deg + 1)])
    s = np.convolve(ca, cb)[: deg + 1]
    h = np.zeros(deg)
    for p in range(deg):
        h[p] = 0.5 * sum(dv1[i] * s[i - 1 - p] for i in range(p + 1, deg + 1))
    return h


def _initial_guess(potential: Potential, t: float, mass: float) -> tuple[float, float]:
    """Semicircle of matching mass at the global minimum of V_t."""
    dv1 = potential.deriv_coeffs(1) / t
    crit = np.roots(dv1[::-1])
    crit = crit[np.abs(crit.imag) < 1e-9].real
    vals = potential.eval(crit) / t
    x0 = float(crit[np.argmin(vals)])
    curv = float(potential.eval(x0, 2)) / t
    gamma = max(0.5 * curv, 1e-3)
    r = np.sqrt(2.0 * mass / gamma)
    return x0 - r, x0 + r


def _cheb_of_band_density(h: np.ndarray, a: float, b: float) -> np.ndarray:
    """Chebyshev coefficients of (b-y)(y-a) h(y) in the scaled variable."""
    mid, rad = 0.5 * (a + b), 0.5 * (b - a)
    hy = npoly.Polynomial(h)(npoly.Polynomial([mid, rad])).coef
    g = npoly.polymul([rad * rad, 0.0, -rad * rad], hy)
    return ncheb.poly2cheb(g)


def solve(potential: Potential, t: float, mass: float) -> EquilibriumData:
    """Solve the one-cut problem for V/t with the requested total mass."""
    if not 0.0 < mass <= 1.0:
        raise InvalidParameterError(f"mass must lie in (0, 1], got {mass}")
    if not 0.5 <= t <= 2.0:
        raise InvalidParameterError(f"t must lie in [0.5, 2], got {t}")
    dv1 = potential.deriv_coeffs(1) / t
    dv2 = potential.deriv_coeffs(2) / t
    a, b = _initial_guess(potential, t, mass)
    converged = False
    for _ in range(_NEWTON_MAXIT):
        f, jac = _moment_system(dv1, dv2, a, b)
        f[1] -= mass
        if np.max(np.abs(f)) < _NEWTON_TOL:
            converged = True
            break
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError as exc:
            raise NoConvergenceError("singular Jacobian in endpoint iteration") from exc
        lam, norm0 = 1.0, np.linalg.norm(f)
        while lam > 1e-12:
            na, nb = a + lam * step[0], b + lam * step[1]
            if na < nb:
                fn, _ = _moment_system(dv1, dv2, na, nb)
                fn[1] -= mass
                if np.linalg.norm(fn) < norm0:
                    break
            lam /= 2
        a, b = a + lam * step[0], b + lam * step[1]
    if not converged:
        raise NoConvergenceError(
            f"endpoint Newton failed after {_NEWTON_MAXIT} iterations"
        )
    h = _h_from_expansion(dv1, a, b)
    hroots = np.roots(h[::-1]) if len(h) > 1 else np.array([])
    inside = [
        r.real
        for r in hroots
        if abs(r.imag) < 1e-9 and a - 1e-12 <= r.real <= b + 1e-12
    ]
    mid_val = npoly.polyval(0.5 * (a + b), h)
    if inside or mid_val <= 0:
        raise NotOneCutRegularError(
            f"density factor h changes sign on [{a}, {b}]"
        )
    cheb = _cheb_of_band_density(h, a, b)
    eq = EquilibriumData(
        potential=potential,
        mass=mass,
        t=t,
        a=float(a),
        b=float(b),
        h_coeffs=tuple(h),
        ell=0.0,
        cheb=tuple(cheb),
    )
    ell = lagrange_ell(eq)
    return EquilibriumData(
        potential=potential,
        mass=mass,
        t=t,
        a=float(a),
        b=float(b),
        h_coeffs=tuple(h),
        ell=ell,
        cheb=tuple(cheb),
    )


def density(eq: EquilibriumData, x):
    """Measure density: (1/pi) sqrt((b-x)(x-a)) h(x) on [a,b], zero outside."""
    x = np.asarray(x, dtype=float)
    band = np.maximum((eq.b - x) * (x - eq.a), 0.0)
    out = np.sqrt(band) * eq.h(x) / np.pi
    out = np.where((x >= eq.a) & (x <= eq.b), out, 0.0)
    return out if out.ndim else float(out)


def q_eval(eq: EquilibriumData, z):
    """q(z) = (z-a)(z-b) h(z)^2, the analytic square of pi * density."""
    z = np.asarray(z)
    out = (z - eq.a) * (z - eq.b) * eq.h(z) ** 2
    return out if out.ndim else complex(out) if np.iscomplexobj(out) else float(out)


def q_eval_resolvent(eq: EquilibriumData, z):
    """Second route to q: (V_t'/2)^2 minus the field-difference moment polynomial.

    q(z) = (V_t'(z)/2)^2 - int (V_t'(z)-V_t'(y))/(z-y) dmu(y); the integral
    is a polynomial in z whose coefficients are moments of the measure.
    Kept as an independent cross-check of q_eval.
    """
    dv1 = eq.potential.deriv_coeffs(1) / eq.t
    deg = len(dv1) - 1
    nq = 128
    j = np.arange(1, nq + 1)
    theta = (2 * j - 1) * np.pi / (2 * nq)
    y = eq.midpoint + eq.radius * np.cos(theta)
    wdens = (eq.radius**2 / nq) * np.sin(theta) ** 2 * eq.h(y)
    moments = np.array([np.sum(wdens * y**m) for m in range(deg)])
    poly = np.zeros(deg)
    for p in range(deg):
        poly[p] = sum(dv1[i] * moments[i - 1 - p] for i in range(p + 1, deg + 1))
    z = np.asarray(z)
    out = (npoly.polyval(z, dv1) / 2.0) ** 2 - npoly.polyval(z, poly)
    return out if out.ndim else complex(out) if np.iscomplexobj(out) else float(out)


def log_potential(eq: EquilibriumData, x):
    """int log|x - y| dmu(y), exact through the Chebyshev log-kernel expansion."""
    c = np.asarray(eq.cheb)
    k = np.arange(1, len(c))
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    yb = (x - eq.midpoint) / eq.radius
    out = np.empty_like(x)
    inside = np.abs(yb) <= 1.0
    if inside.any():
        theta = np.arccos(np.clip(yb[inside], -1.0, 1.0))
        out[inside] = c[0] * np.log(eq.radius / 2.0) - np.cos(
            np.outer(theta, k)
        ) @ (c[1:] / k)
    if (~inside).any():
        yo = yb[~inside]
        w = yo + np.sign(yo) * np.sqrt(yo * yo - 1.0)
        out[~inside] = c[0] * (np.log(eq.radius) + np.log(np.abs(w) / 2.0)) - (
            np.power.outer(w, -k) @ (c[1:] / k)
        )
    return float(out[0]) if scalar else out


def lagrange_ell(eq: EquilibriumData, x0: float | None = None) -> float:
    """Lagrange constant: 2 * log_potential - V_t evaluated inside the band."""
    if x0 is None:
        x0 = eq.midpoint
    return 2.0 * log_potential(eq, x0) - float(eq.vt(x0))


def variational_residual(eq: EquilibriumData, x):
    """r(x) = 2 int log|x-y| dmu - V_t(x) - ell.

    Vanishes on the band, is strictly negative off it except where the
    inequality degenerates (a gap-closing point), where it vanishes too.
    """
    return 2.0 * log_potential(eq, x) - eq.vt(x) - eq.ell


_PHI_NODES = leggauss(64)


def _phi_fixed(eq: EquilibriumData, x: float, panels: int) -> float:
    """Signed integral -int_b^x sqrt((s-a)(s-b)) h(s) ds with s = b + u^2.

    The substitution removes the square-root edge factor; evaluating h
    directly keeps the sign of the square root of q correct through any
    double zeros between b and x.
    """
    span = np.sqrt(x - eq.b)
    xs, ws = _PHI_NODES
    total = 0.0
    edges = np.linspace(0.0, span, panels + 1)
    for lo, hi in zip(edges[:-1], edges[1:]):
        u = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xs
        s = eq.b + u * u
        integrand = 2.0 * u * u * np.sqrt(s - eq.a) * eq.h(s)
        total += 0.5 * (hi - lo) * np.sum(ws * integrand)
    return -total


def phi(eq: EquilibriumData, x: float) -> float:
    """phi(x) = -int_b^x q^{1/2}(s) ds for x >= b, with the signed branch.

    phi(b) = 0 and phi < 0 just beyond b; the sign of q^{1/2} follows h,
    so phi climbs back to zero exactly at a gap-closing point. Panel count
    doubles until two refinements agree to 1e-12 relative.
    """
    if x < eq.b - 1e-12 * (1.0 + abs(eq.b)):
        raise InvalidParameterError(f"phi requires x >= b = {eq.b}, got {x}")
    if x <= eq.b:
        return 0.0
    panels = 4
    val = _phi_fixed(eq, x, panels)
    for _ in range(4):
        nxt = _phi_fixed(eq, x, panels * 2)
        if abs(nxt - val) <= 1e-12 * (1.0 + abs(nxt)):
            return nxt
        panels *= 2
        val = nxt
    return val


def g_function(eq: EquilibriumData, point_mass: float, x_star_nt: float, z) -> complex:
    """g(z) = int log(z-y) dmu(y) + point_mass * log(z - x_star_nt).

    Principal branches throughout; defined off the cut (-inf, x_star_nt].
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= x_star_nt:
        raise BranchCutError(f"g is defined off (-inf, {x_star_nt}], got z = {z}")
    c = np.asarray(eq.cheb)
    k = np.arange(1, len(c))
    zb = (z - eq.midpoint) / eq.radius
    w = zb + np.sqrt(zb - 1.0 + 0j) * np.sqrt(zb + 1.0 + 0j)
    glog = c[0] * (np.log(eq.radius) + np.log(w / 2.0)) - np.sum(c[1:] / (k * w**k))
    return complex(glog + point_mass * np.log(z - x_star_nt))
