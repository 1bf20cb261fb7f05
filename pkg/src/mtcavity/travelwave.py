"""Traveling-wave reduction u'' + rho*u' = P(u), analytic kink families and a
heteroclinic shooter.

A kink is a monotone orbit joining two saddle equilibria u_minus (xi -> -inf)
and u_plus (xi -> +inf) of the planar system u' = w, w' = P(u) - rho*w.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import BPoly
from scipy.special import expit

from ._dopri import run_to_level
from .core import Polynomial, poly_eval, poly_real_roots
from .errors import (
    DegenerateInput,
    NoAsymptotes,
    NoConnection,
    SupersonicVelocity,
    ToleranceUnmet,
)

ASYMPTOTE_TOL = 1e-10
TAKEOFF_OFFSET = 1e-6
XI_RATE_FACTOR = 40.0
MAX_DOUBLINGS = 64
MAX_BISECTIONS = 200


@dataclass(frozen=True)
class TravelingWaveProblem:
    rho: float
    P: Polynomial
    u_minus: float
    u_plus: float

    def __post_init__(self):
        if self.u_minus == self.u_plus:
            raise DegenerateInput("asymptotic states must differ")
        for name in ("u_minus", "u_plus"):
            val = poly_eval(self.P, getattr(self, name))
            if abs(val) > ASYMPTOTE_TOL:
                raise DegenerateInput(f"{name}={getattr(self, name)!r} is not a zero of P (P={val:.3e})")

    def with_rho(self, rho: float) -> "TravelingWaveProblem":
        return TravelingWaveProblem(rho, self.P, self.u_minus, self.u_plus)


@dataclass(eq=False)
class KinkProfile:
    """A kink u(xi) from one of three families.

    ``tanh``: u = c1 * (tanh(c2 * xi) + c3).
    ``logistic``: u = c1' + (c2' - c1') / (1 + exp(c3' * (c2' - c1') * xi)).
    ``numeric``: quintic Hermite interpolation of shooter samples inside the
    integrated window, exact linearised exponential tails outside it.
    """

    family: str
    params: tuple = ()
    velocity: float = 0.0
    samples: Optional[np.ndarray] = None  # (n, 2) columns xi, u
    slopes: Optional[np.ndarray] = None  # (n, 2) columns u', u''
    tails: Optional[tuple] = None  # ((xi0, a, amp, rate), (xi1, b, amp, rate))
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family == "tanh":
            if len(self.params) != 3 or self.params[1] == 0:
                raise DegenerateInput("tanh kink needs (c1, c2, c3) with c2 != 0")
        elif self.family == "logistic":
            if len(self.params) != 3 or self.params[0] == self.params[1]:
                raise DegenerateInput("logistic kink needs (c1', c2', c3') with c1' != c2'")
        elif self.family == "numeric":
            if self.samples is None or self.slopes is None or self.tails is None:
                raise DegenerateInput("numeric kink needs samples, slopes and tails")
            xi = self.samples[:, 0]
            if np.any(np.diff(xi) <= 0):
                raise DegenerateInput("numeric samples must be strictly increasing in xi")
            self._curve = BPoly.from_derivatives(
                xi, np.column_stack([self.samples[:, 1], self.slopes]).reshape(len(xi), 3)
            )
        else:
            raise DegenerateInput(f"unknown kink family {self.family!r}")
        self.params = tuple(float(c) for c in self.params)

    @property
    def asymptotes(self) -> tuple:
        """(u(-inf), u(+inf))."""
        if self.family == "tanh":
            c1, c2, c3 = self.params
            sg = math.copysign(1.0, c2)
            return c1 * (c3 - sg), c1 * (c3 + sg)
        if self.family == "logistic":
            c1, c2, c3 = self.params
            k = c3 * (c2 - c1)
            return (c2, c1) if k > 0 else (c1, c2)
        return self.tails[0][1], self.tails[1][1]

    @property
    def domain(self) -> tuple:
        if self.family == "numeric":
            return float(self.samples[0, 0]), float(self.samples[-1, 0])
        return -math.inf, math.inf

    def __call__(self, xi, nu: int = 0):
        return self.evaluate(xi, nu)

    def evaluate(self, xi, nu: int = 0):
        """u (nu=0), u' (nu=1) or u'' (nu=2) at ``xi``."""
        x = np.asarray(xi, dtype=float)
        if self.family == "tanh":
            c1, c2, c3 = self.params
            t = np.tanh(c2 * x)
            sech2 = 1.0 - t * t
            out = (c1 * (t + c3), c1 * c2 * sech2, -2.0 * c1 * c2 * c2 * t * sech2)[nu]
        elif self.family == "logistic":
            c1, c2, c3 = self.params
            k = c3 * (c2 - c1)
            sg = expit(-k * x)
            q = sg * (1.0 - sg)
            out = (c1 + (c2 - c1) * sg, -(c2 - c1) * k * q, (c2 - c1) * k * k * q * (1.0 - 2.0 * sg))[nu]
        else:
            out = self._eval_numeric(x, nu)
        return float(out) if np.ndim(out) == 0 else out

    def _eval_numeric(self, x, nu):
        (xl, a, amp_l, rate_l), (xr, b, amp_r, rate_r) = self.tails
        x = np.atleast_1d(x)
        out = np.empty_like(x)
        left, right = x < xl, x > xr
        mid = ~(left | right)
        out[mid] = self._curve(x[mid], nu)
        el = amp_l * np.exp(rate_l * (x[left] - xl))
        er = amp_r * np.exp(rate_r * (x[right] - xr))
        out[left] = (a + el, rate_l * el, rate_l**2 * el)[nu]
        out[right] = (b + er, rate_r * er, rate_r**2 * er)[nu]
        return out if out.size > 1 else out[0]

    def sample(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        return np.column_stack([xi, self.evaluate(xi)])


def tanh_kink(c1=1.0, c2=1 / math.sqrt(2.0), c3=0.0, velocity=0.0) -> KinkProfile:
    return KinkProfile("tanh", (c1, c2, c3), velocity)


def logistic_kink(c1, c2, c3, velocity=0.0) -> KinkProfile:
    return KinkProfile("logistic", (c1, c2, c3), velocity)


def phi4_potential() -> Polynomial:
    """Double well U(u) = (u^2 - 1)^2 / 4."""
    return Polynomial([0.25, 0.0, -0.5, 0.0, 0.25])


def reduce_to_ode(params, v: float, interval=(-10.0, 10.0), descending: bool = False) -> TravelingWaveProblem:
    """Moving-frame reduction of u_tt = u_xx - gamma*u_t - U'(u) + f.

    With xi = x - v*t, (1 - v^2) u'' + gamma*v*u' = U'(u) - f, so
    rho = gamma*v / (1 - v^2) and P = (U' - f) / (1 - v^2). The asymptotes are
    the outermost real roots of P in ``interval``; ``descending`` puts the
    larger one at xi -> -inf.
    """
    if abs(v) >= 1.0:
        raise SupersonicVelocity(f"|v|={abs(v)!r} must be below the unit wave speed")
    lorentz = 1.0 - v * v
    P = (params.potential.derivative() - params.force).scale(1.0 / lorentz)
    if P.is_zero():
        raise NoAsymptotes("P vanishes identically")
    roots = poly_real_roots(P, interval, 1e-12)
    if len(roots) < 2:
        raise NoAsymptotes(f"P has {len(roots)} real root(s) in {tuple(interval)}")
    lo, hi = roots[0], roots[-1]
    rho = params.gamma * v / lorentz
    return TravelingWaveProblem(rho, P, hi if descending else lo, lo if descending else hi)


def residual(profile: KinkProfile, problem: TravelingWaveProblem, grid, fd_step: float = 1e-2) -> float:
    """max |u'' + rho*u' - P(u)| on ``grid``.

    Analytic families use exact derivatives; numeric profiles use fourth-order
    central differences of the interpolant with step ``fd_step``.
    """
    xi = np.asarray(grid, dtype=float)
    u = np.asarray(profile.evaluate(xi), dtype=float)
    if profile.family == "numeric":
        if xi.size > 1:
            fd_step = min(fd_step, float(np.min(np.diff(xi))))
        h = fd_step
        up1, um1 = profile.evaluate(xi + h), profile.evaluate(xi - h)
        up2, um2 = profile.evaluate(xi + 2 * h), profile.evaluate(xi - 2 * h)
        d1 = (-up2 + 8 * up1 - 8 * um1 + um2) / (12 * h)
        d2 = (-up2 + 16 * up1 - 30 * u + 16 * um1 - um2) / (12 * h * h)
    else:
        d1 = profile.evaluate(xi, 1)
        d2 = profile.evaluate(xi, 2)
    r = d2 + problem.rho * d1 - poly_eval(problem.P, u)
    return float(np.max(np.abs(r))) if r.size else 0.0


def match_logistic(problem: TravelingWaveProblem, velocity: float = 0.0) -> Optional[KinkProfile]:
    """Exact logistic kink for a cubic P, or None when no logistic connection exists.

    Writing u = u_plus + (u_minus - u_plus) * s with s = 1/(1 + e^{k xi}) turns
    P into A3*D^3 * s(s-1)(s-a), with D = u_minus - u_plus and a the third root
    in s coordinates; s' = -k s(1-s) then forces k^2 = A3*D^2/2 and
    rho = k*(1 - 2a).
    """
    P = problem.P
    if P.degree != 3:
        return None
    a0, a1, a2, a3 = P.coeffs
    um, up = problem.u_minus, problem.u_plus
    dP = P.derivative()
    if poly_eval(dP, um) == 0.0 or poly_eval(dP, up) == 0.0 or a3 <= 0.0:
        return None
    third = -a2 / a3 - um - up
    if abs(third - um) < 1e-12 or abs(third - up) < 1e-12:
        return None
    D = um - up
    a = (third - up) / D
    k = abs(D) * math.sqrt(a3 / 2.0)
    rho = k * (1.0 - 2.0 * a)
    if abs(rho - problem.rho) > 1e-9:
        return None
    profile = logistic_kink(up, um, k / D, velocity)
    profile.info.update(rho=rho, k=k)
    return profile


# -- shooting ---------------------------------------------------------------


def _rates(slope: float, rho: float) -> tuple:
    disc = rho * rho + 4.0 * slope
    root = math.sqrt(disc)
    return 0.5 * (-rho + root), 0.5 * (-rho - root)


class _Shooter:
    """Two-sided matching: unstable manifold of u_minus forward and stable
    manifold of u_plus backward, both run to the midpoint level; the velocity
    mismatch there is the connection defect."""

    def __init__(self, force, slope_minus, slope_plus, u_minus, u_plus, rtol=1e-12):
        self.force = force
        self.a, self.b = u_minus, u_plus
        self.s = 1.0 if u_plus > u_minus else -1.0
        self.mid = 0.5 * (u_minus + u_plus)
        self.slope_a, self.slope_b = slope_minus, slope_plus
        self.rtol = rtol
        self.h_max = 0.05

    def orbits(self, rho, eps=TAKEOFF_OFFSET):
        f, s = self.force, self.s

        def g(u, w):
            return f(u) - rho * w

        lam_u = _rates(self.slope_a, rho)[0]
        mu_s = _rates(self.slope_b, rho)[1]
        fwd = run_to_level(g, self.a + s * eps, lam_u * s * eps, self.mid, s, 1, self.rtol, h_max=self.h_max)
        bwd = run_to_level(g, self.b - s * eps, -mu_s * s * eps, self.mid, -s, -1, self.rtol, h_max=self.h_max)
        return (lam_u, fwd), (mu_s, bwd)

    def defect(self, rho) -> float:
        (_, fwd), (_, bwd) = self.orbits(rho)
        wf = self.s * fwd[3][-1] if fwd[0] == "hit" else 0.0
        wb = self.s * bwd[3][-1] if bwd[0] == "hit" else 0.0
        if fwd[0] != "hit" and bwd[0] != "hit":
            return math.nan
        return wf - wb


def shoot(
    problem: TravelingWaveProblem,
    tol: float = 1e-8,
    speed_selection: bool = False,
    velocity: float = 0.0,
) -> KinkProfile:
    """Numerical heteroclinic kink for ``problem``.

    The unstable manifold of u_minus is integrated forward and the stable
    manifold of u_plus backward (take-off 1e-6 along the eigenvectors,
    adaptive Dormand-Prince 5(4)) until both reach the midpoint level; the
    slope mismatch there is the connection defect. With ``speed_selection``
    rho is unknown: a bracket is grown from ``problem.rho`` by doubling and
    bisected until the defect vanishes. Otherwise rho is held fixed and the
    defect must already be within ``tol``.
    """
    P = problem.P
    dP = P.derivative()
    return shoot_force(
        lambda u: poly_eval(P, u),
        (poly_eval(dP, problem.u_minus), poly_eval(dP, problem.u_plus)),
        problem.u_minus,
        problem.u_plus,
        problem.rho,
        tol,
        speed_selection,
        velocity,
    )


def shoot_force(force, slopes, u_minus, u_plus, rho, tol=1e-8, speed_selection=False, velocity=0.0) -> KinkProfile:
    """:func:`shoot` for an arbitrary scalar force with known slopes at the asymptotes."""
    if not tol > 0:
        raise DegenerateInput("tol must be positive")
    sa, sb = slopes
    if not (sa > 0 and sb > 0):
        raise NoConnection(f"asymptotes must be saddles (slopes {sa:.3g}, {sb:.3g}); simple roots with P' > 0 required")

    sh = _Shooter(force, sa, sb, u_minus, u_plus)
    if speed_selection:
        rho, dval = _select_speed(sh, rho, tol)
    else:
        dval = sh.defect(rho)
        if not abs(dval) <= tol:
            raise NoConnection(f"no kink at rho={rho!r}: connection defect {dval:.3e} exceeds tol {tol:.1e}")

    profile = _assemble(sh, rho, velocity)
    profile.info.update(rho=rho, defect=dval, mode="speed" if speed_selection else "fixed", tol=tol)
    _check_monotone(profile)
    return profile


def _select_speed(sh: _Shooter, rho0: float, tol: float) -> tuple:
    d0 = sh.defect(rho0)
    if abs(d0) <= 1e-3 * tol:
        return rho0, d0
    # the defect decreases with rho: extra damping bleeds speed off both halves
    direction = 1.0 if d0 > 0 else -1.0
    step = 0.25 * max(1.0, abs(rho0))
    lo_rho, lo_d = rho0, d0
    for k in range(MAX_DOUBLINGS):
        r = rho0 + direction * step * 2.0**k
        try:
            d = sh.defect(r)
        except (ValueError, OverflowError):
            d = math.nan
        if math.isfinite(d) and (d > 0) != (d0 > 0):
            hi_rho, hi_d = r, d
            break
        lo_rho, lo_d = r, d
    else:
        raise NoConnection(f"no sign change of the connection defect within {MAX_DOUBLINGS} doublings from rho={rho0!r}")

    a, da, b = lo_rho, lo_d, hi_rho
    best, best_d = (a, da) if abs(da) < abs(hi_d) else (b, hi_d)
    for _ in range(MAX_BISECTIONS):
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        dm = sh.defect(m)
        if abs(dm) < abs(best_d):
            best, best_d = m, dm
        if dm == 0.0 or abs(dm) <= 1e-3 * tol:
            break
        if (dm > 0) == (da > 0):
            a, da = m, dm
        else:
            b = m
    if not abs(best_d) <= tol:
        raise ToleranceUnmet(f"speed selection stalled at rho={best!r} with defect {best_d:.3e}")
    return best, best_d


def _assemble(sh: _Shooter, rho: float, velocity: float) -> KinkProfile:
    (lam_u, fwd), (mu_s, bwd) = sh.orbits(rho)
    if fwd[0] != "hit" or bwd[0] != "hit":
        raise NoConnection(f"manifold orbits failed to reach the midpoint at rho={rho!r}")
    tf, uf, wf = (np.asarray(x) for x in fwd[1:])
    tb, ub, wb = (np.asarray(x) for x in bwd[1:])
    xi_f = tf - tf[-1]
    xi_b = tb[-1] - tb
    xi = np.concatenate([xi_f, xi_b[::-1][1:]])
    u = np.concatenate([uf, ub[::-1][1:]])
    w = np.concatenate([wf, wb[::-1][1:]])
    keep = np.concatenate([[True], np.diff(xi) > 1e-13])
    xi, u, w = xi[keep], u[keep], w[keep]
    acc = np.array([sh.force(x) for x in u]) - rho * w

    s, eps = sh.s, TAKEOFF_OFFSET
    tails = ((float(xi[0]), sh.a, s * eps, lam_u), (float(xi[-1]), sh.b, -s * eps, mu_s))
    k_slow = min(abs(lam_u), abs(mu_s))
    xi_max = max(XI_RATE_FACTOR / k_slow, -xi[0], xi[-1])

    profile = KinkProfile(
        "numeric",
        velocity=velocity,
        samples=np.column_stack([xi, u]),
        slopes=np.column_stack([w, acc]),
        tails=tails,
    )
    profile.info.update(xi_max=xi_max, takeoff_offset=eps, rates=(lam_u, mu_s))
    return profile


def _check_monotone(profile: KinkProfile):
    u = profile.samples[:, 1]
    s = 1.0 if profile.asymptotes[1] > profile.asymptotes[0] else -1.0
    if np.any(s * np.diff(u) < 0):
        raise NoConnection("connection found but the profile is not monotone")


def export_grid(profile: KinkProfile, n: int = 2001) -> np.ndarray:
    """Uniform xi grid spanning the profile's certified window [-Xi, Xi]."""
    xi_max = profile.info.get("xi_max", 20.0)
    return np.linspace(-xi_max, xi_max, n)
