"""Semiclassical correction of the kink: Gaussian (Weierstrass) smearing of the
potential derivatives and a fixed-point solver for the corrected profile.

The correction operator exp(sigma2/2 * d^2/dz^2) acting on a polynomial is the
Gaussian expectation E[p(z + sigma*g)], g ~ N(0, 1), which is again a
polynomial: every monomial z^m picks up the even Gaussian moments
(j-1)!! * sigma^j with binomial weights.
"""
from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import Polynomial, poly_eval, poly_real_roots
from .errors import DegenerateInput, NegativeVariance, NoConnection
from .travelwave import KinkProfile, TravelingWaveProblem, shoot_force

log = logging.getLogger(__name__)

MAX_VARIANCE = 1e3


def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def _smearing_table(p: Polynomial) -> np.ndarray:
    """T[q, k] such that smeared p(z) = sum_q sigma2**q * sum_k T[q, k] z**k."""
    deg = p.degree
    table = np.zeros((deg // 2 + 1, deg + 1))
    for m, a in enumerate(p.coeffs):
        if a == 0.0:
            continue
        for j in range(0, m + 1, 2):
            table[j // 2, m - j] += a * math.comb(m, j) * _double_factorial(j - 1)
    return table


def smear(p: Polynomial, sigma2: float) -> Polynomial:
    """Weierstrass transform of ``p`` with variance ``sigma2``."""
    if sigma2 < 0:
        raise NegativeVariance(f"smearing variance must be non-negative, got {sigma2!r}")
    table = _smearing_table(p)
    coeffs = np.zeros(table.shape[1])
    for q in range(table.shape[0] - 1, -1, -1):
        coeffs = coeffs * sigma2 + table[q]
    return Polynomial(coeffs)


def smear_derivative(U: Polynomial, n: int, sigma2: float) -> Polynomial:
    """M^(n): the n-th derivative of ``U`` smeared with variance ``sigma2``."""
    if sigma2 < 0:
        raise NegativeVariance(f"smearing variance must be non-negative, got {sigma2!r}")
    if n < 0 or (n > U.degree and not U.is_zero()):
        raise DegenerateInput(f"derivative order {n} exceeds degree {U.degree}")
    return smear(U.derivative(n), sigma2)


@dataclass(frozen=True, eq=False)
class SmearingKernel:
    """Variance profile sigma2(xi) = G(xi, xi) - G0(xi, xi) in the kink frame.

    Evaluated by linear interpolation, held constant beyond the sampled
    window.
    """

    xi: np.ndarray
    variance: np.ndarray
    kind: str = "custom"
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        var = np.asarray(self.variance, dtype=float)
        if xi.shape != var.shape or xi.ndim != 1 or xi.size < 2:
            raise DegenerateInput("kernel needs matching 1-D xi and variance arrays")
        if np.any(np.diff(xi) <= 0):
            raise DegenerateInput("kernel grid must be strictly increasing")
        if not np.all(np.isfinite(var)):
            raise DegenerateInput("kernel variance must be finite")
        if np.any(var < 0):
            raise NegativeVariance("kernel variance must be non-negative everywhere")
        if np.any(var > MAX_VARIANCE):
            raise DegenerateInput(f"kernel variance exceeds {MAX_VARIANCE:g}")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "variance", var)

    def __call__(self, xi):
        return np.interp(xi, self.xi, self.variance)

    @property
    def tails(self) -> tuple:
        return float(self.variance[0]), float(self.variance[-1])

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.variance == self.variance[0]))

    @classmethod
    def uniform(cls, sigma2: float, half_width: float = 60.0) -> "SmearingKernel":
        if sigma2 < 0:
            raise NegativeVariance(f"smearing variance must be non-negative, got {sigma2!r}")
        xi = np.array([-half_width, half_width])
        return cls(xi, np.full(2, float(sigma2)), "uniform", {"sigma2": float(sigma2)})

    @classmethod
    def sech2_bump(cls, amplitude: float, width: float = 1.0, base: float = 0.0, half_width: float = 60.0, n: int = 4001):
        """base + amplitude * sech^2(xi / width), centred on the kink."""
        xi = np.linspace(-half_width, half_width, n)
        var = base + amplitude / np.cosh(xi / width) ** 2
        return cls(xi, var, "sech2", {"amplitude": amplitude, "width": width, "base": base})


def _corrected_asymptote(P: Polynomial, sigma2: float, target: float, interval) -> float:
    roots = poly_real_roots(smear(P, sigma2), interval, 1e-12)
    if not roots:
        raise NoConnection(f"smeared force has no real root near {target!r} at sigma2={sigma2!r}")
    return min(roots, key=lambda r: (abs(r - target), r))


def _secant_slope(force, u0, direction, h=1e-6):
    return (force(u0 + direction * h) - force(u0)) / (direction * h)


class _FrameForce:
    """u -> M1(u; sigma2(xi_k(u))), with xi_k the inverse of the previous iterate.

    Parametrising the kernel by u through the monotone previous profile turns
    the xi-dependent force into an autonomous one; at the fixed point
    xi_k(u(xi)) = xi and the original equation is recovered.
    """

    def __init__(self, P, kernel, profile, a, b, xi_max):
        self.rows = [list(r[::-1]) for r in _smearing_table(P)][::-1]
        self.a, self.inv_span = a, 1.0 / (b - a)
        grid = np.linspace(-xi_max, xi_max, 8001)
        pa, pb = profile.asymptotes
        theta = (np.asarray(profile(grid)) - pa) / (pb - pa)
        keep = np.concatenate([[True], np.diff(theta) > 0])
        # kernel composed onto the normalised amplitude theta, plain lists for scalar lookups
        self.theta = theta[keep].tolist()
        self.var = np.asarray(kernel(grid[keep]), dtype=float).tolist()

    def variance(self, u):
        th = (u - self.a) * self.inv_span
        t, v = self.theta, self.var
        i = bisect.bisect_right(t, th)
        if i == 0:
            return v[0]
        if i == len(t):
            return v[-1]
        w = (th - t[i - 1]) / (t[i] - t[i - 1])
        return v[i - 1] + w * (v[i] - v[i - 1])

    def __call__(self, u):
        s = self.variance(u)
        acc = 0.0
        for row in self.rows:
            r = 0.0
            for c in row:
                r = r * u + c
            acc = acc * s + r
        return acc


def corrected_kink(
    initial: KinkProfile,
    kernel: SmearingKernel,
    problem: TravelingWaveProblem,
    max_iter: int = 30,
    tol: float = 1e-8,
    speed_selection: bool = False,
) -> KinkProfile:
    """Quantum-corrected kink solving u'' + rho*u' = M1[u] by fixed-point iteration.

    Each iteration re-runs the shooter with the smeared force, the kernel
    being read in the frame of the previous iterate. Stops when successive
    iterates differ by at most ``tol`` pointwise. After ``max_iter`` the last
    iterate is returned with ``info["converged"] = False``.
    """
    if not tol > 0 or max_iter < 1:
        raise DegenerateInput("need tol > 0 and max_iter >= 1")
    P = problem.P
    span = 2.0 * abs(problem.u_plus - problem.u_minus) + 1.0
    interval = (min(problem.u_minus, problem.u_plus) - span, max(problem.u_minus, problem.u_plus) + span)
    s_left, s_right = kernel.tails
    a = _corrected_asymptote(P, s_left, problem.u_minus, interval)
    b = _corrected_asymptote(P, s_right, problem.u_plus, interval)
    if abs(a - b) <= 1e-8 * abs(problem.u_plus - problem.u_minus) or (a - b) * (problem.u_minus - problem.u_plus) <= 0:
        raise NoConnection(f"smeared vacua collapse: asymptotes {a!r}, {b!r}")
    direction = 1.0 if b > a else -1.0

    prev = initial
    converged = False
    change = math.inf
    iterations = 0
    xi_max = float(initial.info.get("xi_max", 30.0))
    for iterations in range(1, max_iter + 1):
        if kernel.is_uniform:
            M = smear(P, s_left)
            force = lambda u, M=M: poly_eval(M, u)  # noqa: E731
            dM = M.derivative()
            slopes = (poly_eval(dM, a), poly_eval(dM, b))
        else:
            force = _FrameForce(P, kernel, prev, a, b, xi_max)
            # sigma2(xi(u)) need not be smooth in u at the vacua; use the secant over the take-off offset
            slopes = (_secant_slope(force, a, direction), _secant_slope(force, b, -direction))
        cur = shoot_force(force, slopes, a, b, problem.rho, tol, speed_selection, initial.velocity)
        xi_max = max(xi_max, cur.info["xi_max"])
        grid = np.linspace(-xi_max, xi_max, 2001)
        change = float(np.max(np.abs(np.asarray(cur(grid)) - np.asarray(prev(grid)))))
        prev = cur
        if change <= tol:
            converged = True
            break

    if not converged:
        log.warning("corrected kink did not converge in %d iterations (last change %.3e)", max_iter, change)
    prev.info.update(
        kernel_kind=kernel.kind,
        iterations=iterations,
        converged=converged,
        last_change=change,
        corrected_asymptotes=(a, b),
    )
    return prev
