"""Physical constants and the small polynomial toolkit shared by every module.

All physics is carried in SI units. Polynomials are stored with ascending
coefficients, ``coeffs[k]`` multiplying ``x**k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateInput

MAX_DEGREE = 6
SCAN_SUBINTERVALS = 4096


@dataclass(frozen=True)
class PhysConsts:
    """CODATA 2018 exact/recommended values (SI)."""

    hbar: float = 1.054571817e-34  # J s
    elem_charge: float = 1.602176634e-19  # C
    eps0: float = 8.8541878128e-12  # F/m
    kB: float = 1.380649e-23  # J/K
    c: float = 299792458.0  # m/s

    def __post_init__(self):
        for name in ("hbar", "elem_charge", "eps0", "kB", "c"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


CONSTS = PhysConsts()


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial of degree at most six, ascending coefficients.

    Trailing zero coefficients are stripped so the leading coefficient is
    nonzero unless the polynomial is identically zero (stored as ``(0.0,)``).
    """

    coeffs: tuple

    def __init__(self, coeffs: Sequence[float]):
        c = [float(a) for a in coeffs]
        if not c:
            c = [0.0]
        if not all(math.isfinite(a) for a in c):
            raise DegenerateInput("polynomial coefficients must be finite")
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        if len(c) - 1 > MAX_DEGREE:
            raise DegenerateInput(f"degree {len(c) - 1} exceeds the supported maximum {MAX_DEGREE}")
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_roots(cls, roots, scale=1.0):
        c = np.polynomial.polynomial.polyfromroots(list(roots)) * scale
        return cls(c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    def __call__(self, x):
        return poly_eval(self, x)

    def derivative(self, n: int = 1) -> "Polynomial":
        c = list(self.coeffs)
        for _ in range(n):
            c = [k * c[k] for k in range(1, len(c))] or [0.0]
        return Polynomial(c)

    def integral(self, constant: float = 0.0) -> "Polynomial":
        c = [constant] + [a / (k + 1) for k, a in enumerate(self.coeffs)]
        return Polynomial(c)

    def __add__(self, other):
        other = other if isinstance(other, Polynomial) else Polynomial([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0.0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0.0] * (n - len(other.coeffs))
        return Polynomial([x + y for x, y in zip(a, b)])

    def __neg__(self):
        return Polynomial([-a for a in self.coeffs])

    def __sub__(self, other):
        other = other if isinstance(other, Polynomial) else Polynomial([other])
        return self + (-other)

    def scale(self, factor: float) -> "Polynomial":
        return Polynomial([factor * a for a in self.coeffs])

    def to_list(self) -> list:
        return list(self.coeffs)


def poly_eval(p: Polynomial, x):
    """Horner evaluation; accepts a scalar or an ndarray."""
    acc = 0.0 * x if isinstance(x, np.ndarray) else 0.0
    for a in reversed(p.coeffs):
        acc = acc * x + a
    return acc


def _bisect(p: Polynomial, lo: float, hi: float, flo: float, floor: float) -> float:
    # width floor keeps roots at zero from descending into subnormals
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi or hi - lo <= floor:
            break
        fm = poly_eval(p, mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo if abs(poly_eval(p, lo)) <= abs(poly_eval(p, hi)) else hi


def _sign_change_roots(p: Polynomial, nodes: np.ndarray, floor: float) -> list:
    vals = poly_eval(p, nodes)
    roots = [float(x) for x in nodes[vals == 0.0]]
    idx = np.nonzero(vals[:-1] * vals[1:] < 0.0)[0]
    for i in idx:
        roots.append(_bisect(p, float(nodes[i]), float(nodes[i + 1]), float(vals[i]), floor))
    return roots


def poly_real_roots(p: Polynomial, interval, tol: float = 1e-12) -> list:
    """Real roots of ``p`` inside ``[lo, hi]``, each reported once, ascending.

    Sign changes on a 4096-cell scan are refined by bisection down to
    floating-point resolution. Even-multiplicity (tangential) roots do not
    change sign, so the critical points of ``p`` are located the same way and
    kept when ``|p|`` there is within ``tol``.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise DegenerateInput("root interval must satisfy lo < hi")
    if not tol > 0:
        raise DegenerateInput("tolerance must be positive")
    if p.is_zero():
        raise DegenerateInput("identically zero polynomial has no isolated roots")
    if p.degree == 0:
        return []

    nodes = np.linspace(lo, hi, SCAN_SUBINTERVALS + 1)
    cell = (hi - lo) / SCAN_SUBINTERVALS
    floor = 1e-4 * tol
    roots = _sign_change_roots(p, nodes, floor)

    dp = p.derivative()
    if dp.degree >= 1:
        for c in _sign_change_roots(dp, nodes, floor):
            if abs(poly_eval(p, c)) <= tol and all(abs(c - r) > 2 * cell for r in roots):
                roots.append(c)

    roots.sort()
    merged = []
    for r in roots:
        # bisection near an even root can split on rounding noise of width ~sqrt(eps)
        if merged and r - merged[-1] <= max(tol, 1e-7 * max(1.0, abs(r))):
            continue
        merged.append(r)
    return merged
