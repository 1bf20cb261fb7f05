"""Scalar Dormand-Prince 5(4) integrator for the planar system u' = w, w' = g(u, w).

Written on plain floats: the shooter calls it hundreds of times on a
two-component state, where per-step array overhead would dominate.
"""
from __future__ import annotations

import math

# Dormand-Prince tableau
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


def _step(g, u, w, h, d):
    """One DP5 step of size h along direction d (+1 forward, -1 backward)."""
    k1u, k1w = d * w, d * g(u, w)
    u2, w2 = u + h * A21 * k1u, w + h * A21 * k1w
    k2u, k2w = d * w2, d * g(u2, w2)
    u3, w3 = u + h * (A31 * k1u + A32 * k2u), w + h * (A31 * k1w + A32 * k2w)
    k3u, k3w = d * w3, d * g(u3, w3)
    u4 = u + h * (A41 * k1u + A42 * k2u + A43 * k3u)
    w4 = w + h * (A41 * k1w + A42 * k2w + A43 * k3w)
    k4u, k4w = d * w4, d * g(u4, w4)
    u5 = u + h * (A51 * k1u + A52 * k2u + A53 * k3u + A54 * k4u)
    w5 = w + h * (A51 * k1w + A52 * k2w + A53 * k3w + A54 * k4w)
    k5u, k5w = d * w5, d * g(u5, w5)
    u6 = u + h * (A61 * k1u + A62 * k2u + A63 * k3u + A64 * k4u + A65 * k5u)
    w6 = w + h * (A61 * k1w + A62 * k2w + A63 * k3w + A64 * k4w + A65 * k5w)
    k6u, k6w = d * w6, d * g(u6, w6)
    un = u + h * (B1 * k1u + B3 * k3u + B4 * k4u + B5 * k5u + B6 * k6u)
    wn = w + h * (B1 * k1w + B3 * k3w + B4 * k4w + B5 * k5w + B6 * k6w)
    k7u, k7w = d * wn, d * g(un, wn)
    eu = h * (E1 * k1u + E3 * k3u + E4 * k4u + E5 * k5u + E6 * k6u + E7 * k7u)
    ew = h * (E1 * k1w + E3 * k3w + E4 * k4w + E5 * k5w + E6 * k6w + E7 * k7w)
    return un, wn, eu, ew


def run_to_level(g, u0, w0, level, s, d=1, rtol=1e-12, atol=1e-14, h_max=0.05, span_max=2e3):
    """Integrate from (u0, w0) until u reaches ``level`` or the orbit turns back.

    ``s`` is the sign of the expected motion of u in integration time (the
    orbit moves toward ``level``). Returns ``(status, taus, us, ws)`` with
    status ``"hit"`` when u == level was located, ``"turn"`` when s*du/dtau
    dropped to zero first, ``"stall"`` when neither happened within
    ``span_max``.
    """
    tau, u, w = 0.0, u0, w0
    taus, us, ws = [tau], [u], [w]
    h = min(h_max, 1e-3)
    while tau < span_max:
        un, wn, eu, ew = _step(g, u, w, h, d)
        sc_u = atol + rtol * max(abs(u), abs(un))
        sc_w = atol + rtol * max(abs(w), abs(wn))
        err = max(abs(eu) / sc_u, abs(ew) / sc_w)
        if not math.isfinite(err):
            h *= 0.2
            if h < 1e-14:
                return "stall", taus, us, ws
            continue
        if err > 1.0:
            h *= max(0.2, 0.9 * err ** -0.2)
            continue

        if s * (un - level) >= 0.0:
            hs = _locate(lambda hh: _step(g, u, w, hh, d)[0] - level, lambda hh: d * _step(g, u, w, hh, d)[1], h)
            uh, wh, _, _ = _step(g, u, w, hs, d)
            if s * d * wh > 0.0:
                taus.append(tau + hs)
                us.append(level)
                ws.append(wh)
                return "hit", taus, us, ws
            return "turn", taus, us, ws
        if s * d * wn <= 0.0:
            taus.append(tau + h)
            us.append(un)
            ws.append(wn)
            return "turn", taus, us, ws

        if abs(wn) < 1e-13 and abs(g(un, wn)) < 1e-13:
            # parked on an intermediate equilibrium: the level is unreachable
            return "turn", taus, us, ws

        tau += h
        u, w = un, wn
        taus.append(tau)
        us.append(u)
        ws.append(w)
        fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        h = min(h * fac, h_max)
    return "stall", taus, us, ws


def _locate(f, df, h):
    # safeguarded Newton on the step length; f(0) and f(h) bracket the root
    lo, hi = 0.0, h
    fhi = f(hi)
    x, fx = hi, fhi
    for _ in range(60):
        if fx == 0.0:
            return x
        dfx = df(x)
        xn = x - fx / dfx if dfx != 0.0 else 0.5 * (lo + hi)
        if not lo < xn < hi:
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= 1e-15 * max(1.0, h):
            return xn
        x, fx = xn, f(xn)
        if (fx > 0.0) == (fhi > 0.0):
            hi, fhi = x, fx
        else:
            lo = x
    return x
