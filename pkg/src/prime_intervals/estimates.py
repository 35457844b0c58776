"""Zero-counting, zero-density and explicit zero-sum bounds.

Every function returns an ``mpmath.iv`` interval enclosing the stated
closed form at the current precision; the upper endpoint is the
upward-rounded bound. Sums over zeros use the Brent-Platt-Trudgian form of
Lehman's lemma with |N(T) - P(T)| <= R(T).
"""
from __future__ import annotations

from functools import lru_cache

from mpmath import iv, mp, mpf

from ._rigor import Number, ival, lower, to_fraction, upper
from .constants import AnalyticConstants, default_constants

_DEFAULT = default_constants()


def _c(constants: AnalyticConstants | None) -> AnalyticConstants:
    return _DEFAULT if constants is None else constants


def P(T: Number):
    """Main term T/(2 pi) log(T/(2 pi)) - T/(2 pi) + 7/8 of N(T)."""
    T = ival(T)
    if not lower(T) > 0:
        raise ValueError("P(T) needs T > 0")
    w = T / (2 * iv.pi)
    return w * iv.log(w) - w + iv.mpf(7) / 8


def R(T: Number, constants: AnalyticConstants | None = None):
    """Error bound a1 log T + a2 log log T + a3 for |N(T) - P(T)|, valid for T >= e."""
    c = _c(constants)
    T = ival(T)
    if upper(T) < lower(ival(c.zero_count_T0)):
        raise ValueError(f"R(T) is only valid for T >= e, got T={mp.nstr(upper(T), 10)}")
    a1, a2, a3 = c.a
    logT = iv.log(T)
    # log log T is 0 at T = e; clamp so a rounding-width excursion below e stays valid
    loglog = iv.log(logT) if lower(logT) >= 1 else iv.mpf([0, max(upper(iv.log(logT)), 0)])
    return a1 * logT + a2 * loglog + a3


def D(sigma: Number, T: Number, constants: AnalyticConstants | None = None):
    """Zero-density bound A (log kT)^{2 sigma} (log T)^{5-4 sigma} T^{8(1-sigma)/3} + B (log T)^2."""
    c = _c(constants)
    entry = c.density_entry(sigma)
    T = ival(T)
    if upper(T) < c.riemann_height_H:
        raise ValueError("D(sigma, T) is only valid for T >= H")
    s = ival(entry.sigma)
    A, B = ival(entry.A_sigma), ival(entry.B_sigma)
    logT = iv.log(T)
    return (
        A * iv.log(c.k * T) ** (2 * s) * logT ** (5 - 4 * s) * T ** (iv.mpf(8) / 3 * (1 - s))
        + B * logT**2
    )


def _E_lehman(U, m_plus_1: int, constants: AnalyticConstants):
    """Error term 2(A0 + A1 log U)|phi'(U)| + (A1 + A2) phi(U)/U for phi = t^-(m+1)."""
    A0, A1, A2 = constants.A
    return (A0 + A1 * iv.log(U)) * 2 * m_plus_1 / U ** (m_plus_1 + 1) + (A1 + A2) / U ** (m_plus_1 + 1)


def _check_window(U, V, constants: AnalyticConstants) -> None:
    if lower(U) < lower(2 * iv.pi):
        raise ValueError("window must start at or above 2 pi")
    if lower(U) > upper(V):
        raise ValueError("window ordering violated: need U <= V")
    if upper(V) > constants.riemann_height_H:
        raise ValueError("window must end at or below H")


def S1(T0: Number, T1: Number, constants: AnalyticConstants | None = None):
    """Upper bound for the sum of 1/gamma over T0 < gamma <= T1."""
    c = _c(constants)
    T0, T1 = ival(T0), ival(T1)
    _check_window(T0, T1, c)
    two_pi = 2 * iv.pi
    main = iv.log(T1 / T0) * iv.log(iv.sqrt(T0 * T1) / two_pi) / two_pi
    A0, A1, A2 = c.A
    E = (A0 + A1 * iv.log(T0)) * 2 / T0**2 + (A1 + A2) / T0**2
    return main + R(T0, c) / T0 + (R(T1, c) + iv.mpf(1) / 2) / T1 + E


def _g(m: int, T):
    # antiderivative pieces: int_U^V t^-(m+1) log(t/2pi) dt = g(U) - g(V)
    return (1 + m * iv.log(T / (2 * iv.pi))) / (m * m * T**m)


def S2(m: int, T1: Number, constants: AnalyticConstants | None = None, V: Number | None = None):
    """Upper bound for the sum of gamma^-(m+1) over T1 < gamma <= V (default V = H).

    A generic ``V`` is exposed so the bound can be checked against explicit
    zero lists on short windows.
    """
    c = _c(constants)
    if m < 1:
        raise ValueError("m must be >= 1")
    U = ival(T1)
    V = c.H if V is None else ival(V)
    _check_window(U, V, c)
    main = (_g(m, U) - _g(m, V)) / (2 * iv.pi)
    main = iv.mpf([max(lower(main), 0), upper(main)])
    return (
        main
        + R(U, c) / U ** (m + 1)
        + (R(V, c) + iv.mpf(1) / 2) / V ** (m + 1)
        + _E_lehman(U, m + 1, c)
    )


def S3(m: int, constants: AnalyticConstants | None = None):
    """Upper bound for the sum of gamma^-(m+1) over gamma > H."""
    c = _c(constants)
    if m < 2:
        raise ValueError("m must be >= 2")
    H = c.H
    A0, A1, A2 = c.A
    # the H^{m+1} power in the first error term is larger than needed; kept as published
    E = (A0 + A1 * iv.log(H)) * 2 * (m + 1) / H ** (m + 1) + (A1 + A2) / H ** (m + 2)
    return _g(m, H) / (2 * iv.pi) + R(H, c) / H ** (m + 1) + E


# -- zero-density integrals ---------------------------------------------------

def _mpf(x: str) -> mpf:
    q = to_fraction(x)
    return mpf(q.numerator) / q.denominator


def _check_convergence(m: int, sigma) -> None:
    if m < 2:
        raise ValueError("m must be >= 2")
    s = ival(sigma)
    if not upper(iv.mpf(8) / 3 * (1 - s)) < m + 1:
        raise ValueError("integral diverges: need 8(1 - sigma)/3 < m + 1")


@lru_cache(maxsize=256)
def _density_integral(m: int, sigma: str, A: str, B: str, k: str, H: int, prec: int):
    """Enclosure of int_0^inf D(sigma, H e^v) e^{-(m+1) v} dv.

    The B-part has the closed form L^2/b + 2L/b^2 + 2/b^3. The A-part is
    integrated by tanh-sinh quadrature up to a cut V and the remainder is
    bounded by g(V) / (beta - (5 - 2 sigma)/(a + V)), using
    (a + v)/(a + V) <= exp((v - V)/(a + V)).
    """
    with mp.workprec(prec + 32):
        s, Am, Bm = _mpf(sigma), _mpf(A), _mpf(B)
        L = mp.log(H)
        a = mp.log(_mpf(k) * H)
        c = mpf(8) / 3 * (1 - s)
        beta = m + 1 - c
        p1, p2 = 2 * s, 5 - 4 * s

        def g(v):
            return (a + v) ** p1 * (L + v) ** p2 * mp.exp(-beta * v)

        cut = mpf(16)
        while True:
            gamma = (5 - 2 * s) / (a + cut)
            tail = g(cut) / (beta - gamma)
            if tail < mpf(2) ** (-prec - 8):
                break
            cut *= 2
        nodes = [mpf(0)]
        x = mpf(1)
        while x < cut:
            nodes.append(x)
            x *= 2
        nodes.append(cut)
        val, err = mp.quad(g, nodes, error=True)
        err = abs(err) * 10 + abs(val) * mpf(2) ** (-prec + 4)
        A_lo, A_hi = val - err, val + err + tail
        b = mpf(m + 1)
        closed = L**2 / b + 2 * L / b**2 + 2 / b**3
        Hc = mpf(H) ** c
        lo = Am * Hc * A_lo + Bm * closed
        hi = Am * Hc * A_hi + Bm * closed
    slack = abs(hi) * mpf(2) ** (-prec + 8)
    return lo - slack, hi + slack


def S4(m: int, sigma: Number, constants: AnalyticConstants | None = None):
    """Bound for the sum of gamma^-(m+1) over zeros with beta > sigma, gamma > H.

    Evaluated as (m+1) int_H^inf D(sigma, t) t^{-(m+2)} dt, which equals
    D(sigma,H)/H^{m+1} + int_H^inf dD/dt t^{-(m+1)} dt after integrating by parts.
    """
    c = _c(constants)
    _check_convergence(m, sigma)
    entry = c.density_entry(sigma)
    lo, hi = _density_integral(
        m, entry.sigma, entry.A_sigma, entry.B_sigma, c.density_k, c.riemann_height_H, iv.prec
    )
    return (m + 1) * iv.mpf([lo, hi]) / c.H ** (m + 1)


def S5(X0: Number, m: int, sigma: Number, constants: AnalyticConstants | None = None):
    """S4 with the boundary term damped by X0^{-1/(R0 log H)}."""
    c = _c(constants)
    X0 = ival(X0)
    if lower(X0) < lower(ival(c.X0_floor)):
        raise ValueError("X0 below the admissible floor")
    boundary = D(sigma, c.H, c) / c.H ** (m + 1)
    damp = X0 ** (-1 / (c.R0 * iv.log(c.H)))
    return S4(m, sigma, c) - boundary * (1 - damp)


def S5_two_term(X0: Number, m: int, sigma: Number, constants: AnalyticConstants | None = None):
    """The boundary-plus-integral form of S5 via the dD/dt route (cross-check only)."""
    c = _c(constants)
    X0 = ival(X0)
    boundary = D(sigma, c.H, c) / c.H ** (m + 1)
    damp = X0 ** (-1 / (c.R0 * iv.log(c.H)))
    return boundary * damp + ival(_derivative_integral(m, sigma, c, iv.prec))


def S4_derivative_route(m: int, sigma: Number, constants: AnalyticConstants | None = None) -> mpf:
    """D(sigma,H)/H^{m+1} + int_H^inf (dD/dt) t^{-(m+1)} dt by direct quadrature.

    Independent of :func:`S4`'s integrated-by-parts evaluation; used to check it.
    """
    c = _c(constants)
    _check_convergence(m, sigma)
    boundary = mp.mpf(ival(D(sigma, c.H, c) / c.H ** (m + 1)).mid)
    return boundary + _derivative_integral(m, sigma, c, iv.prec)


def _derivative_integral(m, sigma, c, prec) -> mpf:
    entry = c.density_entry(sigma)
    with mp.workprec(prec + 32):
        s, Am, Bm = _mpf(entry.sigma), _mpf(entry.A_sigma), _mpf(entry.B_sigma)
        k, H = _mpf(c.density_k), mpf(c.riemann_height_H)
        ex = mpf(8) / 3 * (1 - s)

        def dD(t):
            lt, lkt = mp.log(t), mp.log(k * t)
            core = lkt ** (2 * s) * lt ** (5 - 4 * s) * t**ex
            d_core = core * (2 * s / (lkt * t) + (5 - 4 * s) / (lt * t) + ex / t)
            return Am * d_core + 2 * Bm * lt / t

        # t = H e^v keeps the nodes well scaled
        f = lambda v: dD(H * mp.exp(v)) * H * mp.exp(v) * (H * mp.exp(v)) ** (-(m + 1))
        return mp.quad(f, [0, 1, 4, 16, 64, mp.inf])
