"""Term-by-term evaluation of the prime-interval condition and certificates.

The condition reads

    F(0) - (B0 + B1 + B2) X0^{-1/2} - B3(s0) X0^{s0-1} - B3(1-s0) X0^{-s0}
         - B41 - B42 X0^{-1 + 1/(R0 log H)} - u X0^{-2} / (2(e^u - 1))
         - omega X0^{-1/2} / (e^u - 1) - E(X0) > 0

and, when it holds, every x >= x0 has a prime in (x(1 - 1/Delta), x].

All terms are evaluated as intervals: the positive term contributes its lower
endpoint (F(0) >= 1) and every subtracted term its upper endpoint, so a
positive lower endpoint of the margin is a certificate.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from mpmath import iv, mp, mpf

from . import estimates as est
from ._rigor import (
    DEFAULT_PRECISION,
    Number,
    fmt_down,
    fmt_up,
    ival,
    lower,
    to_fraction,
    upper,
    working_precision,
)
from .constants import AnalyticConstants, default_constants, fingerprint
from .smoothing import WeightSpec, f_bounds, norm1, nu
from .zeros import ZeroSummary

DELTA_MAX = Fraction(1, 10**6)


class DomainError(ValueError):
    """Parameters or x0 outside the region where the condition applies."""


class PrecisionExhausted(ArithmeticError):
    """The margin's enclosure contains 0; evaluate again at higher precision."""

    def __init__(self, breakdown: "ConstraintBreakdown"):
        super().__init__("margin indeterminate at this precision, raise precision")
        self.breakdown = breakdown


@dataclass(frozen=True)
class SearchParams:
    m: int
    n: int
    delta: str
    a: str
    T1: str
    sigma0: str = "0.7804"

    def __post_init__(self):
        for name in ("delta", "a", "T1", "sigma0"):
            v = getattr(self, name)
            if not isinstance(v, str):
                object.__setattr__(self, name, _to_str(v))
        errors = []
        if not isinstance(self.m, int) or self.m < 2:
            errors.append(f"m: must be an integer >= 2, got {self.m!r}")
        if not isinstance(self.n, int) or self.n < 1:
            errors.append(f"n: must be a positive integer, got {self.n!r}")
        elif isinstance(self.m, int) and self.m % 2 == 1 and self.n % 2 == 0:
            errors.append(f"n: must be odd when m is odd (parity), got m={self.m}, n={self.n}")
        d = to_fraction(self.delta)
        if not 0 < d <= DELTA_MAX:
            errors.append(f"delta: must lie in (0, 1e-6], got {self.delta}")
        a = to_fraction(self.a)
        if not 0 <= a <= Fraction(1, 2):
            errors.append(f"a: must lie in [0, 1/2], got {self.a}")
        s = to_fraction(self.sigma0)
        if not Fraction(1, 2) < s < 1:
            errors.append(f"sigma0: must lie in (1/2, 1), got {self.sigma0}")
        if to_fraction(self.T1) <= 0:
            errors.append(f"T1: must be positive, got {self.T1}")
        if errors:
            raise DomainError("; ".join(errors))

    @property
    def u(self) -> Fraction:
        return to_fraction(self.delta) / self.m

    @property
    def weight(self) -> WeightSpec:
        return WeightSpec(self.m, self.n)

    def check_window(self, T0: Number, constants: AnalyticConstants) -> None:
        T1 = to_fraction(self.T1)
        if not to_fraction(T0) < T1 < constants.riemann_height_H:
            raise DomainError(f"T1: must lie in (T0, H) = ({T0}, {constants.riemann_height_H}), got {self.T1}")

    def to_json(self) -> dict:
        return asdict(self)


def _to_str(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def summary_from_constants(c: AnalyticConstants) -> ZeroSummary:
    return ZeroSummary(
        T0=str(c.zero_sum_T0), N0=c.zero_sum_N0, S0=c.zero_sum_S0,
        max_ordinate=str(c.zero_sum_T0), source_label="constants",
    )


def expm1(x):
    """Enclosure of e^x - 1 without cancellation for small |x|."""
    x = ival(x)
    if upper(abs(x)) > mpf("0.01"):
        return iv.exp(x) - 1
    # Taylor series; for |x| <= 1/100 the remainder is below twice the next term
    total = iv.mpf(0)
    term = iv.mpf(1)
    eps = mpf(2) ** (-iv.prec - 4)
    k = 0
    while True:
        k += 1
        term = term * x / k
        total += term
        if upper(abs(term)) <= eps * lower(abs(total)) or k > 400:
            break
    r = upper(abs(term * x)) * 2
    return total + iv.mpf([-r, r])


def x0_from_log(log_x0: Number):
    return iv.exp(ival(log_x0))


def derive_X0(x0: Number, p: SearchParams, constants: AnalyticConstants | None = None):
    """X0 = x0 e^{-u} / (1 + delta (1 - a)); rejects X0 below the floor."""
    c = constants or default_constants()
    x0 = ival(x0)
    if not lower(x0) > 0:
        raise DomainError("x0 must be positive")
    d, a = ival(p.delta), ival(p.a)
    X0 = x0 * iv.exp(-ival(p.u)) / (1 + d * (1 - a))
    if lower(X0) < upper(ival(c.X0_floor)):
        raise DomainError(f"X0 = {mp.nstr(lower(X0), 8)} is below the floor {c.X0_floor}")
    return X0


def delta_cap(p: SearchParams):
    """Delta = (1 - (1 + delta a) / (e^u (1 + delta (1 - a))))^{-1}, as an interval.

    The lower endpoint is the safe claim.
    """
    d, a, u = ival(p.delta), ival(p.a), ival(p.u)
    top = 1 + d * (1 - a)
    inv = (expm1(u) * top + d * (1 - 2 * a)) / (iv.exp(u) * top)
    return 1 / inv


_TERMS = ("B0", "B1", "B2", "B3_s0", "B3_1ms0", "B41", "B42", "trivial_term", "omega_term", "E_term")


@dataclass
class ConstraintBreakdown:
    """Per-term enclosures. ``B*`` fields are unscaled; see :meth:`scaled_terms`."""

    X0: object
    sigma0: object
    zero_free_exponent: object
    F0_lower: object
    B0: object
    B1: object
    B2: object
    B3_s0: object
    B3_1ms0: object
    B41: object
    B42: object
    trivial_term: object
    omega_term: object
    E_term: object
    margin: object
    B0_count: object = None
    B0_sum: object = None
    B1_count: object = None
    B1_sum: object = None

    def scaled_terms(self) -> dict:
        X0, s0 = self.X0, self.sigma0
        half = X0 ** (-iv.mpf(1) / 2)
        return {
            "B0": self.B0 * half,
            "B1": self.B1 * half,
            "B2": self.B2 * half,
            "B3_s0": self.B3_s0 * X0 ** (s0 - 1),
            "B3_1ms0": self.B3_1ms0 * X0 ** (-s0),
            "B41": self.B41,
            "B42": self.B42 * X0 ** (-1 + self.zero_free_exponent),
            "trivial_term": self.trivial_term,
            "omega_term": self.omega_term,
            "E_term": self.E_term,
        }

    @property
    def margin_lower(self) -> mpf:
        return lower(self.margin)

    def dominant_term(self) -> str:
        scaled = self.scaled_terms()
        return max(scaled, key=lambda k: upper(scaled[k]))

    def to_json(self, digits: int = 25) -> dict:
        out = {"F0_lower": fmt_down(self.F0_lower, digits)}
        for name in _TERMS:
            out[name] = fmt_up(getattr(self, name), digits)
        for name in ("B0_count", "B0_sum", "B1_count", "B1_sum"):
            v = getattr(self, name)
            if v is not None:
                out[name] = fmt_up(v, digits)
        out["scaled"] = {k: fmt_up(v, digits) for k, v in self.scaled_terms().items()}
        out["margin_lower"] = fmt_down(self.margin, digits)
        out["margin_upper"] = fmt_up(self.margin, digits)
        return out


def _min_upper(x, y):
    return x if upper(x) <= upper(y) else y


def evaluate_margin(
    X0: Number,
    p: SearchParams,
    constants: AnalyticConstants | None = None,
    zero_summary: ZeroSummary | None = None,
    *,
    norm_route: str = "exact",
    count_T1: int | None = None,
    strict: bool = True,
) -> ConstraintBreakdown:
    """Evaluate the condition at the ambient interval precision.

    ``count_T1`` substitutes an explicit zero count N(T1) for the P + R bound.
    With ``strict`` a margin enclosure that straddles zero raises
    :class:`PrecisionExhausted`.
    """
    c = constants or default_constants()
    zs = zero_summary or summary_from_constants(c)
    p.check_window(zs.T0, c)
    try:
        c.density_entry(p.sigma0)
    except KeyError as exc:
        raise DomainError(str(exc)) from None
    X0 = ival(X0)
    if lower(X0) < upper(ival(c.X0_floor)):
        raise DomainError("X0 below the admissible floor")

    m, w = p.m, p.weight
    d, s0 = ival(p.delta), ival(p.sigma0)
    u = ival(p.u)
    F = f_bounds(w, d, norm_route=norm_route)
    lam, lam1 = F.Fm_upper, F.F1_upper

    eh = iv.exp(u / 2)
    eh_m1 = expm1(u / 2)
    eu = iv.exp(u)
    eu_m1 = expm1(u)
    dm = d**m
    N0, S0, T0, T1 = ival(zs.N0), ival(zs.S0), ival(zs.T0), ival(p.T1)

    B0_count = 4 * F.F0_upper * N0 / (eh + 1)
    B0_sum = 4 * lam1 * S0 / ((eh + 1) * d)
    B0 = _min_upper(B0_count, B0_sum)

    NT1 = ival(count_T1) if count_T1 is not None else est.P(T1) + est.R(T1, c)
    excess = NT1 - N0
    excess = iv.mpf([max(lower(excess), 0), max(upper(excess), 0)])
    B1_count = 4 * F.F0_upper * excess / (eh + 1)
    B1_sum = 4 * lam1 * est.S1(T0, T1, c) / ((eh + 1) * d)
    B1 = _min_upper(B1_count, B1_sum)

    B2 = 2 * lam * est.S2(m, T1, c) / (eh_m1 * dm)
    S3 = est.S3(m, c)
    B3_s0 = 2 * lam * (iv.exp(u * s0) + 1) * S3 / (eu_m1 * dm)
    B3_1ms0 = 2 * lam * (iv.exp(u * (1 - s0)) + 1) * S3 / (eu_m1 * dm)
    zprefactor = 2 * lam * (eu + 1) / (eu_m1 * dm)
    B41 = zprefactor * est.S5(X0, m, p.sigma0, c)
    B42 = zprefactor * est.S4(m, p.sigma0, c)

    trivial = u * X0**-2 / (2 * eu_m1)
    omega_term = ival(c.omega) * X0 ** (-iv.mpf(1) / 2) / eu_m1
    log_den = iv.log(eu_m1 * X0)
    if lower(log_den) > 0:
        E_term = (
            2 * (1 + d) * iv.log(eu * (1 + d) * X0) * nu(w, p.a)
            / (ival(norm1(w)) * log_den)
        )
    else:
        # intervals shorter than 1 cannot be certified
        E_term = iv.mpf([mp.inf, mp.inf])

    bd = ConstraintBreakdown(
        X0=X0,
        sigma0=s0,
        zero_free_exponent=1 / (c.R0 * iv.log(c.H)),
        F0_lower=F.F0_lower,
        B0=B0, B1=B1, B2=B2, B3_s0=B3_s0, B3_1ms0=B3_1ms0, B41=B41, B42=B42,
        trivial_term=trivial, omega_term=omega_term, E_term=E_term,
        margin=iv.mpf(0),
        B0_count=B0_count, B0_sum=B0_sum, B1_count=B1_count, B1_sum=B1_sum,
    )
    margin = F.F0_lower
    for v in bd.scaled_terms().values():
        margin = margin - v
    bd.margin = margin
    if strict and lower(margin) <= 0 < upper(margin):
        raise PrecisionExhausted(bd)
    return bd


@dataclass
class Certificate:
    x0: object
    X0: object
    delta_cap: object
    params: SearchParams
    breakdown: ConstraintBreakdown
    precision_bits: int
    constants_fingerprint: str
    norm_route: str = "exact"
    log_x0: str | None = None
    zero_summary: ZeroSummary | None = field(default=None, repr=False)

    @property
    def valid(self) -> bool:
        return self.breakdown.margin_lower > 0

    @property
    def margin(self) -> mpf:
        return self.breakdown.margin_lower

    @property
    def delta_lower(self) -> mpf:
        return lower(self.delta_cap)

    def to_json(self, digits: int = 25) -> dict:
        return {
            "valid": self.valid,
            "log_x0": self.log_x0,
            "x0": fmt_down(self.x0, digits),
            "X0": fmt_down(self.X0, digits),
            "Delta": fmt_down(self.delta_cap, digits),
            "params": self.params.to_json(),
            "breakdown": self.breakdown.to_json(digits),
            "precision_bits": self.precision_bits,
            "norm_route": self.norm_route,
            "constants_fingerprint": self.constants_fingerprint,
            "zero_summary": self.zero_summary.to_json() if self.zero_summary else None,
        }

    def dumps(self, **extra) -> str:
        doc = self.to_json()
        doc.update(extra)
        return json.dumps(doc, indent=2)


def certify(
    x0: Number | None,
    p: SearchParams,
    constants: AnalyticConstants | None = None,
    zero_summary: ZeroSummary | None = None,
    *,
    log_x0: Number | None = None,
    precision_bits: int = DEFAULT_PRECISION,
    norm_route: str = "exact",
    count_T1: int | None = None,
) -> Certificate:
    """Certify (x0, Delta(p)). Give either ``x0`` or ``log_x0``.

    An invalid certificate (margin <= 0) is returned, not raised.
    """
    if (x0 is None) == (log_x0 is None):
        raise ValueError("give exactly one of x0 and log_x0")
    c = constants or default_constants()
    zs = zero_summary or summary_from_constants(c)
    with working_precision(precision_bits):
        x0v = x0_from_log(log_x0) if log_x0 is not None else ival(x0)
        X0 = derive_X0(x0v, p, c)
        bd = evaluate_margin(X0, p, c, zs, norm_route=norm_route, count_T1=count_T1)
        cap = delta_cap(p)
    return Certificate(
        x0=x0v, X0=X0, delta_cap=cap, params=p, breakdown=bd,
        precision_bits=precision_bits, constants_fingerprint=fingerprint(c),
        norm_route=norm_route, log_x0=None if log_x0 is None else str(log_x0),
        zero_summary=zs,
    )
