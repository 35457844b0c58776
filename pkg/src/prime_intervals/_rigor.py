"""Interval-arithmetic helpers used for directed rounding.

Every quantity that feeds a certificate is carried as an ``mpmath.iv``
interval. The lower endpoint is the value rounded toward -inf and the
upper endpoint the value rounded toward +inf, so "rounded up" in the rest
of the package always means ``upper(x)``.
"""
from __future__ import annotations

from contextlib import contextmanager
from decimal import Decimal
from fractions import Fraction
from typing import Iterator, Union

from mpmath import iv, mp, mpf

DEFAULT_PRECISION = 256

Number = Union[int, str, Fraction, Decimal, float, "iv.mpf", mpf]


@contextmanager
def working_precision(bits: int) -> Iterator[int]:
    """Set both the interval and the point context to ``bits`` of precision."""
    if bits < 53:
        raise ValueError(f"precision must be at least 53 bits, got {bits}")
    old_iv, old_mp = iv.prec, mp.prec
    iv.prec = bits
    mp.prec = bits
    try:
        yield bits
    finally:
        iv.prec = old_iv
        mp.prec = old_mp


def to_fraction(x: Number) -> Fraction:
    """Exact rational value of a decimal string, int, Decimal or Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Decimal)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def ival(x: Number):
    """Enclose ``x`` in an interval at the current precision."""
    if isinstance(x, iv.mpf):
        return x
    if hasattr(x, "_mpi_"):
        return iv.mpf(x)
    if isinstance(x, mpf):
        return iv.mpf(x)
    if isinstance(x, int):
        return iv.mpf(x)
    q = to_fraction(x)
    if q.denominator == 1:
        return iv.mpf(q.numerator)
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def lower(x) -> mpf:
    return mp.make_mpf(ival(x)._mpi_[0])


def upper(x) -> mpf:
    return mp.make_mpf(ival(x)._mpi_[1])


def midpoint(x) -> mpf:
    x = ival(x)
    return (lower(x) + upper(x)) / 2


def rel_width(x) -> mpf:
    lo, hi = lower(x), upper(x)
    scale = max(abs(lo), abs(hi))
    if scale == 0:
        return mpf(0)
    return (hi - lo) / scale


def hull(lo, hi):
    """Interval spanning ``[lower(lo), upper(hi)]``."""
    return iv.mpf([lower(lo), upper(hi)])


def nonneg(x):
    """Clamp an enclosure of a quantity known to be >= 0."""
    x = ival(x)
    lo = lower(x)
    if lo >= 0:
        return x
    return iv.mpf([0, upper(x)])


def positive_part_upper(x):
    return max(upper(x), mpf(0))


def fmt(x: mpf, digits: int = 30) -> str:
    """Decimal string of a point value; deterministic for fixed precision."""
    return mp.nstr(mpf(x), digits, min_fixed=-4, max_fixed=6)


def fmt_up(x, digits: int = 30) -> str:
    """Decimal string that is >= the upper endpoint of ``x``."""
    hi = upper(x)
    if not mp.isfinite(hi):
        return mp.nstr(hi)
    s = mp.nstr(hi, digits, strip_zeros=False)
    if Fraction(s) < Fraction(_exact_str(hi)):
        s = mp.nstr(hi + abs(hi) * mpf(10) ** (1 - digits), digits, strip_zeros=False)
    return s


def fmt_down(x, digits: int = 30) -> str:
    """Decimal string that is <= the lower endpoint of ``x``."""
    lo = lower(x)
    if not mp.isfinite(lo):
        return mp.nstr(lo)
    s = mp.nstr(lo, digits, strip_zeros=False)
    if Fraction(s) > Fraction(_exact_str(lo)):
        s = mp.nstr(lo - abs(lo) * mpf(10) ** (1 - digits), digits, strip_zeros=False)
    return s


def _exact_str(x: mpf) -> str:
    man, exp = mp.mpf(x).man_exp
    if exp >= 0:
        return str(man * 2**exp)
    return f"{man}/{2 ** -exp}"


def truncate_sig(x: mpf, digits: int) -> str:
    """Round ``x > 0`` toward zero to ``digits`` significant figures, as ``d.dddde+NN``."""
    x = mpf(x)
    if x <= 0:
        raise ValueError("truncate_sig expects a positive value")
    q = Fraction(_exact_str(x))
    e = int(mp.floor(mp.log10(x)))
    # log10 may be off by one at exact powers of ten
    while Fraction(10) ** e > q:
        e -= 1
    while Fraction(10) ** (e + 1) <= q:
        e += 1
    scaled = q / Fraction(10) ** (e - digits + 1)
    mant = scaled.numerator // scaled.denominator
    s = str(mant)
    return f"{s[0]}.{s[1:]}e{e:+d}" if digits > 1 else f"{s}e{e:+d}"
