"""The smooth weight f(t) = (A t^n (1 - t))^m and the norms built from it.

A = (n+1)^{n+1} / n^n normalises max f = 1. Everything that is a rational
function of (m, n) is computed exactly with :class:`fractions.Fraction`;
only square roots and the powers of delta/a are taken in interval arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import comb, factorial

from mpmath import iv, mpf

from ._rigor import Number, ival, lower, rel_width, to_fraction, upper


class WeightError(ValueError):
    pass


@dataclass(frozen=True)
class WeightSpec:
    m: int
    n: int

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 1:
            raise WeightError(f"m must be a positive integer, got {self.m!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise WeightError(f"n must be a positive integer, got {self.n!r}")
        if self.m % 2 == 1 and self.n % 2 == 0:
            raise WeightError(f"n must be odd when m is odd (m={self.m}, n={self.n})")

    @cached_property
    def A(self) -> Fraction:
        n = self.n
        return Fraction((n + 1) ** (n + 1), n**n)

    @property
    def B(self) -> Fraction:
        """Turning point n/(n+1) of t^n (1 - t)."""
        return Fraction(self.n, self.n + 1)

    def poly_coeffs(self) -> list[tuple[Fraction, int]]:
        """f as a list of (coefficient, exponent)."""
        m, n = self.m, self.n
        Am = self.A**m
        return [(Am * comb(m, j) * (-1) ** j, m * n + j) for j in range(m + 1)]


@lru_cache(maxsize=512)
def norm1(w: WeightSpec) -> Fraction:
    """||f||_1 = A^m m! (mn)! / (mn+m+1)!, exactly."""
    m, n = w.m, w.n
    return w.A**m * Fraction(factorial(m) * factorial(m * n), factorial(m * n + m + 1))


@lru_cache(maxsize=512)
def norm1_derivative(w: WeightSpec) -> Fraction:
    """||f'||_1 = 2 A^m (B^n - B^{n+1})^m, exactly."""
    B = w.B
    return 2 * w.A**w.m * (B**w.n - B ** (w.n + 1)) ** w.m


@lru_cache(maxsize=512)
def norm2_mth_derivative_squared(w: WeightSpec) -> Fraction:
    """int_0^1 (f^{(m)})^2 dt, exactly, from the expansion of f^{(m)}."""
    m, n = w.m, w.n
    # f^{(m)}(t) = A^m sum_j c_j t^{mn+j-m}
    c = [
        comb(m, j) * (-1) ** j * (factorial(m * n + j) // factorial(m * n + j - m))
        for j in range(m + 1)
    ]
    total = Fraction(0)
    for j in range(m + 1):
        for l in range(m + 1):
            total += Fraction(c[j] * c[l], 2 * m * n + j + l - 2 * m + 1)
    return w.A ** (2 * m) * total


def norm2_mth_derivative(w: WeightSpec):
    """||f^{(m)}||_2 as an interval."""
    sq = norm2_mth_derivative_squared(w)
    if sq <= 0:
        raise WeightError("negative radicand in ||f^(m)||_2")
    return iv.sqrt(ival(sq))


@lru_cache(maxsize=512)
def _published_radicand(w: WeightSpec) -> Fraction:
    m, n = w.m, w.n
    s = sum(
        Fraction((-1) ** (m * n + m + k) * comb(m, k) * factorial(m * n + k),
                 factorial(2 * m * n - m + k + 1))
        for k in range(m + 1)
    )
    return w.A ** (2 * m) * factorial(m * n + m) * s


def norm2_mth_derivative_published(w: WeightSpec):
    """The alternating-sum expression for ||f^{(m)}||_2 as it appears in print.

    It agrees with :func:`norm2_mth_derivative` only for n in {1, 3}; for
    larger n it is smaller by many orders of magnitude (n = 55, m = 2 gives
    about 6e-26 against the true 1883.65). Kept for reproducing published
    margins and diagnosing why they cannot be certified.
    """
    rad = _published_radicand(w)
    if rad <= 0:
        raise WeightError(f"negative radicand in published ||f^(m)||_2 for m={w.m}, n={w.n}")
    return iv.sqrt(ival(rad))


def _lower_incomplete(w: WeightSpec, x):
    """int_0^x t^{mn} (1-t)^m dt (without the A^m factor)."""
    m, n = w.m, w.n
    total = iv.mpf(0)
    for j in range(m + 1):
        e = m * n + j + 1
        total += comb(m, j) * (-1) ** j * x**e / e
    return total


def _upper_tail(w: WeightSpec, a):
    """int_{1-a}^1 t^{mn} (1-t)^m dt (without the A^m factor)."""
    m, n = w.m, w.n
    b = 1 - a
    total = iv.mpf(0)
    for j in range(m + 1):
        e = m * n + j + 1
        total += comb(m, j) * (-1) ** j * (1 - b**e) / e
    return total


def nu(w: WeightSpec, a: Number):
    """Mass of f on [0, a] and [1 - a, 1]."""
    aq = to_fraction(a) if not hasattr(a, "_mpi_") else None
    if aq is not None:
        if not 0 <= aq <= Fraction(1, 2):
            raise WeightError(f"a must lie in [0, 1/2], got {a}")
        if aq == 0:
            return iv.mpf(0)
    prec = iv.prec
    extra = 64
    # alternating binomial sums cancel; retry with more guard bits until tight
    while True:
        iv.prec = prec + extra
        try:
            av = ival(a)
            val = (_lower_incomplete(w, av) + _upper_tail(w, av)) * ival(w.A**w.m)
        finally:
            iv.prec = prec
        if lower(val) > 0 and rel_width(val) < mpf(2) ** (-(prec - 8)):
            break
        if extra > 16 * prec:
            break
        extra *= 2
    lo, hi = max(lower(val), 0), upper(val)
    return iv.mpf([lo, hi])


def mean_ratio(w: WeightSpec, delta: Number):
    """int (1 + delta t) f / ||f||_1 = 1 + (mn+1) delta / (mn+m+2)."""
    m, n = w.m, w.n
    if hasattr(delta, "_mpi_"):
        return 1 + (m * n + 1) * delta / (m * n + m + 2)
    d = to_fraction(delta)
    if d < 0:
        raise WeightError("delta must be >= 0")
    return 1 + Fraction(m * n + 1, m * n + m + 2) * d


@dataclass(frozen=True)
class FBounds:
    F0_lower: object
    F0_upper: object
    F1_lower: object
    F1_upper: object
    Fm_upper: object


def lambda0(w: WeightSpec) -> Fraction:
    """||f'||_1 / ||f||_1 = 2 (B^n - B^{n+1})^m (mn+m+1)! / (m! (mn)!)."""
    return norm1_derivative(w) / norm1(w)


def f_bounds(w: WeightSpec, delta: Number, norm_route: str = "exact") -> FBounds:
    """Bounds on F(0), F(1) and F(m) for the weight ``w`` at smoothing width ``delta``.

    ``norm_route="published"`` swaps in :func:`norm2_mth_derivative_published`.
    """
    d = ival(delta)
    if not (lower(d) > 0 and upper(d) <= upper(ival("1e-6"))):
        raise WeightError(f"delta must lie in (0, 1e-6], got {delta}")
    if norm_route == "exact":
        nm = norm2_mth_derivative(w)
    elif norm_route == "published":
        nm = norm2_mth_derivative_published(w)
    else:
        raise ValueError(f"unknown norm_route {norm_route!r}")
    m = w.m
    lam0 = ival(lambda0(w))
    lam1 = (1 + d) ** 2 * lam0
    # ((1+d)^{2m+3} - 1)/(d(2m+3)) via the binomial expansion, no cancellation
    p = 2 * m + 3
    ratio = sum((comb(p, j) * d ** (j - 1) for j in range(1, p + 1)), iv.mpf(0)) / p
    lam = iv.sqrt(ratio) * nm / ival(norm1(w))
    return FBounds(
        F0_lower=iv.mpf(1),
        F0_upper=1 + d,
        F1_lower=lam0,
        F1_upper=lam1,
        Fm_upper=lam,
    )
