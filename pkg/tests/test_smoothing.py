from __future__ import annotations

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import iv, mp, mpf

from prime_intervals._rigor import ival, lower, upper, working_precision
from prime_intervals.smoothing import (
    WeightError,
    WeightSpec,
    f_bounds,
    lambda0,
    mean_ratio,
    norm1,
    norm1_derivative,
    norm2_mth_derivative,
    norm2_mth_derivative_published,
    norm2_mth_derivative_squared,
    nu,
)

GRID = [(m, n) for m in (2, 3) for n in (1, 3, 5, 9, 15, 55) if m % 2 == 0 or n % 2 == 1]


def q2mp(q: Fraction) -> mpf:
    return mpf(q.numerator) / q.denominator


def f_mp(w: WeightSpec):
    A = q2mp(w.A)
    return lambda t: (A * t**w.n * (1 - t)) ** w.m


def quad_pieces(w: WeightSpec):
    B = q2mp(w.B)
    return [0, B / 2, B, (1 + B) / 2, 1]


def rel_err(a, b):
    return abs(a - b) / abs(b)


# -- hand values ---------------------------------------------------------------

def test_norm1_hand_values():
    assert norm1(WeightSpec(2, 1)) == Fraction(8, 15)
    assert norm1(WeightSpec(1, 1)) == Fraction(2, 3)


def test_lambda0_hand_value():
    assert lambda0(WeightSpec(2, 1)) == Fraction(15, 4)


def test_norm2_hand_value(prec256):
    w = WeightSpec(2, 1)
    assert norm2_mth_derivative_squared(w) == Fraction(1024, 5)  # 204.8
    v = norm2_mth_derivative(w)
    exact = mp.sqrt(mpf("204.8"))
    assert lower(v) <= exact <= upper(v)
    assert upper(v) - lower(v) < mpf(2) ** -250


def test_parity_rejected():
    with pytest.raises(WeightError, match="odd"):
        WeightSpec(3, 2)


@pytest.mark.parametrize("m, n", [(0, 1), (2, 0), (-1, 3)])
def test_bad_shapes(m, n):
    with pytest.raises(WeightError):
        WeightSpec(m, n)


@given(st.integers(1, 200))
def test_A_exceeds_e(n):
    assert WeightSpec(2, n).A > Fraction(2718281828459045, 10**15)


# -- quadrature / symbolic oracles --------------------------------------------

@pytest.mark.parametrize("m", [1, 2, 3, 4])
@pytest.mark.parametrize("n", [1, 3, 7, 15, 31, 47, 55, 59])
def test_norm1_quadrature(m, n):
    w = WeightSpec(m, n)
    with mp.workdps(45):
        want = mp.quad(f_mp(w), quad_pieces(w))
        assert rel_err(q2mp(norm1(w)), want) < mpf("1e-20")


@pytest.mark.parametrize("m, n", GRID)
def test_norm1_derivative_quadrature(m, n):
    w = WeightSpec(m, n)
    with mp.workdps(45):
        A = q2mp(w.A)

        def df(t):
            return abs(m * (A * t**n * (1 - t)) ** (m - 1) * A * (n * t ** (n - 1) - (n + 1) * t**n))

        want = mp.quad(df, quad_pieces(w))
        assert rel_err(q2mp(norm1_derivative(w)), want) < mpf("1e-20")


def _symbolic_norm2_sq(w: WeightSpec) -> sp.Rational:
    t = sp.symbols("t")
    A = sp.Rational(w.A.numerator, w.A.denominator)
    fm = sp.diff((A * t**w.n * (1 - t)) ** w.m, t, w.m)
    return sp.integrate(sp.expand(fm**2), (t, 0, 1))


@pytest.mark.parametrize("m, n", GRID)
def test_norm2_symbolic(m, n):
    w = WeightSpec(m, n)
    want = _symbolic_norm2_sq(w)
    assert norm2_mth_derivative_squared(w) == Fraction(int(want.p), int(want.q))


@pytest.mark.parametrize("m, n", [(m, n) for m in (1, 2, 3) for n in range(1, 11) if m % 2 == 0 or n % 2])
def test_norm2_quadrature_of_symbolic_derivative(m, n):
    w = WeightSpec(m, n)
    t = sp.symbols("t")
    A = sp.Rational(w.A.numerator, w.A.denominator)
    fm = sp.lambdify(t, sp.diff((A * t**n * (1 - t)) ** m, t, m), "mpmath")
    with working_precision(200), mp.workdps(45):
        want = mp.sqrt(mp.quad(lambda x: fm(x) ** 2, quad_pieces(w)))
        got = norm2_mth_derivative(w)
        assert rel_err(mp.mpf(got.mid), want) < mpf("1e-15")


@pytest.mark.parametrize("n", [1, 3])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_published_norm2_agrees_for_small_n(m, n):
    w = WeightSpec(m, n)
    with working_precision(128):
        a, b = norm2_mth_derivative(w), norm2_mth_derivative_published(w)
        assert abs(mp.mpf(a.mid) - mp.mpf(b.mid)) < mpf("1e-30") * mp.mpf(a.mid)


def test_published_norm2_disagrees_for_large_n():
    w = WeightSpec(2, 55)
    with working_precision(128):
        exact = norm2_mth_derivative(w)
        printed = norm2_mth_derivative_published(w)
        assert contains_value(exact, "1883.65", mpf("1e-5"))
        assert upper(printed) < mpf("1e-20")


def contains_value(x, s, rel):
    v = mpf(s)
    return abs(mp.mpf(x.mid) - v) < rel * v


@pytest.mark.parametrize("m, n", GRID)
def test_nu_quadrature_grid(m, n):
    w = WeightSpec(m, n)
    a = "0.01"
    with working_precision(256), mp.workdps(45):
        f = f_mp(w)
        want = mp.quad(f, [0, mpf(a)]) + mp.quad(f, [1 - mpf(a), 1])
        got = nu(w, a)
        assert rel_err(mp.mpf(got.mid), want) < mpf("1e-20")


def test_nu_reference_row():
    w, a = WeightSpec(2, 55), "1.68957e-4"
    with working_precision(256), mp.workdps(50):
        f = f_mp(w)
        want = mp.quad(f, [0, mpf(a)]) + mp.quad(f, [1 - mpf(a), 1 - mpf(a) / 2, 1])
        got = nu(w, a)
        assert rel_err(mp.mpf(got.mid), want) < mpf("1e-20")
        assert lower(got) <= want * (1 + mpf("1e-30"))


def test_nu_endpoints(prec256):
    w = WeightSpec(2, 47)
    assert nu(w, 0) == 0
    half = nu(w, Fraction(1, 2))
    exact = ival(norm1(w))
    assert lower(half) <= upper(exact) and lower(exact) <= upper(half)


def test_nu_rejects_a_outside(prec256):
    with pytest.raises(WeightError):
        nu(WeightSpec(2, 3), "0.6")


@given(st.sampled_from([(2, 1), (2, 8), (3, 5), (2, 55), (4, 21)]),
       st.fractions(0, Fraction(1, 2), max_denominator=10**6),
       st.fractions(0, Fraction(1, 2), max_denominator=10**6))
@settings(max_examples=60, deadline=None)
def test_nu_nondecreasing(mn, a, b):
    w = WeightSpec(*mn)
    lo, hi = sorted((a, b))
    with working_precision(128):
        assert lower(nu(w, lo)) <= upper(nu(w, hi))


def test_mean_ratio_hand_values():
    assert mean_ratio(WeightSpec(2, 1), 0) == 1
    assert mean_ratio(WeightSpec(2, 1), Fraction(1, 10**6)) == 1 + Fraction(5, 10**7)


def test_mean_ratio_quadrature():
    w = WeightSpec(2, 47)
    with mp.workdps(60):
        d = mpf("1.39801e-12")
        f = f_mp(w)
        # compare the coefficient of delta: int t f / int f
        slope = mp.quad(lambda t: t * f(t), quad_pieces(w)) / mp.quad(f, quad_pieces(w))
        got = mean_ratio(w, Fraction("1.39801e-12"))
        assert rel_err((q2mp(got) - 1) / d, slope) < mpf("1e-20")


@given(st.integers(1, 60).filter(lambda n: n % 2), st.fractions(Fraction(1, 10**12), Fraction(1, 10**6)))
def test_mean_ratio_converges_in_m(n, d):
    target = 1 + n * d / (n + 1)
    gaps = [abs(mean_ratio(WeightSpec(m, n), d) - target) for m in range(1, 7)]
    # the gap is (n-1) d / ((n+1)(mn+m+2)): zero for n = 1, strictly decreasing otherwise
    assert all(a > b if n > 1 else a == b == 0 for a, b in zip(gaps, gaps[1:]))


@pytest.mark.parametrize("m, n", [(2, 55)] + GRID)
def test_lambda0_quadrature(m, n):
    w = WeightSpec(m, n)
    with mp.workdps(45):
        A = q2mp(w.A)
        f = f_mp(w)
        df = lambda t: abs(m * (A * t**n * (1 - t)) ** (m - 1) * A * (n * t ** (n - 1) - (n + 1) * t**n))
        want = mp.quad(df, quad_pieces(w)) / mp.quad(f, quad_pieces(w))
        assert rel_err(q2mp(lambda0(w)), want) < mpf("1e-15")


def test_lambda_prefactor_limit(prec256):
    w = WeightSpec(2, 5)
    tiny = f_bounds(w, "1e-60")
    base = ival(norm2_mth_derivative(w)) / ival(norm1(w))
    ratio = tiny.Fm_upper / base
    assert abs(mp.mpf(ratio.mid) - 1) < mpf("1e-50")


@given(st.sampled_from(GRID), st.floats(1e-36, 1e-6))
@settings(max_examples=50, deadline=None)
def test_f_bounds_ordering(mn, d):
    w = WeightSpec(*mn)
    with working_precision(128):
        F = f_bounds(w, repr(d))
        assert 0 < lower(F.F0_lower) <= lower(F.F0_upper)
        assert 0 < lower(F.F1_lower) <= upper(F.F1_lower) <= lower(F.F1_upper)
        assert lower(F.Fm_upper) > 0


@pytest.mark.parametrize("d", ["0", "-1e-9", "2e-6"])
def test_f_bounds_delta_range(prec256, d):
    with pytest.raises(WeightError):
        f_bounds(WeightSpec(2, 3), d)


def test_f_bounds_unknown_route(prec256):
    with pytest.raises(ValueError):
        f_bounds(WeightSpec(2, 3), "1e-9", norm_route="other")


def test_interval_inputs_accepted(prec256):
    w = WeightSpec(2, 5)
    a = nu(w, iv.mpf("0.01"))
    b = nu(w, "0.01")
    assert abs(mp.mpf(a.mid) - mp.mpf(b.mid)) < mpf("1e-60")
