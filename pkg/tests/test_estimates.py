from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import iv, mp, mpf

from prime_intervals import estimates as est
from prime_intervals._rigor import ival, lower, rel_width, upper, working_precision
from prime_intervals.constants import default_constants

C = default_constants()


def contains(x, value, rel=mpf(0)):
    slack = abs(value) * rel
    return lower(x) - slack <= value <= upper(x) + slack


def test_P_at_2pi(prec256):
    assert contains(est.P(2 * iv.pi), mpf(-1) / 8)


def test_P_at_2pi_e(prec256):
    # T/2pi = e: e*1 - e + 7/8
    assert contains(est.P(2 * iv.pi * iv.e), mpf(7) / 8)


def test_P_at_H_against_independent_evaluation(prec256):
    got = est.P(C.H)
    with mp.workdps(120):
        H = mpf(C.riemann_height_H)
        w = H / (2 * mp.pi)
        want = w * mp.log(w) - w + mpf(7) / 8
        assert lower(got) <= want <= upper(got)
    assert rel_width(got) < mpf(2) ** -240


def test_R_at_e(prec256):
    assert contains(est.R(iv.e), mpf("2.4"))


def test_R_at_e_to_e(prec256):
    e = mp.e
    assert contains(est.R(iv.exp(iv.e)), mpf("0.110") * e + mpf("0.290") + mpf("2.290"))


def test_R_below_e_rejected(prec256):
    with pytest.raises(ValueError):
        est.R(2)


def _D_oracle(sigma, T, A, B):
    with mp.workdps(150):
        s, T = mpf(sigma), mpf(T)
        k = mpf(10**9) / mpf(C.riemann_height_H)
        return (mpf(A) * mp.log(k * T) ** (2 * s) * mp.log(T) ** (5 - 4 * s) * T ** (mpf(8) / 3 * (1 - s))
                + mpf(B) * mp.log(T) ** 2)


@pytest.mark.parametrize("sigma, A, B", [("0.7804", "5.8773", "3.869"), ("0.9", "11.499", "3.186")])
def test_D_matches_substitution(prec256, sigma, A, B):
    got = est.D(sigma, C.H)
    want = _D_oracle(sigma, C.riemann_height_H, A, B)
    assert contains(got, want, mpf(10) ** -70)


def test_D_rejects_unknown_sigma(prec256):
    with pytest.raises(KeyError):
        est.D("0.8", C.H)


def test_D_requires_T_at_least_H(prec256):
    with pytest.raises(ValueError):
        est.D("0.9", 10**6)


def test_S1_degenerate_window(prec256):
    T0 = ival(C.zero_sum_T0)
    A0, A1, A2 = C.A
    E = (A0 + A1 * iv.log(T0)) * 2 / T0**2 + (A1 + A2) / T0**2
    want = est.R(T0) / T0 + (est.R(T0) + iv.mpf(1) / 2) / T0 + E
    got = est.S1(T0, T0)
    assert contains(got, mp.mpf(want.mid), mpf(10) ** -60)


def test_S1_doubling_T1_increases(prec256):
    a = est.S1(C.zero_sum_T0, "1.04538e8")
    b = est.S1(C.zero_sum_T0, "2.09076e8")
    assert lower(b) > upper(a)


def test_S1_window_order(prec256):
    with pytest.raises(ValueError):
        est.S1(2 * C.zero_sum_T0, C.zero_sum_T0)


def test_S2_degenerate_window(prec256):
    m, H = 2, C.H
    got = est.S2(m, H)
    base = est.R(H) / H ** (m + 1) + (est.R(H) + iv.mpf(1) / 2) / H ** (m + 1)
    assert lower(got) > lower(base)
    assert upper(got) < upper(base) * (1 + mpf("1e-6"))


def test_S2_positive_and_decreasing_in_m(prec256):
    vals = [est.S2(m, "1.04538e8") for m in (2, 3, 4)]
    assert lower(vals[0]) > 0
    assert lower(vals[0]) > upper(vals[1]) > 0
    assert lower(vals[1]) > upper(vals[2]) > 0


def test_S2_window_against_three_zeros(prec256, three_zero_file):
    from prime_intervals.zeros import ingest, oracle_sum_inverse_power

    zl = ingest(three_zero_file)
    bound = est.S2(2, 15, V="25.010858")
    assert lower(bound) >= upper(oracle_sum_inverse_power(zl, 2, 15, "25.010858"))


@given(m=st.integers(2, 4), U=st.floats(15, 200), w=st.floats(0, 36))
@settings(max_examples=60, deadline=None)
def test_S2_window_dominates_fixture(fixture_zeros, m, U, w):
    from prime_intervals.zeros import oracle_sum_inverse_power

    V = min(U + w, float(fixture_zeros.max_ordinate))
    with working_precision(96):
        assert lower(est.S2(m, repr(U), V=repr(V))) >= upper(
            oracle_sum_inverse_power(fixture_zeros, m, repr(U), repr(V))
        )


def test_S3_term_by_term(prec256):
    m = 2
    got = est.S3(m)
    with mp.workdps(150):
        H = mpf(C.riemann_height_H)
        a1, a2, a3 = (mpf(x) for x in ("0.110", "0.290", "2.290"))
        A0, A1, A2 = mpf("2.067"), mpf("0.059"), mpf(1) / 150
        R = a1 * mp.log(H) + a2 * mp.log(mp.log(H)) + a3
        main = (1 + m * mp.log(H / (2 * mp.pi))) / (m * m * H**m) / (2 * mp.pi)
        want = main + R / H ** (m + 1) + 2 * (m + 1) * (A0 + A1 * mp.log(H)) / H ** (m + 1) + (A1 + A2) / H ** (m + 2)
        assert contains(got, want, mpf(10) ** -70)


def test_S3_positive_decreasing(prec256):
    vals = [est.S3(m) for m in (2, 3, 4, 5)]
    for a, b in zip(vals, vals[1:]):
        assert lower(a) > upper(b) > 0


@pytest.mark.parametrize("sigma", ["0.7804", "0.9"])
@pytest.mark.parametrize("m", [2, 3])
def test_S4_routes_agree(sigma, m):
    with working_precision(128):
        a = est.S4(m, sigma)
        b = est.S4_derivative_route(m, sigma)
        assert abs(b - mp.mpf(a.mid)) <= mpf("1e-6") * abs(b)
        assert rel_width(a) < mpf("1e-30")


@pytest.mark.parametrize("sigma", ["0.7804", "0.9"])
def test_S4_decreasing_in_m(prec256, sigma):
    a, b = est.S4(2, sigma), est.S4(3, sigma)
    assert lower(b) > 0
    assert upper(b) < lower(a)


def test_S4_matches_direct_quadrature(prec256):
    # (m+1) int_H^inf D(sigma, t) t^{-(m+2)} dt in the t variable
    m, sigma = 2, "0.9"
    got = est.S4(m, sigma)
    with mp.workdps(40):
        H = mpf(C.riemann_height_H)
        f = lambda t: _D_oracle(sigma, t, "11.499", "3.186") * t ** (-(m + 2))
        want = (m + 1) * mp.quad(f, [H, 10 * H, 1000 * H, mp.inf])
    assert abs(want - mp.mpf(got.mid)) < mpf("1e-12") * want


def test_S4_divergent_sigma_rejected(prec256):
    with pytest.raises(ValueError):
        est.S4(1, "0.7804")


def test_S5_less_than_S4(prec256):
    s4 = est.S4(2, "0.7804")
    s5 = est.S5(C.X0_floor, 2, "0.7804")
    assert 0 < lower(s5) and upper(s5) < lower(s4)


def test_S5_matches_two_term_form(prec256):
    for X0 in ("3.99e18", "1e20", "1e40"):
        a = est.S5(X0, 2, "0.7804")
        b = est.S5_two_term(X0, 2, "0.7804")
        assert abs(mp.mpf(a.mid) - mp.mpf(b.mid)) < mpf("1e-6") * mp.mpf(a.mid)


def test_S5_large_X0_limit(prec256):
    # the damped boundary term vanishes as X0 grows
    s4 = est.S4(2, "0.7804")
    limit = s4 - est.D("0.7804", C.H) / C.H**3
    far = est.S5(iv.exp(iv.mpf(10) ** 6), 2, "0.7804")
    assert abs(mp.mpf(far.mid) - mp.mpf(limit.mid)) < mpf("1e-30") * mp.mpf(limit.mid)


def test_S5_rejects_small_X0(prec256):
    with pytest.raises(ValueError):
        est.S5("1e18", 2, "0.7804")


@pytest.mark.parametrize(
    "name, fn",
    [
        ("S1", lambda: est.S1(C.zero_sum_T0, "1.04538e8")),
        ("S2", lambda: est.S2(2, "1.04538e8")),
        ("S3", lambda: est.S3(2)),
        ("S4", lambda: est.S4(2, "0.7804")),
        ("S5", lambda: est.S5("4e18", 2, "0.7804")),
    ],
)
def test_precision_doubling_stable(name, fn):
    with working_precision(256):
        a = fn()
    with working_precision(512):
        b = fn()
    assert lower(a) > 0
    ma, mb = mp.mpf(a.mid), mp.mpf(b.mid)
    with mp.workprec(512):
        assert abs(ma - mb) < mpf("1e-20") * abs(mb), name
