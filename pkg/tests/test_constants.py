from __future__ import annotations

from fractions import Fraction

import pytest

from prime_intervals.constants import (
    AnalyticConstants,
    ConstantsError,
    ZeroDensityEntry,
    apply_overrides,
    default_constants,
    fingerprint,
    load_overrides,
    parse_kv,
    to_kv,
)


def test_defaults():
    c = default_constants()
    assert c.riemann_height_H == 3000175332800
    assert c.zero_sum_S0 == "21.98308"
    assert c.zero_sum_N0 == 260000000
    assert c.zero_sum_T0 == 104537615
    e = c.density_entry("0.9")
    assert (e.A_sigma, e.B_sigma) == ("11.499", "3.186")
    e = c.density_entry("0.7804")
    assert (e.A_sigma, e.B_sigma) == ("5.8773", "3.869")
    assert Fraction(c.X0_floor) == Fraction("3.99e18")


def test_k_sits_at_bottom_of_window():
    c = default_constants()
    assert Fraction(c.density_k) == Fraction(10**9, c.riemann_height_H)


def test_density_entry_lookup_is_numeric():
    c = default_constants()
    assert c.density_entry("0.90").sigma == "0.9"
    with pytest.raises(KeyError):
        c.density_entry("0.8")


def test_override_S0(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("# tweak\nS0 = 22.0\n")
    c = load_overrides(p)
    assert c.zero_sum_S0 == "22.0"
    assert c.riemann_height_H == default_constants().riemann_height_H


def test_override_k_above_window(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("k = 2\n")
    with pytest.raises(ConstantsError) as exc:
        load_overrides(p)
    assert exc.value.key == "k"


def test_override_k_below_window():
    with pytest.raises(ConstantsError, match="below"):
        apply_overrides(default_constants(), {"k": "1e-9"})


def test_empty_override_file_is_identity(tmp_path):
    p = tmp_path / "empty.txt"
    p.write_text("")
    assert load_overrides(p) == default_constants()


@pytest.mark.parametrize(
    "key, value",
    [("H", "-5"), ("H", "1.5"), ("R0", "0"), ("a2", "-1"), ("N0", "0"), ("S0", "-1"),
     ("omega", "0"), ("X0_floor", "1e18"), ("A1", "x")],
)
def test_bad_override_reports_key(key, value):
    with pytest.raises(ConstantsError) as exc:
        apply_overrides(default_constants(), {key: value})
    assert exc.value.key == key


def test_unknown_key():
    with pytest.raises(ConstantsError, match="unknown"):
        apply_overrides(default_constants(), {"nope": "1"})


def test_density_override_replaces_entry():
    c = apply_overrides(default_constants(), {"density.0.78040": "5.0, 3.0"})
    e = c.density_entry("0.7804")
    assert (e.A_sigma, e.B_sigma) == ("5.0", "3.0")
    assert len(c.density_entries) == 2


def test_density_override_adds_sorted_entry():
    c = apply_overrides(default_constants(), {"density.0.85": "7, 3.5"})
    assert [e.sigma for e in c.density_entries] == ["0.7804", "0.85", "0.9"]


def test_density_entry_validation():
    with pytest.raises(ConstantsError):
        ZeroDensityEntry("0.8", "-1", "2").validate()


def test_parse_kv_rejects_garbage():
    with pytest.raises(ConstantsError, match="c.txt:2"):
        parse_kv("S0 = 1\nthis is not a pair\n", "c.txt")


def test_round_trip_bitwise():
    c = default_constants()
    text = to_kv(c)
    again = apply_overrides(AnalyticConstants(), parse_kv(text))
    assert to_kv(again) == text
    assert again == c
    assert fingerprint(again) == fingerprint(c)


def test_fingerprint_changes_with_values():
    c = default_constants()
    assert fingerprint(apply_overrides(c, {"S0": "21.98309"})) != fingerprint(c)
