"""Registry of the fixed analytic inputs to the prime-interval condition.

All values are kept as decimal (or ``p/q``) strings and only parsed into
intervals at the precision the caller is working at, so raising precision
never re-rounds through a coarse intermediate.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from ._rigor import ival, to_fraction


class ConstantsError(ValueError):
    """Raised for malformed override files or violated invariants."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class ZeroDensityEntry:
    """Coefficients A(sigma), B(sigma) of the zero-density bound at one sigma."""

    sigma: str
    A_sigma: str
    B_sigma: str

    def validate(self) -> None:
        s = to_fraction(self.sigma)
        if not Fraction(1, 2) < s < 1:
            raise ConstantsError(f"density.{self.sigma}", "sigma must lie in (1/2, 1)")
        if to_fraction(self.A_sigma) <= 0 or to_fraction(self.B_sigma) <= 0:
            raise ConstantsError(f"density.{self.sigma}", "A(sigma) and B(sigma) must be positive")


@dataclass(frozen=True)
class AnalyticConstants:
    riemann_height_H: int = 3000175332800
    zero_free_R0: str = "5.573412"
    zero_count_coeffs: tuple[str, str, str] = ("0.110", "0.290", "2.290")
    zero_count_T0: str = "2.718281828459045235360287471352662497757"
    bpt_constants: tuple[str, str, str] = ("2.067", "0.059", "1/150")
    omega: str = "1.0344e-3"
    psi_theta_alphas: tuple[str, str] = ("1.0000000193378", "1.04320")
    zero_sum_T0: int = 104537615
    zero_sum_N0: int = 260000000
    zero_sum_S0: str = "21.98308"
    density_entries: tuple[ZeroDensityEntry, ...] = (
        ZeroDensityEntry("0.7804", "5.8773", "3.869"),
        ZeroDensityEntry("0.9", "11.499", "3.186"),
    )
    density_k: str = "1000000000/3000175332800"
    X0_floor: str = "3.99e18"

    # -- accessors -------------------------------------------------------
    @property
    def H(self):
        return ival(self.riemann_height_H)

    @property
    def R0(self):
        return ival(self.zero_free_R0)

    @property
    def a(self):
        return tuple(ival(c) for c in self.zero_count_coeffs)

    @property
    def A(self):
        return tuple(ival(c) for c in self.bpt_constants)

    @property
    def k(self):
        return ival(self.density_k)

    def density_entry(self, sigma) -> ZeroDensityEntry:
        s = to_fraction(sigma)
        for entry in self.density_entries:
            if to_fraction(entry.sigma) == s:
                return entry
        known = ", ".join(e.sigma for e in self.density_entries)
        raise KeyError(f"no zero-density entry for sigma={sigma} (have {known})")

    # -- invariants ------------------------------------------------------
    def validate(self) -> "AnalyticConstants":
        H = self.riemann_height_H
        if not isinstance(H, int) or H <= 0:
            raise ConstantsError("H", "must be a positive integer")
        if to_fraction(self.zero_free_R0) <= 0:
            raise ConstantsError("R0", "must be positive")
        for key, c in zip(("a1", "a2", "a3"), self.zero_count_coeffs):
            if to_fraction(c) <= 0:
                raise ConstantsError(key, "must be positive")
        if to_fraction(self.zero_count_T0) < Fraction(2718281828, 10**9):
            raise ConstantsError("R_T0", "R(T) is only available for T >= e")
        for key, c in zip(("A0", "A1", "A2"), self.bpt_constants):
            if to_fraction(c) <= 0:
                raise ConstantsError(key, "must be positive")
        if to_fraction(self.omega) <= 0:
            raise ConstantsError("omega", "must be positive")
        k = to_fraction(self.density_k)
        if k < Fraction(10**9, H):
            raise ConstantsError("k", "below admissible window [1e9/H, 1]")
        if k > 1:
            raise ConstantsError("k", "above admissible window [1e9/H, 1]")
        if self.zero_sum_N0 <= 0:
            raise ConstantsError("N0", "must be positive")
        if to_fraction(self.zero_sum_S0) <= 0:
            raise ConstantsError("S0", "must be positive")
        if not 0 < self.zero_sum_T0 < H:
            raise ConstantsError("T0", "must lie in (0, H)")
        if to_fraction(self.X0_floor) < Fraction("3.99e18"):
            raise ConstantsError("X0_floor", "may not be lowered below 3.99e18")
        sigmas = [to_fraction(e.sigma) for e in self.density_entries]
        if sigmas != sorted(sigmas) or len(set(sigmas)) != len(sigmas):
            raise ConstantsError("density", "entries must be sorted by sigma without duplicates")
        for e in self.density_entries:
            e.validate()
        return self


# Flat key -> (field, index-in-tuple or None)
_KEYS: dict[str, tuple[str, int | None]] = {
    "H": ("riemann_height_H", None),
    "R0": ("zero_free_R0", None),
    "a1": ("zero_count_coeffs", 0),
    "a2": ("zero_count_coeffs", 1),
    "a3": ("zero_count_coeffs", 2),
    "R_T0": ("zero_count_T0", None),
    "A0": ("bpt_constants", 0),
    "A1": ("bpt_constants", 1),
    "A2": ("bpt_constants", 2),
    "omega": ("omega", None),
    "alpha1": ("psi_theta_alphas", 0),
    "alpha2": ("psi_theta_alphas", 1),
    "T0": ("zero_sum_T0", None),
    "N0": ("zero_sum_N0", None),
    "S0": ("zero_sum_S0", None),
    "k": ("density_k", None),
    "X0_floor": ("X0_floor", None),
}
_INT_FIELDS = {"riemann_height_H", "zero_sum_T0", "zero_sum_N0"}


def default_constants() -> AnalyticConstants:
    return AnalyticConstants().validate()


def parse_kv(text: str, source: str = "<string>") -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConstantsError(f"{source}:{lineno}", f"expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ConstantsError(f"{source}:{lineno}", "empty key or value")
        out[key] = value
    return out


def _as_int(key: str, value: str) -> int:
    try:
        q = Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ConstantsError(key, f"not a number: {value!r}") from None
    if q.denominator != 1:
        raise ConstantsError(key, f"must be an integer, got {value!r}")
    return q.numerator


def _check_number(key: str, value: str) -> str:
    try:
        Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ConstantsError(key, f"not a number: {value!r}") from None
    return value


def apply_overrides(base: AnalyticConstants, values: Mapping[str, str]) -> AnalyticConstants:
    changes: dict = {}
    density = {e.sigma: e for e in base.density_entries}
    density_changed = False
    for key, value in values.items():
        if key.startswith("density."):
            sigma = _check_number(key, key[len("density."):])
            parts = [p.strip() for p in value.split(",")]
            if len(parts) != 2:
                raise ConstantsError(key, "expected 'A, B'")
            A, B = (_check_number(key, p) for p in parts)
            # replace any entry with the same numeric sigma
            density = {s: e for s, e in density.items() if Fraction(s) != Fraction(sigma)}
            density[sigma] = ZeroDensityEntry(sigma, A, B)
            density_changed = True
            continue
        if key not in _KEYS:
            raise ConstantsError(key, "unknown constant")
        name, idx = _KEYS[key]
        if name in _INT_FIELDS:
            parsed = _as_int(key, value)
        else:
            parsed = _check_number(key, value)
        if idx is None:
            changes[name] = parsed
        else:
            current = list(changes.get(name, getattr(base, name)))
            current[idx] = parsed
            changes[name] = tuple(current)
    if density_changed:
        changes["density_entries"] = tuple(
            sorted(density.values(), key=lambda e: Fraction(e.sigma))
        )
    return replace(base, **changes).validate()


def load_overrides(path: str | Path, base: AnalyticConstants | None = None) -> AnalyticConstants:
    """Return ``base`` with the keys listed in the override file replaced."""
    base = base if base is not None else default_constants()
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return apply_overrides(base, parse_kv(text, str(path)))


def to_kv(c: AnalyticConstants) -> str:
    """Serialize every constant in override-file format."""
    lines = []
    for key, (name, idx) in _KEYS.items():
        v = getattr(c, name)
        if idx is not None:
            v = v[idx]
        lines.append(f"{key} = {v}")
    for e in c.density_entries:
        lines.append(f"density.{e.sigma} = {e.A_sigma}, {e.B_sigma}")
    return "\n".join(lines) + "\n"


def fingerprint(c: AnalyticConstants) -> str:
    return hashlib.sha256(to_kv(c).encode("utf-8")).hexdigest()
