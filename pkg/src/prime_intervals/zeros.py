"""Ingestion of zeta-zero ordinates and the explicit sums built from them."""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterator


from ._rigor import Number, ival, to_fraction
from .constants import parse_kv


class ZeroFileError(ValueError):
    """Malformed or out-of-order ordinate file."""


class CoverageError(ValueError):
    """A requested range extends beyond the ingested ordinates."""


@dataclass(frozen=True)
class ZeroList:
    ordinates: tuple[Fraction, ...]
    source_label: str = ""

    def __post_init__(self):
        prev = None
        for i, g in enumerate(self.ordinates):
            if g <= 0:
                raise ZeroFileError(f"ordinate #{i + 1} is not positive")
            if prev is not None and g <= prev:
                raise ZeroFileError(f"ordinate #{i + 1} breaks strict ascending order")
            prev = g
        if self.ordinates and self.ordinates[0] <= 14:
            raise ZeroFileError("first ordinate must exceed 14")

    def __len__(self) -> int:
        return len(self.ordinates)

    @property
    def max_ordinate(self) -> Fraction:
        if not self.ordinates:
            return Fraction(0)
        return self.ordinates[-1]


@dataclass(frozen=True)
class ZeroSummary:
    T0: str
    N0: int
    S0: str
    max_ordinate: str
    source_label: str = ""

    def to_json(self) -> dict:
        return {
            "T0": self.T0,
            "N0": self.N0,
            "S0": self.S0,
            "max_ordinate": self.max_ordinate,
            "source_label": self.source_label,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ZeroSummary":
        return cls(str(d["T0"]), int(d["N0"]), str(d["S0"]), str(d["max_ordinate"]),
                   d.get("source_label", ""))


def _iter_lines(path: Path) -> Iterator[tuple[int, str]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield lineno, line


def _parse(lineno: int, text: str) -> Fraction:
    try:
        g = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ZeroFileError(f"line {lineno}: not a number: {text!r}") from None
    return g


def ingest(path: str | Path) -> ZeroList:
    """Read one ordinate per line. Rejects non-numeric or non-increasing lines."""
    path = Path(path)
    out: list[Fraction] = []
    for lineno, text in _iter_lines(path):
        g = _parse(lineno, text)
        if g <= 0:
            raise ZeroFileError(f"line {lineno}: ordinate must be positive")
        if out and g <= out[-1]:
            raise ZeroFileError(f"line {lineno}: ordering violation ({text} after {out[-1]})")
        if not out and g <= 14:
            raise ZeroFileError(f"line {lineno}: first ordinate must exceed 14")
        out.append(g)
    if not out:
        warnings.warn(f"{path}: no ordinates found", stacklevel=2)
    return ZeroList(tuple(out), source_label=str(path))


def bundled_fixture_path() -> Path:
    return Path(str(resources.files("prime_intervals") / "data" / "zeta_zeros_100.txt"))


def load_fixture() -> ZeroList:
    """The first 100 ordinates, shipped with the package."""
    zl = ingest(bundled_fixture_path())
    return ZeroList(zl.ordinates, "bundled:zeta_zeros_100")


def summarize(zeros: ZeroList, T0: Number) -> ZeroSummary:
    """Count ordinates <= T0 and bound the sum of their reciprocals from above."""
    T0q = to_fraction(T0)
    if T0q > zeros.max_ordinate and T0q >= 14:
        raise CoverageError(
            f"T0={T0} exceeds the ingested range (max ordinate {float(zeros.max_ordinate):.6g});"
            " the summary would undercount"
        )
    kept = [g for g in zeros.ordinates if g <= T0q]
    S0 = sum((1 / g for g in kept), Fraction(0))
    return ZeroSummary(
        T0=str(T0),
        N0=len(kept),
        S0=_decimal_up(S0),
        max_ordinate=str(float(zeros.max_ordinate)) if zeros.ordinates else "0",
        source_label=zeros.source_label,
    )


def _decimal_up(q: Fraction, digits: int = 25) -> str:
    """Shortest ``digits``-significant decimal string that is >= q (q >= 0)."""
    if q == 0:
        return "0"
    e = 0
    while Fraction(10) ** e <= q:
        e += 1
    while Fraction(10) ** (e - 1) > q:
        e -= 1
    # 10^(e-1) <= q < 10^e
    scale = Fraction(10) ** (digits - e)
    scaled = q * scale
    mant = -(-scaled.numerator // scaled.denominator)
    return str(Decimal(mant).scaleb(e - digits))


def oracle_sum_inverse_power(zeros: ZeroList, m: int, U: Number, V: Number):
    """Exact sum of gamma^-(m+1) over ingested ordinates with U < gamma <= V, as an interval."""
    if m < 1:
        raise ValueError("m must be >= 1")
    Uq, Vq = to_fraction(U), to_fraction(V)
    if Vq > zeros.max_ordinate:
        raise CoverageError(f"V={V} exceeds the ingested range")
    if Uq > Vq:
        raise ValueError("need U <= V")
    exact = sum((g ** -(m + 1) for g in zeros.ordinates if Uq < g <= Vq), Fraction(0))
    return ival(exact)


# -- streaming path for full-size lists -------------------------------------

def _next_up(x: float, steps: int = 1) -> float:
    for _ in range(steps):
        x = math.nextafter(x, math.inf)
    return x


def summarize_file(
    path: str | Path,
    T0: Number,
    checkpoint: str | Path | None = None,
    every: int = 1_000_000,
    chunk: int = 65536,
) -> ZeroSummary:
    """Streaming N0/S0 for ordinate files too large to hold in memory.

    Reciprocals are formed in binary64 and nudged two ulps upward (one for the
    parse, one for the division); each chunk is summed with ``math.fsum`` and
    nudged once more, and chunk bounds are accumulated exactly. If
    ``checkpoint`` is given, partial state is written every ``every`` lines and
    an existing checkpoint for the same file and T0 is resumed.
    """
    path = Path(path)
    T0q = to_fraction(T0)
    T0f = float(T0q)
    state = {"lines": 0, "N0": 0, "S0": Fraction(0), "last": Fraction(0)}
    if checkpoint is not None and Path(checkpoint).exists():
        kv = parse_kv(Path(checkpoint).read_text(encoding="utf-8"), str(checkpoint))
        if kv.get("file") == str(path) and Fraction(kv.get("T0", "-1")) == T0q:
            state = {
                "lines": int(kv["lines"]),
                "N0": int(kv["N0"]),
                "S0": Fraction(kv["S0_partial"]),
                "last": Fraction(kv["last_ordinate"]),
            }

    def write_checkpoint():
        if checkpoint is None:
            return
        Path(checkpoint).write_text(
            f"file = {path}\nT0 = {T0}\nlines = {state['lines']}\nN0 = {state['N0']}\n"
            f"S0_partial = {state['S0']}\nlast_ordinate = {state['last']}\n",
            encoding="utf-8",
        )

    buf: list[float] = []
    prev = state["last"]
    covered = False
    since_ckpt = 0

    def flush():
        if buf:
            s = _next_up(math.fsum(buf))
            state["S0"] += Fraction(s)
            buf.clear()

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            if lineno <= state["lines"]:
                continue
            state["lines"] = lineno
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            g = _parse(lineno, line)
            if g <= prev:
                raise ZeroFileError(f"line {lineno}: ordering violation")
            prev = g
            state["last"] = g
            if g > T0q:
                covered = True
                break
            state["N0"] += 1
            buf.append(_next_up(1.0 / float(g), 2))
            if len(buf) >= chunk:
                flush()
            since_ckpt += 1
            if since_ckpt >= every:
                flush()
                write_checkpoint()
                since_ckpt = 0
    flush()
    write_checkpoint()
    if not covered and float(state["last"]) < T0f:
        raise CoverageError(f"{path} ends at {float(state['last'])} < T0={T0}")
    return ZeroSummary(
        T0=str(T0),
        N0=state["N0"],
        S0=_decimal_up(state["S0"], 16),
        max_ordinate=str(float(state["last"])),
        source_label=str(path),
    )


def write_summary(summary: ZeroSummary, path: str | Path, manifest: dict | None = None) -> None:
    doc = summary.to_json()
    if manifest is not None:
        doc["manifest"] = manifest
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def read_summary(path: str | Path) -> ZeroSummary:
    return ZeroSummary.from_json(json.loads(Path(path).read_text(encoding="utf-8")))
