"""Published (x0, Delta) rows and their reproduction."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mpf

from ._rigor import DEFAULT_PRECISION, truncate_sig
from .certifier import Certificate, DomainError, PrecisionExhausted, SearchParams, certify
from .constants import AnalyticConstants
from .zeros import ZeroSummary


@dataclass(frozen=True)
class PublishedRow:
    label: str
    m: int
    n: int
    delta: str
    a: str
    T1: str
    Delta: str
    x0: str | None = None
    log_x0: str | None = None

    @property
    def params(self) -> SearchParams:
        return SearchParams(self.m, self.n, self.delta, self.a, self.T1)

    @property
    def log_x0_value(self) -> mpf:
        from mpmath import log

        return log(mpf(self.x0)) if self.x0 is not None else mpf(self.log_x0)


TABLE2 = (
    PublishedRow("log(4e18)", 2, 47, "1.39801e-12", "4.71958e-4", "1.04538e8", "4.7716e11", x0="4e18"),
    PublishedRow("43", 2, 47, "1.25109e-12", "7.18155e-4", "1.04538e8", "5.3337e11", log_x0="43"),
    PublishedRow("46", 2, 55, "2.24285e-13", "1.68957e-4", "1.04538e8", "2.9730e12", log_x0="46"),
    PublishedRow("50", 2, 61, "2.89470e-14", "5.18010e-4", "1.04538e8", "2.3046e13", log_x0="50"),
    PublishedRow("55", 2, 85, "2.36015e-15", "3.22142e-4", "1.04538e8", "2.8258e14", log_x0="55"),
    PublishedRow("60", 2, 97, "1.93623e-16", "2.68169e-4", "1.04538e8", "3.4443e15", log_x0="60"),
    PublishedRow("75", 2, 201, "1.16349e-19", "1.32872e-4", "1.99909e12", "5.7309e18", log_x0="75"),
    PublishedRow("90", 2, 465, "6.51627e-23", "5.99304e-4", "6.63318e11", "1.0238e22", log_x0="90"),
    PublishedRow("105", 2, 609, "3.68107e-26", "4.71942e-4", "3.00017e12", "1.8122e25", log_x0="105"),
    PublishedRow("120", 2, 885, "4.26161e-29", "6.99513e-4", "8.47291e11", "1.5658e28", log_x0="120"),
    PublishedRow("135", 3, 1029, "2.35880e-32", "5.14483e-4", "3.00017e12", "3.1820e31", log_x0="135"),
    PublishedRow("150", 2, 1171, "7.03676e-36", "3.08515e-4", "1.90772e12", "9.4779e34", log_x0="150"),
)

# log x0 -> published Delta; parameters were not published
TABLE3 = {"300": "4.4893e67", "600": "6.0664e132"}

# Published fit: log Delta ~ slope * log x0 + intercept
REGRESSION = ("0.496", "5.896")


@dataclass
class RowResult:
    row: PublishedRow
    certificate: Certificate | None
    delta_ours: str
    delta_scale: Fraction
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.certificate is not None and self.certificate.valid

    @property
    def delta_matches(self) -> bool:
        return self.delta_ours == _normal(self.row.Delta)


def _normal(s: str) -> str:
    mant, exp = s.lower().split("e")
    return f"{mant}e{int(exp):+d}"


def certify_row(
    row: PublishedRow,
    constants: AnalyticConstants | None = None,
    zero_summary: ZeroSummary | None = None,
    *,
    precision_bits: int = DEFAULT_PRECISION,
    norm_route: str = "exact",
    delta_scale: Fraction = Fraction(1),
) -> Certificate:
    p = row.params
    if delta_scale != 1:
        p = SearchParams(p.m, p.n, Fraction(p.delta) * delta_scale, p.a, p.T1, p.sigma0)
    kw = dict(precision_bits=precision_bits, norm_route=norm_route)
    if row.x0 is not None:
        return certify(row.x0, p, constants, zero_summary, **kw)
    return certify(None, p, constants, zero_summary, log_x0=row.log_x0, **kw)


def reproduce_table2(
    constants: AnalyticConstants | None = None,
    zero_summary: ZeroSummary | None = None,
    *,
    precision_bits: int = DEFAULT_PRECISION,
    norm_route: str = "exact",
    max_delta_scale: Fraction = Fraction(101, 100),
    scale_steps: int = 10,
) -> list[RowResult]:
    """Certify each published row; failing rows retry with delta scaled up to ``max_delta_scale``.

    ``delta_ours`` is always the Delta of the published parameters, truncated
    to five significant figures.
    """
    out = []
    for row in TABLE2:
        cert = None
        err = None
        scale = Fraction(1)
        ours = truncate_sig(certify_row_delta(row), 5)
        scales = [Fraction(1)] + [
            1 + (max_delta_scale - 1) * Fraction(i, scale_steps) for i in range(1, scale_steps + 1)
        ]
        for s in scales:
            try:
                cert = certify_row(row, constants, zero_summary, precision_bits=precision_bits,
                                   norm_route=norm_route, delta_scale=s)
            except (DomainError, PrecisionExhausted) as exc:
                err = str(exc)
                cert = None
                continue
            scale = s
            err = None
            if cert.valid:
                break
        out.append(RowResult(row, cert, ours, scale, err))
    return out


def certify_row_delta(row: PublishedRow) -> mpf:
    from ._rigor import lower, working_precision
    from .certifier import delta_cap

    with working_precision(DEFAULT_PRECISION):
        return lower(delta_cap(row.params))
