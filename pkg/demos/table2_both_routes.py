"""Certify every Table 2 row with the exact norm and with the published closed form.

    python3 demos/table2_both_routes.py
"""
from __future__ import annotations

from mpmath import mp

from prime_intervals.tables import reproduce_table2


def main() -> None:
    for route in ("exact", "published"):
        print(f"norm route: {route}")
        for r in reproduce_table2(norm_route=route):
            c = r.certificate
            margin = mp.nstr(c.margin, 4) if c is not None else r.error
            dom = c.breakdown.dominant_term() if c is not None else "-"
            print(f"  {r.row.label:<12} Delta={r.delta_ours:<12} pass={r.passed!s:<5} "
                  f"delta x{r.delta_scale}  margin={margin}  dominant={dom}")


if __name__ == "__main__":
    main()
