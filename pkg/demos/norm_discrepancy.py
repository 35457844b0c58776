"""Compare the exact ||f^(m)||_2 with the closed form used for the published table.

    python3 demos/norm_discrepancy.py
"""
from __future__ import annotations

from mpmath import mp

from prime_intervals._rigor import working_precision
from prime_intervals.smoothing import WeightSpec, norm2_mth_derivative, norm2_mth_derivative_published


def main() -> None:
    with working_precision(128):
        print(f"{'m':>2} {'n':>4} {'exact':>14} {'closed form':>14}")
        for m in (2, 3, 4):
            for n in (1, 3, 5, 15, 55):
                if m % 2 == 1 and n % 2 == 0:
                    continue
                w = WeightSpec(m, n)
                exact = mp.nstr(mp.mpf(norm2_mth_derivative(w).mid), 8)
                try:
                    pub = mp.nstr(mp.mpf(norm2_mth_derivative_published(w).mid), 8)
                except ValueError as exc:
                    pub = f"error: {exc}"
                print(f"{m:>2} {n:>4} {exact:>14} {pub:>14}")


if __name__ == "__main__":
    main()
