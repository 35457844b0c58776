"""Regenerate the bundled fixture of the first 100 zeta-zero ordinates.

    python scripts/make_zero_fixture.py > src/prime_intervals/data/zeta_zeros_100.txt
"""
import mpmath

mpmath.mp.dps = 40
for n in range(1, 101):
    print(mpmath.nstr(mpmath.zetazero(n).imag, 30, strip_zeros=False))
