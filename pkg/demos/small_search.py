"""Run a small, fast parameter search at log x0 = 46 and print the winner.

    python3 demos/small_search.py
"""
from __future__ import annotations

from mpmath import mp

from prime_intervals.optimizer import SearchConfig, optimize


def main() -> None:
    cfg = SearchConfig(m_range=(2, 4), n_schedule=(1, 3, 5), de_generations=20, de_population=12, rng_seed=1)
    res = optimize(log_x0="46", config=cfg)
    b = res.best
    print(f"Delta >= {mp.nstr(b.delta_lower, 6)}  (m={b.params.m}, n={b.params.n}, delta={b.params.delta}, "
          f"a={b.params.a}, T1={b.params.T1})")
    print(f"{res.evaluations} evaluations in {res.wall_time:.1f} s")


if __name__ == "__main__":
    main()
