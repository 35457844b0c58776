"""Search for the largest certifiable Delta at a fixed x0.

Integer parameters (m, n) run on an outer schedule; the continuous ones
(log10 delta, a, log10 T1) are searched by differential evolution. Screening
evaluations run at ``search_precision`` and the winner is re-certified at
``precision_bits``.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from decimal import ROUND_CEILING, ROUND_FLOOR, ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from typing import Sequence

import numpy as np
from mpmath import mp
from scipy.optimize import differential_evolution

from ._rigor import DEFAULT_PRECISION, ival, lower, to_fraction, working_precision
from .certifier import (
    Certificate,
    ConstraintBreakdown,
    DomainError,
    PrecisionExhausted,
    SearchParams,
    certify,
    delta_cap,
    derive_X0,
    evaluate_margin,
    summary_from_constants,
    x0_from_log,
)
from .constants import AnalyticConstants, default_constants
from .smoothing import WeightError
from .zeros import ZeroSummary

log = logging.getLogger(__name__)

INFEASIBLE = 1000.0


class NoFeasiblePoint(RuntimeError):
    """The search budget ended without a certifiable parameter set."""

    def __init__(self, message: str, least_infeasible: tuple[SearchParams, ConstraintBreakdown] | None = None):
        super().__init__(message)
        self.least_infeasible = least_infeasible


def default_n_schedule(limit: int = 1201) -> tuple[int, ...]:
    """Odd n: every odd value to 15, then roughly 15% geometric steps."""
    out = list(range(1, 16, 2))
    n = 15
    while True:
        n = int(n * 1.15) | 1
        if n > limit:
            break
        if n > out[-1]:
            out.append(n)
    return tuple(out)


@dataclass(frozen=True)
class SearchConfig:
    m_range: tuple[int, int] = (2, 4)
    n_schedule: tuple[int, ...] = field(default_factory=default_n_schedule)
    de_population: int = 30
    de_weight: float = 0.8
    de_crossover: float = 0.9
    de_generations: int = 200
    de_tol: float = 1e-4
    rng_seed: int = 0
    log10_delta_bounds: tuple[float, float] | None = None
    a_bounds: tuple[float, float] = (0.0, 0.5)
    log10_T1_bounds: tuple[float, float] | None = None
    sigma0: str = "0.7804"
    stall_limit: int = 3
    search_precision: int = 128
    precision_bits: int = DEFAULT_PRECISION
    norm_route: str = "exact"

    def __post_init__(self):
        if self.de_population < 4:
            raise ValueError("de_population must be >= 4")
        lo, hi = self.m_range
        if lo < 2 or hi < lo:
            raise ValueError("m_range must satisfy 2 <= lo <= hi")
        if self.log10_delta_bounds is not None and self.log10_delta_bounds[1] > -6:
            raise ValueError("delta may not exceed 1e-6")
        if not (0 <= self.a_bounds[0] <= self.a_bounds[1] <= 0.5):
            raise ValueError("a bounds must lie in [0, 1/2]")
        if list(self.n_schedule) != sorted(set(self.n_schedule)):
            raise ValueError("n_schedule must be strictly ascending")


@dataclass
class SearchResult:
    """``trace`` rows are (generation, best Delta, its margin) as screened at
    ``search_precision`` before rounding; ``best`` is the re-certified winner.
    Before anything feasible is seen the margin column holds the least negative
    margin so far.
    """

    best: Certificate
    trace: list[tuple[int, float, float]]
    evaluations: int
    wall_time: float
    runs: list[dict] = field(default_factory=list)

    def trace_tsv(self) -> str:
        lines = ["generation\tbest_delta\tmargin"]
        for g, d, mg in self.trace:
            lines.append(f"{g}\t{d:.10e}\t{mg:.6e}")
        return "\n".join(lines) + "\n"


def _round_mantissa(x: float, places: int, rounding) -> str:
    """Round a positive float to ``d.ddddd`` x 10^e with the given direction."""
    if x == 0:
        return "0"
    d = Decimal(repr(x))
    e = d.adjusted()
    q = Decimal(1).scaleb(e - places)
    return format(d.quantize(q, rounding=rounding), "e")


class _Objective:
    def __init__(self, x0v, m, n, config, constants, zs):
        self.x0v, self.m, self.n = x0v, m, n
        self.config, self.constants, self.zs = config, constants, zs
        self.evaluations = 0
        self.least = None  # (|margin|, params, breakdown)
        self.best = (0.0, -math.inf)  # (screened Delta, its margin)

    def params(self, v: Sequence[float]) -> SearchParams:
        log_d, a, log_T1 = (float(x) for x in v)
        return SearchParams(self.m, self.n, repr(10.0 ** log_d), repr(float(a)),
                            repr(10.0 ** log_T1), self.config.sigma0)

    def margin(self, p: SearchParams) -> tuple[float, ConstraintBreakdown | None]:
        try:
            X0 = derive_X0(self.x0v, p, self.constants)
            bd = evaluate_margin(X0, p, self.constants, self.zs,
                                 norm_route=self.config.norm_route, strict=False)
        except (DomainError, WeightError, ValueError):
            return -math.inf, None
        return float(lower(bd.margin)), bd

    def __call__(self, v) -> float:
        self.evaluations += 1
        try:
            p = self.params(v)
        except DomainError:
            return INFEASIBLE + 1e6
        mg, bd = self.margin(p)
        if mg > 0:
            cap = lower(delta_cap(p))
            if float(cap) > self.best[0]:
                self.best = (float(cap), mg)
            return -float(mp.log10(cap))
        if bd is None:
            return INFEASIBLE + 1e6
        if self.least is None or -mg < self.least[0]:
            self.least = (-mg, p, bd)
        return INFEASIBLE + math.log10(1.0 + abs(mg))


def _bounds(x0v, config: SearchConfig, zs: ZeroSummary, constants: AnalyticConstants):
    if config.log10_delta_bounds is not None:
        db = config.log10_delta_bounds
    else:
        l10 = float(mp.log10(lower(x0v)))
        db = (-l10 / 2 - 3.0, -6.0)
    if config.log10_T1_bounds is not None:
        tb = config.log10_T1_bounds
    else:
        t0 = math.log10(float(to_fraction(zs.T0)))
        h = math.log10(constants.riemann_height_H)
        tb = (t0 + 1e-6, h - 1e-6)
    return [db, tuple(config.a_bounds), tb]


def _finalize(obj: _Objective, v, config, constants, zs, x0v, log_x0) -> Certificate | None:
    """Round the DE winner to five mantissa decimals and certify at full precision."""
    log_d, a, log_T1 = (float(x) for x in v)
    delta = _round_mantissa(10.0**log_d, 5, ROUND_CEILING)
    a_s = _round_mantissa(float(a), 5, ROUND_FLOOR) if a > 0 else "0"
    T1 = _round_mantissa(10.0**log_T1, 5, ROUND_HALF_EVEN)
    for bump in range(6):
        d = Fraction(delta) * (1 + Fraction(bump, 10**4))
        p = SearchParams(obj.m, obj.n, _round_mantissa(float(d), 5, ROUND_CEILING), a_s, T1, config.sigma0)
        try:
            cert = _certify(x0v, log_x0, p, constants, zs, config)
        except (DomainError, PrecisionExhausted, ValueError):
            continue
        if cert.valid:
            return cert
    return None


def _certify(x0v, log_x0, p, constants, zs, config) -> Certificate:
    if log_x0 is not None:
        return certify(None, p, constants, zs, log_x0=log_x0,
                       precision_bits=config.precision_bits, norm_route=config.norm_route)
    return certify(x0v, p, constants, zs, precision_bits=config.precision_bits,
                   norm_route=config.norm_route)


def _resolve_x0(x0, log_x0, bits):
    if (x0 is None) == (log_x0 is None):
        raise ValueError("give exactly one of x0 and log_x0")
    with working_precision(bits):
        return x0_from_log(log_x0) if log_x0 is not None else ival(x0)


def _run_de(obj, bounds, config, rng, init_extra, trace, gen0, state):
    pop = config.de_population
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    init = lo + (hi - lo) * rng.random((pop, len(bounds)))
    for i, x in enumerate(init_extra[:pop]):
        init[i] = np.clip(x, lo, hi)
    gen = [gen0]

    def callback(intermediate_result):
        gen[0] += 1
        d, mg = obj.best
        if d > state["best_delta"]:
            state["best_delta"], state["best_margin"] = d, mg
        elif state["best_delta"] == 0 and obj.least is not None:
            state["best_margin"] = max(state["best_margin"], -obj.least[0])
        trace.append((gen[0], state["best_delta"], state["best_margin"]))

    res = differential_evolution(
        obj, bounds, strategy="best1bin", maxiter=config.de_generations,
        popsize=1, tol=config.de_tol, mutation=config.de_weight,
        recombination=config.de_crossover, rng=rng, callback=callback,
        polish=False, init=init, updating="immediate", workers=1,
    )
    return res, gen[0]


def optimize(
    x0=None,
    config: SearchConfig | None = None,
    constants: AnalyticConstants | None = None,
    zero_summary: ZeroSummary | None = None,
    *,
    log_x0=None,
) -> SearchResult:
    """Largest certified Delta found at x0 (or e^{log_x0}); deterministic for a fixed seed."""
    config = config or SearchConfig()
    c = constants or default_constants()
    zs = zero_summary or summary_from_constants(c)
    if config.de_generations <= 0:
        raise NoFeasiblePoint("empty generation budget")
    t_start = time.perf_counter()
    x0v = _resolve_x0(x0, log_x0, config.precision_bits)
    bounds = _bounds(x0v, config, zs, c)

    trace: list[tuple[int, float, float]] = []
    state = {"best_delta": 0.0, "best_margin": -math.inf}
    best: Certificate | None = None
    least = None
    evaluations = 0
    runs = []
    gen = 0
    for m in range(config.m_range[0], config.m_range[1] + 1):
        schedule = [n for n in config.n_schedule if m % 2 == 0 or n % 2 == 1]
        best_order = -math.inf
        stall = 0
        carry: list[np.ndarray] = []
        for n in schedule:
            rng = np.random.default_rng(np.random.SeedSequence(config.rng_seed, spawn_key=(m, n)))
            with working_precision(config.search_precision):
                obj = _Objective(x0v, m, n, config, c, zs)
                res, gen = _run_de(obj, bounds, config, rng, carry, trace, gen, state)
            evaluations += obj.evaluations
            if obj.least is not None and (least is None or obj.least[0] < least[0]):
                least = obj.least
            cert = None
            if res.fun < INFEASIBLE:
                cert = _finalize(obj, res.x, config, c, zs, x0v, log_x0)
            run = {"m": m, "n": n, "evaluations": obj.evaluations, "screened_fun": float(res.fun)}
            if cert is not None:
                run["delta"] = float(cert.delta_lower)
                carry = [np.array(res.x)]
                if best is None or cert.delta_lower > best.delta_lower:
                    best = cert
            runs.append(run)
            log.info("m=%d n=%d -> %s", m, n, run.get("delta", "infeasible"))
            order = math.floor(math.log10(cert.delta_lower)) if cert is not None else -math.inf
            if order > best_order:
                best_order, stall = order, 0
            else:
                stall += 1
                if stall >= config.stall_limit:
                    break
    wall = time.perf_counter() - t_start
    if best is None:
        li = (least[1], least[2]) if least else None
        raise NoFeasiblePoint(
            f"no feasible parameters after {evaluations} evaluations", li
        )
    return SearchResult(best, trace, evaluations, wall, runs)


def refine(
    x0=None,
    seed_params: SearchParams | None = None,
    config: SearchConfig | None = None,
    constants: AnalyticConstants | None = None,
    zero_summary: ZeroSummary | None = None,
    *,
    log_x0=None,
) -> SearchResult:
    """Local DE around ``seed_params``: delta within 20%, a within 50%, T1 within half a decade."""
    if seed_params is None:
        raise ValueError("seed_params is required")
    config = config or SearchConfig()
    c = constants or default_constants()
    zs = zero_summary or summary_from_constants(c)
    if config.de_generations <= 0:
        raise NoFeasiblePoint("empty generation budget")
    t_start = time.perf_counter()
    x0v = _resolve_x0(x0, log_x0, config.precision_bits)
    p0 = seed_params
    ld = math.log10(float(to_fraction(p0.delta)))
    a0 = float(to_fraction(p0.a))
    lt = math.log10(float(to_fraction(p0.T1)))
    t_lo = math.log10(float(to_fraction(zs.T0))) + 1e-6
    t_hi = math.log10(c.riemann_height_H) - 1e-6
    bounds = [
        (ld - math.log10(1.2), min(ld + math.log10(1.2), -6.0)),
        (max(0.0, 0.5 * a0), min(0.5, 1.5 * a0) if a0 > 0 else 1e-6),
        (max(t_lo, lt - 0.5), min(t_hi, lt + 0.5)),
    ]
    cfg = replace(config, sigma0=p0.sigma0)

    seed_cert = None
    try:
        seed_cert = _certify(x0v, log_x0, p0, c, zs, cfg)
    except (DomainError, PrecisionExhausted):
        pass

    trace: list[tuple[int, float, float]] = []
    state = {"best_delta": 0.0, "best_margin": -math.inf}
    if seed_cert is not None and seed_cert.valid:
        state["best_delta"] = float(seed_cert.delta_lower)
        state["best_margin"] = float(seed_cert.margin)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.rng_seed, spawn_key=(p0.m, p0.n)))
    with working_precision(cfg.search_precision):
        obj = _Objective(x0v, p0.m, p0.n, cfg, c, zs)
        seed_vec = np.array([ld, a0, lt])
        res, _ = _run_de(obj, bounds, cfg, rng, [seed_vec], trace, 0, state)
    best = None
    if res.fun < INFEASIBLE:
        best = _finalize(obj, res.x, cfg, c, zs, x0v, log_x0)
    if seed_cert is not None and seed_cert.valid and (best is None or best.delta_lower < seed_cert.delta_lower):
        best = seed_cert
    if best is None:
        li = (obj.least[1], obj.least[2]) if obj.least else None
        raise NoFeasiblePoint("no feasible parameters in the neighbourhood of the seed", li)
    return SearchResult(best, trace, obj.evaluations, time.perf_counter() - t_start,
                        [{"m": p0.m, "n": p0.n, "evaluations": obj.evaluations}])


def fit_regression(rows: Sequence[tuple]) -> tuple[float, float]:
    """Least-squares fit of log Delta on log x0; rows are (log x0, Delta)."""
    if len(rows) < 3:
        raise ValueError("need at least 3 rows")
    lx = np.array([float(r[0]) for r in rows])
    ld = np.array([float(mp.log(mp.mpf(r[1]))) for r in rows])
    if np.ptp(lx) == 0:
        raise ValueError("degenerate fit: all x0 equal")
    slope, intercept = np.polyfit(lx, ld, 1)
    return float(slope), float(intercept)
