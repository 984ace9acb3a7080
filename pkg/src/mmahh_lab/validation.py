"""Validation suites comparing closed forms, the exact oracle and simulation.

Every suite returns a list of :class:`Check` records; a check passes when the
observed value is within its tolerance of the expected one (or satisfies the
stated one-sided relation).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .acceptance import MarkovParams, Operator
from .benchmarks import make_jump, make_onemax
from .bitstring import random_source
from .engine import (
    measure_am_phase_success,
    measure_pair_drift,
    measure_phase_drift,
    sample_selector,
)
from .exact import (
    ExactChain,
    am_phase_success_exact,
    am_phase_success_lower_bound,
    bound_jump_oi_am,
    bound_seqopt,
    drift_am,
    drift_am_oi,
    drift_oi,
    exact_gap_drift,
    exact_phase_outcome,
    gap_drift_lower_bound,
    p0n_at,
    phase_matrix,
    pkh_closed_form,
    pkh_ow_symmetric,
)


@dataclass(frozen=True)
class Check:
    name: str
    observed: float
    expected: float
    tolerance: float
    passed: bool
    relation: str = "|obs-exp|<=tol"

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: observed={self.observed!r} expected={self.expected!r} "
                f"tol={self.tolerance!r} ({self.relation})")


def close(name: str, observed: float, expected: float, tol: float) -> Check:
    return Check(name, float(observed), float(expected), float(tol), bool(abs(observed - expected) <= tol))


def at_least(name: str, observed: float, bound: float, slack: float = 0.0) -> Check:
    return Check(name, float(observed), float(bound), float(slack), bool(observed >= bound - slack), "obs>=exp-tol")


def pkh_rates(n: int) -> tuple[float, ...]:
    return (0.5, 0.1, 1.0 / (n * math.log(n)))


def _mc_close(name: str, estimate, expected: float, k: float = 3.0) -> Check:
    tol = k * estimate.se if estimate.se > 0 else 1e-12
    return close(name, estimate.mean, expected, tol)


def suite_pkh(ns=(5, 10, 20), tol: float = 1e-9) -> list[Check]:
    """Closed-form one-phase success probabilities against the oracle CDF."""
    checks = []
    for n in ns:
        f = make_onemax(n)
        for p in pkh_rates(n):
            chain = ExactChain.mmahh(f, MarkovParams(p, 0.5, Operator.OW))
            worst_oi = worst_ow = 0.0
            for k in range(n + 1):
                cdf = np.cumsum(exact_phase_outcome(chain, Operator.OI, k))
                closed = np.array([pkh_closed_form(n, p, k, h) for h in range(n + 1)])
                worst_oi = max(worst_oi, float(np.max(np.abs(cdf - closed))))
            # OW phase with rate p on OneMax mirrors an OI phase with rate p
            ow = phase_matrix(f.better_below(), Operator.OW, p)
            for k in range(n + 1):
                tail = np.cumsum(ow[n - k][::-1])  # P(end layer >= n - h)
                closed = np.array([pkh_ow_symmetric(n, p, k, h) for h in range(n + 1)])
                worst_ow = max(worst_ow, float(np.max(np.abs(tail - closed))))
            checks.append(close(f"pkh OI n={n} p={p:.6g} max|diff|", worst_oi, 0.0, tol))
            checks.append(close(f"pkh OW n={n} p={p:.6g} max|diff|", worst_ow, 0.0, tol))
    return checks


RATE_GRID = (0.05, 0.3, 0.7)


def suite_drifts(max_n: int = 50, tol: float = 1e-9, mc_phases: int = 0, seed: int = 0) -> list[Check]:
    """Phase drifts from phase-kernel expectations against the closed forms.

    ``mc_phases > 0`` adds Monte Carlo spot checks at 3 standard errors.
    """
    checks = []
    worst = {"AM": 0.0, "OI": 0.0, "AM+OI": 0.0}
    for n in range(2, max_n + 1):
        f = make_onemax(n)
        bb = f.better_below()
        layers = np.arange(n + 1)
        for q in RATE_GRID:
            am = phase_matrix(bb, Operator.AM, q)
            exact_am = layers - am @ layers
            closed = np.array([drift_am(n, q, i) for i in layers])
            worst["AM"] = max(worst["AM"], float(np.max(np.abs(exact_am - closed))))
            for p in RATE_GRID:
                oi = phase_matrix(bb, Operator.OI, p)
                if q == RATE_GRID[0]:
                    exact_oi = layers - oi @ layers
                    closed = np.array([drift_oi(n, p, i) for i in layers])
                    worst["OI"] = max(worst["OI"], float(np.max(np.abs(exact_oi - closed))))
                exact_pair = layers - (am @ oi) @ layers
                closed = np.array([drift_am_oi(n, p, q, i) for i in layers])
                worst["AM+OI"] = max(worst["AM+OI"], float(np.max(np.abs(exact_pair - closed))))
    for name, value in worst.items():
        checks.append(close(f"drift {name} n<={max_n} max|exact-closed|", value, 0.0, tol))
    if mc_phases:
        rng = random_source(seed, 1)
        for n, kind, i, p, q in DRIFT_SPOTS:
            f = make_onemax(n)
            if kind == "AM":
                est = measure_phase_drift(f, i, Operator.AM, q, mc_phases, rng)
                expected = drift_am(n, q, i)
            elif kind == "OI":
                est = measure_phase_drift(f, i, Operator.OI, p, mc_phases, rng)
                expected = drift_oi(n, p, i)
            else:
                est = measure_pair_drift(f, i, p, q, mc_phases, rng)
                expected = drift_am_oi(n, p, q, i)
            checks.append(_mc_close(f"drift MC {kind} n={n} i={i} p={p} q={q}", est, expected))
    return checks


# (n, phase kind, start layer, p, q)
DRIFT_SPOTS = (
    (2, "AM", 2, 0.5, 0.5),
    (10, "AM", 7, 0.5, 0.5),
    (20, "AM", 15, 0.05, 0.3),
    (2, "OI", 1, 0.5, 0.5),
    (10, "OI", 6, 0.3, 0.3),
    (30, "OI", 20, 0.05, 0.05),
    (10, "AM+OI", 8, 0.1, 0.3),
    (20, "AM+OI", 12, 0.05, 0.7),
    (30, "AM+OI", 25, 0.3, 0.05),
    (50, "AM+OI", 40, 0.05, 0.3),
)


def suite_phases(phases: int = 10**5, iterations: int = 10**6, seed: int = 0,
                 am_phases: int = 10**6) -> list[Check]:
    """Selector phase lengths, partner fraction and AM-phase success probability."""
    checks = []
    rng = random_source(seed, 2)
    for p, q in ((0.05, 0.3), (0.01, 0.2)):
        # enough steps for the requested number of OI phases
        steps = int(phases * (1 / p + 1 / q) * 1.2) + 10
        sample = sample_selector(p, 1 - q, steps, rng)
        oi = sample.oi_lengths[:phases]
        partner = sample.partner_lengths[:phases]
        for label, lengths, rate in (("OI", oi, p), ("partner", partner, q)):
            se = lengths.std(ddof=1) / math.sqrt(len(lengths))
            checks.append(close(f"phase length {label} rate={rate} (n={len(lengths)})", lengths.mean(), 1 / rate, 3 * se))
        fraction = sample_selector(p, 1 - q, iterations, rng)
        observed = fraction.partner_steps / iterations
        expected = p / (p + q)
        # binomial SE inflated by the selector's autocorrelation factor (2 - p - q)/(p + q)
        se = math.sqrt(expected * (1 - expected) / iterations * (2 - p - q) / (p + q))
        checks.append(close(f"partner fraction p={p} q={q}", observed, expected, 3 * se))
    n = 10
    for q in (0.5, 0.3):
        for m in (2, 3):
            est = measure_am_phase_success(make_jump(n, m), m, q, am_phases, rng)
            bound = am_phase_success_lower_bound(n, m, q)
            checks.append(at_least(f"AM phase success n={n} m={m} q={q}", est.mean, bound, 3 * est.se))
    return checks


def suite_minimality(max_n: int = 50) -> list[Check]:
    """``p_k^h >= p_n^0`` and monotonicity of ``p_k^h`` in ``k`` and ``h``."""
    violations = 0
    monotone = 0
    for n in range(2, max_n + 1):
        for p in pkh_rates(n):
            table = np.array([[pkh_closed_form(n, p, k, h) for h in range(n + 1)] for k in range(n + 1)])
            floor = table[n, 0]
            violations += int(np.sum(table < floor - 1e-15))
            monotone += int(np.sum(np.diff(table, axis=0) > 1e-15))  # non-increasing in k
            monotone += int(np.sum(np.diff(table, axis=1) < -1e-15))  # non-decreasing in h
    return [
        Check(f"minimality violations n<={max_n}", violations, 0, 0, violations == 0, "count==0"),
        Check(f"monotonicity violations n<={max_n}", monotone, 0, 0, monotone == 0, "count==0"),
    ]


LIMIT_NS = (10**3, 10**4, 10**5, 10**6)


def suite_limit(c: float = 1.0, ns=LIMIT_NS) -> list[Check]:
    """``p0n_at(n, c)`` approaches ``exp(-1/c)`` with error below ``2/ln n``."""
    target = math.exp(-1.0 / c)
    errors = [abs(p0n_at(n, c) - target) for n in ns]
    checks = [
        Check(f"|p0n_at({n},{c}) - e^(-1/c)|", err, 2 / math.log(n), 0.0, err <= 2 / math.log(n), "obs<=exp")
        for n, err in zip(ns, errors)
    ]
    decreasing = all(b < a for a, b in zip(errors, errors[1:]))
    checks.append(Check("error strictly decreasing", float(decreasing), 1.0, 0.0, decreasing, "bool"))
    return checks


def suite_bounds() -> list[Check]:
    """Internal consistency of the runtime bound evaluators."""
    checks = []
    n = 100
    checks.append(close("seqopt k=0 term / (n ln n)", bound_seqopt(n, ()).value / (n * math.log(n)), 1.0, 1e-12))
    for m in (3, 5):
        ratio = bound_seqopt(n, (m, 1)).value / (n**3 * math.log(n) / m)
        checks.append(close(f"jump_{m} seqopt term / (n^3 ln n / m)", ratio, 1.0, 1e-12))
    for d in (4, 8):
        ratio = bound_seqopt(n, (d, d - 1)).value / (n**3 * math.log(n) / (d * (d - 1)))
        checks.append(close(f"cliff_{d} seqopt term / (n^3 ln n / (d(d-1)))", ratio, 1.0, 1e-12))
    m = 3
    big = 10**4
    a = bound_jump_oi_am(big, m, m * 0.5 / (2 * big), 0.5)
    b = bound_jump_oi_am(2 * big, m, m * 0.5 / (4 * big), 0.5)
    checks.append(close("jump OI+AM doubling ratio ~ 2^(m+1)", b.value / a.value, 2 ** (m + 1), 0.05 * 2 ** (m + 1)))
    for q in (0.5, 0.3):
        for m in (2, 3):
            exact = am_phase_success_exact(make_jump(10, m), q, m)
            checks.append(at_least(f"exact AM success n=10 m={m} q={q} vs bound", exact,
                                   am_phase_success_lower_bound(10, m, q)))
    n, m = 12, 4
    for ones in range(n - m + 1, n):
        for op in (Operator.AM, Operator.OI):
            checks.append(at_least(f"gap drift n={n} m={m} ones={ones} {op.name}",
                                   exact_gap_drift(n, m, ones, op), gap_drift_lower_bound(n, m, ones)))
    return checks


SUITES: dict[str, Callable[..., list[Check]]] = {
    "pkh": suite_pkh,
    "drifts": suite_drifts,
    "phases": suite_phases,
    "minimality": suite_minimality,
    "limit": suite_limit,
    "bounds": suite_bounds,
}
