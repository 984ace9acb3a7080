"""Acceptance gate: one test per criterion, each at its stated tolerance.

A one-line verdict per criterion is printed in the pytest terminal summary.
"""
import math

import numpy as np
import pytest

from mmahh_lab import cli
from mmahh_lab.acceptance import MarkovParams, Operator
from mmahh_lab.benchmarks import make_cliff, make_jump, make_onemax
from mmahh_lab.engine import EngineConfig, run_trials
from mmahh_lab.exact import ExactChain, exact_hitting_time
from mmahh_lab.experiments import preset_parameters
from mmahh_lab.stats import fit_exponent
from mmahh_lab.validation import (
    suite_drifts,
    suite_limit,
    suite_minimality,
    suite_phases,
    suite_pkh,
)

SEED = 2024


def _verdict(checks):
    failed = [c for c in checks if not c.passed]
    return not failed, failed


def test_criterion_1_pkh_closed_form(report_criterion):
    checks = suite_pkh(ns=(5, 10, 20), tol=1e-9)
    ok, failed = _verdict(checks)
    worst = max(c.observed for c in checks)
    report_criterion(1, "p_k^h closed form vs oracle CDF", ok, f"{len(checks)} grids, max |diff| = {worst:.2e} (tol 1e-9)")
    assert ok, [c.line() for c in failed]


def test_criterion_2_drifts(report_criterion):
    checks = suite_drifts(max_n=50, tol=1e-9, mc_phases=10**6, seed=SEED)
    ok, failed = _verdict(checks)
    exact = [c for c in checks if "MC" not in c.name]
    mc = [c for c in checks if "MC" in c.name]
    z = max(abs(c.observed - c.expected) / (c.tolerance / 3) for c in mc)
    report_criterion(2, "phase drift formulas", ok,
                     f"exact max |diff| = {max(c.observed for c in exact):.2e} (tol 1e-9); "
                     f"{len(mc)} MC spots, max |z| = {z:.2f} (tol 3)")
    assert len(mc) == 10
    assert ok, [c.line() for c in failed]


def test_criterion_3_limit(report_criterion):
    checks = suite_limit(c=1.0)
    ok, failed = _verdict(checks)
    errs = ", ".join(f"{c.observed:.4f}" for c in checks[:-1])
    report_criterion(3, "p0n(n, 1) -> 1/e", ok, f"errors at n=1e3..1e6: {errs}; each <= 2/ln n, strictly decreasing")
    assert ok, [c.line() for c in failed]


def test_criterion_4_minimality(report_criterion):
    checks = suite_minimality(max_n=50)
    ok, failed = _verdict(checks)
    report_criterion(4, "minimality and monotonicity of p_k^h", ok,
                     f"violations: {int(checks[0].observed)} minimality, {int(checks[1].observed)} monotonicity (n <= 50)")
    assert ok, [c.line() for c in failed]


def test_criterion_5_simulator_vs_oracle(report_criterion):
    trials = 10**5
    worst = 0.0
    failures = []
    for family in ("onemax", "jump"):
        for n in (8, 12, 16):
            f = make_onemax(n) if family == "onemax" else make_jump(n, 3)
            for partner in (Operator.OW, Operator.AM):
                params = MarkovParams(0.05, 0.3, partner)
                exact = exact_hitting_time(ExactChain.mmahh(f, params))
                cfg = EngineConfig(f, params=params, seed=SEED + n)
                _, s = run_trials(cfg, trials)
                z = abs(s.mean_T - exact) / s.se_T
                worst = max(worst, z)
                if s.successes != trials or z > 3:
                    failures.append((family, n, partner.name, s.mean_T, exact, z))
    ok = not failures
    report_criterion(5, "simulator vs exact hitting time", ok, f"12 cells x 1e5 trials, max |z| = {worst:.2f} (tol 3)")
    assert ok, failures


def _sweep(configs, trials, budget):
    out = {}
    for key, cfg in configs.items():
        _, s = run_trials(cfg, trials)
        out[key] = s
        assert s.successes == trials, f"{key}: {s.failures} runs hit the budget of {budget}"
    return out


def test_criterion_6_seqopt_scaling(report_criterion):
    trials, budget = 200, 10**8
    ns = (16, 24, 32, 48, 64)
    jump = {}
    for n in ns:
        p, q = preset_parameters("quasilinear", n)
        jump[n] = EngineConfig(make_jump(n, 3), params=MarkovParams(p, q, Operator.OW), max_iterations=budget, seed=SEED)
    jump = _sweep(jump, trials, budget)
    fit = fit_exponent([(n, jump[n].mean_T) for n in ns], "power-times-log")
    p, q = preset_parameters("quasilinear", 48)
    cliff = {
        d: EngineConfig(make_cliff(48, d), params=MarkovParams(p, q, Operator.OW), max_iterations=budget, seed=SEED)
        for d in (4, 8, 16)
    }
    cliff = _sweep(cliff, trials, budget)
    separated = all(cliff[a].ci95[0] > cliff[b].ci95[1] for a, b in ((4, 8), (8, 16)))
    ok = fit.alpha <= 3.5 and separated
    means = ", ".join(f"d={d}: {cliff[d].mean_T:.0f}" for d in cliff)
    report_criterion(6, "OI+OW quasilinear scaling", ok,
                     f"Jump_3 exponent (power-times-log) = {fit.alpha:.3f} (<= 3.5); Cliff n=48 means {means}, "
                     f"CIs {'disjoint' if separated else 'overlap'}")
    assert fit.alpha <= 3.5
    assert separated


def test_criterion_7_separation(report_criterion):
    trials = 200
    ns = (15, 20, 25, 30)
    mm_means, mahh_means, chosen = {}, {}, {}
    for n in ns:
        f = make_jump(n, 3)
        p, q = preset_parameters("thm1-case1", n, 3)
        _, s = run_trials(EngineConfig(f, params=MarkovParams(p, q, Operator.AM), seed=SEED), trials)
        assert s.successes == trials
        mm_means[n] = s.mean_T
        best = None
        for c in (1, 2, 4):
            _, sm = run_trials(EngineConfig(f, mixing=1 / (c * n), seed=SEED), trials)
            assert sm.successes == trials
            if best is None or sm.mean_T < best[1]:
                best = (c, sm.mean_T)
        chosen[n], mahh_means[n] = best
    a_mm = fit_exponent(list(mm_means.items())).alpha
    a_mahh = fit_exponent(list(mahh_means.items())).alpha
    ratio = mahh_means[30] / mm_means[30]
    ok = a_mm <= 4.5 and a_mahh >= a_mm + 0.5 and ratio >= 2
    report_criterion(7, "MMAHH(OI,AM) vs MAHH on Jump_3", ok,
                     f"exponents {a_mm:.3f} (<= 4.5) vs {a_mahh:.3f} (>= +0.5); ratio at n=30 = {ratio:.2f} (>= 2); "
                     f"best mixing 1/(c n) with c = {[chosen[n] for n in ns]}")
    assert a_mm <= 4.5
    assert a_mahh >= a_mm + 0.5
    assert ratio >= 2


def test_criterion_8_structure(report_criterion):
    checks = suite_phases(phases=10**5, iterations=10**6, am_phases=10**6, seed=SEED)
    ok, failed = _verdict(checks)
    am = [c for c in checks if c.name.startswith("AM phase")]
    detail = "; ".join(f"{c.name.split(' ', 3)[3]}: {c.observed:.5f} >= {c.expected:.5f} - {c.tolerance:.5f}" for c in am)
    report_criterion(8, "phase structure", ok, f"{len(checks) - len(am)} selector checks within 3 SE; {detail}")
    assert ok, [c.line() for c in failed]


def test_criterion_9_determinism(report_criterion, tmp_path):
    import json

    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "jump", "n": [10, 14], "m": [2, 3], "algo": "mmahh_oi_am",
                               "rule": {"preset": "thm1-case1"}, "trials": 300, "seed": SEED}))
    blobs = []
    for degree in (1, 2, 4, 8, 1):
        out = tmp_path / f"out_{degree}_{len(blobs)}.csv"
        assert cli.main(["simulate", "--config", str(cfg), "--out", str(out), "--parallel", str(degree)]) == 0
        blobs.append(out.read_bytes())
    ok = len(set(blobs)) == 1
    report_criterion(9, "determinism", ok, f"{len(blobs)} runs at parallelism 1/2/4/8/1, {len(set(blobs))} distinct CSV")
    assert ok
