import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmahh_lab.acceptance import MarkovParams, Operator
from mmahh_lab.benchmarks import make_cliff, make_jump, make_onemax, random_seqopt
from mmahh_lab.bitstring import random_source
from mmahh_lab.exact import (
    DENSE_STATE_LIMIT,
    ExactChain,
    am_phase_success_exact,
    am_phase_success_lower_bound,
    bound_jump_oi_am,
    bound_seqopt,
    drift_am,
    drift_am_oi,
    drift_am_oi_expanded,
    drift_oi,
    exact_gap_drift,
    exact_hitting_time,
    exact_phase_outcome,
    gap_drift_lower_bound,
    move_matrix,
    p0n_at,
    pair_drift_exact,
    phase_drift_exact,
    phase_matrix,
    pkh_closed_form,
    pkh_gamma_ratio,
    pkh_ow_symmetric,
    potential_d,
)

import oracles

rates = st.floats(0.001, 0.999)


def chain(f, p, q, partner=Operator.OW):
    return ExactChain.mmahh(f, MarkovParams(p, q, partner))


# -- closed forms -----------------------------------------------------------


def test_pkh_examples():
    assert pkh_closed_form(10, 0.3, 4, 4) == 1.0
    assert pkh_closed_form(10, 0.3, 2, 7) == 1.0
    assert math.isclose(pkh_closed_form(2, 0.5, 1, 0), 2 / 3, rel_tol=1e-14)
    assert math.isclose(pkh_ow_symmetric(2, 0.5, 1, 0), 2 / 3, rel_tol=1e-14)


@given(st.integers(1, 200), rates, st.data())
def test_pkh_one_step_case(n, p, data):
    h = data.draw(st.integers(0, n - 1))
    a = n * p / (1 - p)
    expected = (1 / (1 - p)) * (h + 1) / (a + h + 1)
    assert math.isclose(pkh_closed_form(n, p, h + 1, h), min(1.0, expected), rel_tol=1e-12)


@given(st.integers(1, 2000), rates, st.data())
def test_pkh_matches_gamma_ratio(n, p, data):
    k = data.draw(st.integers(0, n))
    h = data.draw(st.integers(0, n))
    assert math.isclose(pkh_closed_form(n, p, k, h), min(1.0, pkh_gamma_ratio(n, p, k, h)), rel_tol=1e-9)


@given(st.integers(1, 60), rates, st.data())
def test_pkh_ow_equals_oi(n, q, data):
    k, h = data.draw(st.integers(0, n)), data.draw(st.integers(0, n))
    assert pkh_ow_symmetric(n, q, k, h) == pkh_closed_form(n, q, k, h)


def test_pkh_recurrence():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n = int(rng.integers(2, 80))
        p = float(rng.uniform(0.001, 0.999))
        k = int(rng.integers(1, n + 1))
        h = int(rng.integers(0, k))
        one_step = (k / n) * (h == k - 1)
        rhs = (one_step * p + (n - k) / n * (1 - p) * pkh_closed_form(n, p, k, h)
               + k / n * (1 - p) * pkh_closed_form(n, p, k - 1, h))
        assert abs(pkh_closed_form(n, p, k, h) - rhs) <= 1e-12


@pytest.mark.parametrize("n", [3, 6, 9])
@pytest.mark.parametrize("p", [0.5, 0.1])
def test_pkh_against_series(n, p):
    # brute-force sum over phase lengths, independent of the linear solve
    values = oracles.layer_values("onemax", n)
    for k in range(n + 1):
        law = oracles.phase_end_law(values, "OI", p, k)
        cdf = np.cumsum(law)
        for h in range(n + 1):
            assert abs(cdf[h] - pkh_closed_form(n, p, k, h)) <= 1e-12


def test_p0n_bracket_and_monotone_in_c():
    value = p0n_at(10**4, 1)
    assert 0.25 < value < 0.45
    assert value < math.exp(-1) + 0.05
    values = [p0n_at(500, c) for c in (0.5, 1, 2, 4, 8, 16)]
    assert all(b > a for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        p0n_at(1, 1)


def test_drift_examples():
    for q in (0.1, 0.5, 0.9):
        assert drift_am(10, q, 5) == 0
        assert math.isclose(drift_am(2, q, 2), 1.0)
    assert drift_oi(10, 0.3, 0) == 0
    assert math.isclose(drift_oi(2, 0.5, 1), 2 / 3)
    assert math.isclose(drift_am_oi(10, 0.2, 0.3, 5), drift_oi(10, 0.2, 5))


@given(st.integers(2, 500), rates, rates, st.data())
def test_drift_oi_below_distance(n, p, q, data):
    i = data.draw(st.integers(1, n))
    assert drift_oi(n, p, i) < i


def test_drift_am_oi_expanded_identity():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        n = int(rng.integers(2, 1000))
        p, q = rng.uniform(0.001, 0.999, size=2)
        i = float(rng.uniform(0, n))
        assert abs(drift_am_oi(n, p, q, i) - drift_am_oi_expanded(n, p, q, i)) <= 1e-12 * max(1, abs(i))


@pytest.mark.parametrize("n", [2, 5, 13, 30])
def test_drifts_match_phase_kernel(n):
    f = make_onemax(n)
    for p in (0.05, 0.3, 0.7):
        for q in (0.05, 0.3, 0.7):
            for i in range(n + 1):
                assert abs(phase_drift_exact(f, Operator.AM, q, i) - drift_am(n, q, i)) <= 1e-9
                assert abs(phase_drift_exact(f, Operator.OI, p, i) - drift_oi(n, p, i)) <= 1e-9
                assert abs(pair_drift_exact(f, p, q, i) - drift_am_oi(n, p, q, i)) <= 1e-9


def test_am_success_bound():
    assert math.isclose(am_phase_success_lower_bound(10, 2, 0.5), 0.02)
    assert math.isclose(am_phase_success_lower_bound(10, 3, 0.5), 0.5 * 6 / 1000)
    values = [am_phase_success_lower_bound(n, 3, 0.3) for n in (5, 10, 20, 40)]
    assert all(b < a for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        am_phase_success_lower_bound(10, 1, 0.5)


@pytest.mark.parametrize("q", [0.5, 0.3, 0.1])
@pytest.mark.parametrize("m", [2, 3, 4])
def test_am_success_exact_above_bound(q, m):
    f = make_jump(10, m)
    assert am_phase_success_exact(f, q, m) >= am_phase_success_lower_bound(10, m, q)


def test_am_success_grace_monotone():
    f = make_jump(10, 3)
    assert am_phase_success_exact(f, 0.3, 3, grace=1) > am_phase_success_exact(f, 0.3, 3, grace=0)
    assert am_phase_success_exact(f, 0.3, 0) == 1.0


def test_potential():
    assert potential_d(7, 10, 3) == 0
    assert potential_d(10, 10, 3) == 0
    assert potential_d(9, 10, 3) == 2
    assert gap_drift_lower_bound(10, 3, 8) == 2 / 10
    with pytest.raises(ValueError):
        gap_drift_lower_bound(10, 3, 7)


@pytest.mark.parametrize("n, m", [(12, 4), (20, 5), (9, 2)])
def test_gap_drift_exceeds_bound(n, m):
    for ones in range(n - m + 1, n):
        for op in (Operator.AM, Operator.OI):
            assert exact_gap_drift(n, m, ones, op) >= gap_drift_lower_bound(n, m, ones)


# -- bounds -----------------------------------------------------------------


def test_bound_seqopt_cases():
    n = 64
    assert math.isclose(bound_seqopt(n, ()).value, n * math.log(n))
    assert math.isclose(bound_seqopt(n, (3, 1)).value, n**3 * math.log(n) / 3)
    assert math.isclose(bound_seqopt(n, (8, 7)).value, n**3 * math.log(n) / 56)
    assert not bound_seqopt(n, (3, 5)).ok


def test_bound_jump_case1_shape():
    m = 3
    for n in (100, 1000):
        report = bound_jump_oi_am(n, m, m * 0.5 / (2 * n), 0.5)
        shape = n**2 + 2 ** (m - 2) * n ** (m + 1) / math.factorial(m - 1)
        assert 0.5 < report.value / shape < 10
        assert report.ok
    ratio = bound_jump_oi_am(2000, m, m / (4 * 2000), 0.5).value / bound_jump_oi_am(1000, m, m / (4 * 1000), 0.5).value
    assert abs(ratio - 16) < 0.1


def test_bound_jump_case2_shape():
    m, c, d = 3, 2, 1
    q = 1 / (d * m)
    for n in (10**3, 10**4):
        report = bound_jump_oi_am(n, m, m * q / (c * n), q)
        shape = math.exp(1 / d) * n ** (m + 1) / math.factorial(m - 1)
        assert 0.2 < report.value / shape < 50


def test_bound_jump_flags_precondition():
    report = bound_jump_oi_am(20, 3, 0.9, 0.5)
    assert not report.ok
    assert report.value > 0
    assert bound_jump_oi_am(20, 3, 0.01, 0.5, exponent=2).params["exponent"] == 2


# -- exact chain --------------------------------------------------------------


@pytest.mark.parametrize("f", [make_onemax(7), make_jump(9, 3), make_cliff(8, 3)])
@pytest.mark.parametrize("partner", [Operator.AM, Operator.OW])
def test_kernel_is_stochastic(f, partner):
    ch = chain(f, 0.2, 0.4, partner)
    assert np.allclose(ch.kernel.sum(axis=1), 1.0, atol=1e-12)
    for op in (Operator.OI, partner):
        move = move_matrix(f.better_below(), op)
        rows, cols = np.nonzero(move)
        assert np.all(np.abs(rows - cols) <= 1)


def test_trivial_hitting_times():
    ch = chain(make_onemax(1), 0.5, 0.5)
    assert exact_hitting_time(ch, (1, Operator.OI)) == pytest.approx(1.0, abs=1e-12)
    assert exact_hitting_time(ch, (0, Operator.OW)) == 0.0
    # from (1, OW) the first flip is rejected; expected 3 from the rational oracle
    assert exact_hitting_time(ch, (1, Operator.OW)) == pytest.approx(3.0, abs=1e-12)


# frozen with tests/oracles.py (exact Fraction elimination)
FROZEN = [
    ("onemax", 10, None, "OW", 1 / (10 * math.log(10)), None, 74.62008167087654),
    ("onemax", 10, None, "AM", 1 / (10 * math.log(10)), None, 53.09368228225111),
    ("jump", 8, 3, "AM", 0.05, 0.3, 1688.6173931754195),
    ("jump", 8, 3, "OW", 0.05, 0.3, 1399.9683734472371),
    ("cliff", 8, 3, "OW", 0.1, 0.2, 325.4254953609234),
]


@pytest.mark.parametrize("family, n, param, partner, p, q, expected", FROZEN)
def test_hitting_time_frozen(family, n, param, partner, p, q, expected):
    q = p if q is None else q
    f = {"onemax": lambda: make_onemax(n), "jump": lambda: make_jump(n, param), "cliff": lambda: make_cliff(n, param)}[family]()
    value = exact_hitting_time(chain(f, p, q, Operator[partner]))
    assert value == pytest.approx(expected, rel=1e-10)


def test_mahh_chain_frozen():
    assert exact_hitting_time(ExactChain.mahh(make_onemax(20), 0.01)) == pytest.approx(61.47395295049519, rel=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 6), st.integers(1, 9), st.integers(1, 9), st.sampled_from(["AM", "OW"]), st.integers(0, 10**6))
def test_hitting_time_against_rational_oracle(n, pi, qi, partner, seed):
    p, q = Fraction(pi, 10), Fraction(qi, 10)
    k = int(random_source(seed).integers(0, n))
    optima = sorted(random_source(seed, 1).choice(np.arange(1, n), size=min(k, n - 1), replace=False), reverse=True)
    f = random_seqopt(n, optima, random_source(seed, 2))
    values = [Fraction(v) for v in f.values]
    times = oracles.hitting_times(values, partner, [[1 - p, p], [q, 1 - q]])
    ch = chain(f, float(p), float(q), Operator[partner])
    table = ch.hitting_times()
    for (y, s), t in times.items():
        assert table[y, s] == pytest.approx(float(t), rel=1e-9)


def test_phase_outcome():
    ch = chain(make_onemax(6), 0.3, 0.4)
    law = exact_phase_outcome(ch, Operator.OI, 0)
    assert law[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        exact_phase_outcome(ch, Operator.OI, 7)
    with pytest.raises(ValueError):
        exact_phase_outcome(ch, Operator.AM, 3)


@pytest.mark.parametrize("n", [5, 10, 20])
def test_phase_outcome_cdf_vs_closed_form(n):
    f = make_onemax(n)
    for p in (0.5, 0.1, 1 / (n * math.log(n))):
        ch = chain(f, p, 0.5)
        for k in range(n + 1):
            cdf = np.cumsum(exact_phase_outcome(ch, Operator.OI, k))
            for h in range(n + 1):
                assert abs(cdf[h] - pkh_closed_form(n, p, k, h)) <= 1e-9
        ow = ExactChain.mmahh(f, MarkovParams(0.5, p, Operator.OW))
        for k in range(n + 1):
            law = exact_phase_outcome(ow, Operator.OW, n - k)
            for h in range(n + 1):
                assert abs(law[n - h:].sum() - pkh_ow_symmetric(n, p, k, h)) <= 1e-9


def test_phase_matrix_rows_sum_to_one():
    m = phase_matrix(make_jump(15, 4).better_below(), Operator.AM, 0.2)
    assert np.allclose(m.sum(axis=1), 1.0)
    with pytest.raises(ValueError):
        phase_matrix(make_jump(15, 4).better_below(), Operator.AM, 0.0)


def test_state_limit():
    with pytest.raises(ValueError):
        chain(make_onemax(DENSE_STATE_LIMIT // 2), 0.1, 0.1)


def test_start_distribution():
    ch = chain(make_onemax(8), 0.1, 0.2)
    dist = ch.start_distribution("uniform")
    assert dist.sum() == pytest.approx(1.0)
    assert dist[1::2].sum() == 0.0
    assert ExactChain.mahh(make_onemax(8), 0.25).start_distribution()[1::2].sum() == pytest.approx(0.25)
    with pytest.raises(ValueError):
        ch.start_distribution("random")
    with pytest.raises(ValueError):
        ch.start_distribution((3, Operator.AM))
