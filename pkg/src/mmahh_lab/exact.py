"""Closed-form quantities and an exact Markov-chain oracle.

The oracle works on the chain of ``(layer, operator)`` pairs.  For a
plateau-free function of unitation a one-bit flip from layer ``y`` moves to
``y - 1`` with probability ``y / n`` and to ``y + 1`` otherwise, and whether
the move is accepted depends only on the direction of the landscape between
the two layers.  Everything here is therefore a small linear solve.

Products of Gamma ratios are evaluated as sums of ``log1p`` terms; a direct
``gammaln`` evaluation is kept as an independent cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .acceptance import MarkovParams, Operator
from .benchmarks import UnitationFunction

DENSE_STATE_LIMIT = 4000


def _check_rate(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {value}")


# ---------------------------------------------------------------------------
# one-phase success probabilities on OneMax


def pkh_closed_form(n: int, p: float, k: int, h: int) -> float:
    """Probability that one OI phase started in layer ``k`` ends in a layer ``<= h``.

    Equal to ``1 / (1 - p) * prod_{j=h+1..k} j / (a + j)`` with
    ``a = n p / (1 - p)`` when ``k > h`` and to 1 otherwise.
    """
    _check_rate("p", p)
    if not (0 <= h <= n and 0 <= k <= n):
        raise ValueError(f"need 0 <= h, k <= n, got n={n}, k={k}, h={h}")
    if k <= h:
        return 1.0
    a = n * p / (1.0 - p)
    j = np.arange(h + 1, k + 1, dtype=float)
    log_value = -math.log1p(-p) - float(np.log1p(a / j).sum())
    # exact value is <= 1; rounding can overshoot by an ulp at k = n = h + 1
    return min(1.0, math.exp(log_value))


def pkh_gamma_ratio(n: int, p: float, k: int, h: int) -> float:
    """Same probability evaluated through ``gammaln`` (used to cross-check)."""
    _check_rate("p", p)
    if k <= h:
        return 1.0
    a = n * p / (1.0 - p)
    log_value = (
        -math.log1p(-p) + gammaln(k + 1) + gammaln(a + h + 1) - gammaln(h + 1) - gammaln(a + k + 1)
    )
    return float(math.exp(log_value))


def pkh_ow_symmetric(n: int, q: float, k: int, h: int) -> float:
    """Probability that one OW phase on OneMax started in layer ``n - k`` ends
    in a layer ``>= n - h``.  By symmetry it is the OI formula with rate ``q``.
    """
    return pkh_closed_form(n, q, k, h)


def p0n_at(n: int, c: float) -> float:
    """Probability of optimising OneMax from all-zeros in one OI phase with
    ``p = 1 / (c n ln n)``."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    return pkh_closed_form(n, 1.0 / (c * n * math.log(n)), n, 0)


# ---------------------------------------------------------------------------
# phase drifts on OneMax


def drift_am(n: int, q: float, i: float) -> float:
    """Expected decrease of the distance over one AM phase started at distance ``i``."""
    return (2 * i - n) / (2 + q * (n - 2))


def drift_oi(n: int, p: float, i: float) -> float:
    """Expected decrease of the distance over one OI phase started at distance ``i``."""
    return i / (1 + p * (n - 1))


def drift_am_oi(n: int, p: float, q: float, i: float) -> float:
    """Expected decrease over an AM phase followed by an OI phase.

    The OI drift is affine in the start distance, so it is evaluated at the
    expected distance after the AM phase.
    """
    after_am = drift_am(n, q, i)
    return after_am + drift_oi(n, p, i - after_am)


def drift_am_oi_expanded(n: int, p: float, q: float, i: float, m: float = 0.0) -> float:
    """Expanded form of :func:`drift_am_oi` at start distance ``i + m``."""
    num = (i + m) * (2 + q * (n - 2) + 2 * p * (n - 1)) - n * p * (n - 1)
    return num / ((1 + p * (n - 1)) * (2 + q * (n - 2)))


def am_phase_success_lower_bound(n: int, m: int, q: float) -> float:
    """Lower bound on reaching the optimum in one AM phase from layer ``m`` of Jump_m."""
    if not 2 <= m < n:
        raise ValueError(f"need 2 <= m < n, got n={n}, m={m}")
    _check_rate("q", q)
    return (1 - q) ** (m - 2) * math.exp(gammaln(m + 1) - m * math.log(n))


def potential_d(x_ones: int, n: int, m: int) -> int:
    """Distance to the local-optimum set of Jump_m, zero at the optimum."""
    if not 0 <= x_ones <= n:
        raise ValueError(f"x_ones must lie in [0, {n}], got {x_ones}")
    return 0 if x_ones == n else abs(n - m - x_ones)


def gap_drift_lower_bound(n: int, m: int, x_ones: int) -> float:
    """Lower bound ``2 d(x) / n`` on the one-step potential drift in the Jump gap."""
    if not n - m < x_ones < n:
        raise ValueError(f"x_ones={x_ones} is outside the gap ({n - m}, {n})")
    return 2 * potential_d(x_ones, n, m) / n


def exact_gap_drift(n: int, m: int, x_ones: int, op: Operator) -> float:
    """Exact one-step expected decrease of :func:`potential_d` on Jump_m."""
    from .benchmarks import make_jump

    f = make_jump(n, m)
    y = n - x_ones
    move = move_matrix(f.better_below(), op)
    d = np.array([potential_d(n - z, n, m) for z in range(n + 1)], dtype=float)
    return float(d[y] - move[y] @ d)


# ---------------------------------------------------------------------------
# bound evaluators


@dataclass(frozen=True)
class BoundReport:
    value: float
    term: float
    params: dict
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"value": self.value, "term": self.term, "params": self.params, "violations": list(self.violations)}


def jump_excursion_count(n: int, m: int, q: float, exponent: int | None = None) -> float:
    """``n + n^m / ((m - 1)! (1 - q)^e)`` with ``e = m - 2`` by default."""
    e = m - 2 if exponent is None else exponent
    return n + math.exp(m * math.log(n) - gammaln(m) - e * math.log1p(-q))


def bound_jump_oi_am(n: int, m: int, p: float, q: float, exponent: int | None = None) -> BoundReport:
    """Scaling term ``(1 + p n)(1/p + 1/q) N_{n,m,q}`` for OI+AM on Jump_m."""
    _check_rate("p", p)
    _check_rate("q", q)
    violations = []
    if not 1 < m < n / 2:
        violations.append(f"requires 1 < m < n/2 (n={n}, m={m})")
    if n < 3:
        violations.append(f"requires n >= 3 (n={n})")
    if 2 * m < n and m / (2 * (n - 2 * m)) * (q + 4 / n) < p:
        violations.append("requires m/(2(n-2m)) (q + 4/n) >= p")
    count = jump_excursion_count(n, m, q, exponent)
    value = (1 + p * n) * (1 / p + 1 / q) * count
    params = {"n": n, "m": m, "p": p, "q": q, "exponent": m - 2 if exponent is None else exponent}
    return BoundReport(value, count, params, tuple(violations))


def bound_seqopt(n: int, optima: Sequence[int]) -> BoundReport:
    """Scaling term ``n^{k+1} ln(n) / (d_1 ... d_k)`` for OI+OW on SEQOPT_k."""
    optima = tuple(int(d) for d in optima)
    violations = []
    bounded = (n, *optima, 0)
    if any(a <= b for a, b in zip(bounded, bounded[1:])):
        violations.append(f"requires n > d_1 > ... > d_k > 0 (n={n}, d={list(optima)})")
    k = len(optima)
    log_value = (k + 1) * math.log(n) + math.log(math.log(n)) - sum(math.log(d) for d in optima)
    value = math.exp(log_value)
    return BoundReport(value, value, {"n": n, "d": list(optima), "k": k}, tuple(violations))


# ---------------------------------------------------------------------------
# exact chain


def move_probabilities(better_below: np.ndarray, op: Operator, y: int) -> tuple[float, float]:
    """Probabilities ``(down, up)`` that one flip from layer ``y`` is made and accepted."""
    n = len(better_below)
    down = up = 0.0
    if y > 0:
        # candidate y - 1 is fitter iff better_below[y - 1]
        fitter = bool(better_below[y - 1])
        if op is Operator.AM or (op is Operator.OI and fitter) or (op is Operator.OW and not fitter):
            down = y / n
    if y < n:
        fitter = not bool(better_below[y])
        if op is Operator.AM or (op is Operator.OI and fitter) or (op is Operator.OW and not fitter):
            up = (n - y) / n
    return down, up


def move_matrix(better_below: np.ndarray, op: Operator) -> np.ndarray:
    """One-iteration layer transition matrix under a fixed operator."""
    n = len(better_below)
    move = np.zeros((n + 1, n + 1))
    for y in range(n + 1):
        down, up = move_probabilities(better_below, op, y)
        if down:
            move[y, y - 1] = down
        if up:
            move[y, y + 1] = up
        move[y, y] = 1.0 - down - up
    return move


def phase_matrix(better_below: np.ndarray, op: Operator, rate: float) -> np.ndarray:
    """Law of the layer at the end of one phase of ``op`` (row = start layer).

    A phase of length ``Z ~ Geometric(rate)`` makes ``Z`` move attempts, so the
    end law is ``sum_l rate (1 - rate)^(l-1) M^l = rate M (I - (1 - rate) M)^-1``.
    """
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")
    move = move_matrix(better_below, op)
    size = move.shape[0]
    system = np.eye(size) - (1.0 - rate) * move
    # solve X (I - (1-r) M) = r M  <=>  (I - (1-r) M)^T X^T = r M^T
    return np.linalg.solve(system.T, rate * move.T).T


@dataclass(frozen=True)
class ExactChain:
    """Chain over ``(layer, operator)`` states for the selector-driven heuristic.

    ``switch[s, s']`` is the operator transition matrix with index 0 for OI and
    1 for the partner.  The i.i.d. mixing baseline is the special case whose
    rows are identical.
    """

    better_below: np.ndarray
    partner: Operator
    switch: np.ndarray
    initial_partner: float = 0.0
    label: str = ""
    kernel: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.better_below)
        if 2 * (n + 1) > DENSE_STATE_LIMIT:
            raise ValueError(
                f"{2 * (n + 1)} states exceed the dense-solve limit of {DENSE_STATE_LIMIT}; use simulation instead"
            )
        switch = np.asarray(self.switch, dtype=float)
        if switch.shape != (2, 2) or not np.allclose(switch.sum(axis=1), 1.0, atol=1e-15):
            raise ValueError("switch must be a 2x2 stochastic matrix")
        object.__setattr__(self, "switch", switch)
        object.__setattr__(self, "better_below", np.asarray(self.better_below, dtype=bool))
        ops = (Operator.OI, self.partner)
        moves = [move_matrix(self.better_below, op) for op in ops]
        kernel = np.zeros((2 * (n + 1), 2 * (n + 1)))
        for s in range(2):
            for s2 in range(2):
                kernel[s :: 2, s2 :: 2] = moves[s] * switch[s, s2]
        object.__setattr__(self, "kernel", kernel)

    @property
    def n(self) -> int:
        return len(self.better_below)

    @classmethod
    def mmahh(cls, f: UnitationFunction, params: MarkovParams) -> "ExactChain":
        switch = [[1 - params.p, params.p], [params.q, 1 - params.q]]
        return cls(f.better_below(), params.partner, np.array(switch), 0.0, f.label)

    @classmethod
    def mahh(cls, f: UnitationFunction, mixing: float, partner: Operator = Operator.AM) -> "ExactChain":
        _check_rate("mixing probability", mixing)
        switch = [[1 - mixing, mixing], [1 - mixing, mixing]]
        return cls(f.better_below(), partner, np.array(switch), mixing, f.label)

    def rate(self, op: Operator) -> float:
        """Probability of leaving ``op`` after an iteration."""
        if op is Operator.OI:
            return float(self.switch[0, 1])
        if op is self.partner:
            return float(self.switch[1, 0])
        raise ValueError(f"{op.name} is not part of this chain")

    def start_distribution(self, start="uniform") -> np.ndarray:
        """Initial law over states; ``start`` is ``"uniform"``, a layer, or ``(layer, op)``."""
        n = self.n
        dist = np.zeros(2 * (n + 1))
        op_law = np.array([1 - self.initial_partner, self.initial_partner])
        if isinstance(start, str):
            if start != "uniform":
                raise ValueError(f"unknown start {start!r}")
            ys = np.arange(n + 1)
            layer_law = np.exp(gammaln(n + 1) - gammaln(ys + 1) - gammaln(n - ys + 1) - n * math.log(2))
        else:
            if isinstance(start, tuple):
                y, op = start
                op_law = np.array([1.0, 0.0]) if Operator(op) is Operator.OI else np.array([0.0, 1.0])
                if Operator(op) not in (Operator.OI, self.partner):
                    raise ValueError(f"{Operator(op).name} is not part of this chain")
            else:
                y = start
            if not 0 <= y <= n:
                raise ValueError(f"start layer must lie in [0, {n}], got {y}")
            layer_law = np.zeros(n + 1)
            layer_law[y] = 1.0
        dist[0::2] = layer_law * op_law[0]
        dist[1::2] = layer_law * op_law[1]
        return dist

    def hitting_times(self) -> np.ndarray:
        """Expected iterations to reach layer 0 from every state, shape ``(n + 1, 2)``."""
        transient = slice(2, None)
        q = self.kernel[transient, transient]
        t = np.linalg.solve(np.eye(q.shape[0]) - q, np.ones(q.shape[0]))
        out = np.zeros((self.n + 1, 2))
        out[1:] = t.reshape(self.n, 2)
        return out


def exact_hitting_time(chain: ExactChain, start="uniform") -> float:
    """Expected runtime from ``start`` (see :meth:`ExactChain.start_distribution`)."""
    return float(chain.start_distribution(start) @ chain.hitting_times().ravel())


def exact_phase_outcome(chain: ExactChain, op: Operator, start_layer: int) -> np.ndarray:
    """Law of the layer at the first operator switch, starting in ``(start_layer, op)``."""
    n = chain.n
    if not 0 <= start_layer <= n:
        raise ValueError(f"start layer must lie in [0, {n}], got {start_layer}")
    law = phase_matrix(chain.better_below, op, chain.rate(op))[start_layer]
    if abs(law.sum() - 1.0) > 1e-10:
        raise ArithmeticError(f"phase law sums to {law.sum()}")
    return law


def phase_drift_exact(f: UnitationFunction, op: Operator, rate: float, start_layer: int) -> float:
    """Exact expected layer decrease over one phase of ``op``."""
    law = phase_matrix(f.better_below(), op, rate)[start_layer]
    return start_layer - float(law @ np.arange(f.n + 1))


def pair_drift_exact(f: UnitationFunction, p: float, q: float, start_layer: int, partner=Operator.AM) -> float:
    """Exact expected decrease over a partner phase followed by an OI phase."""
    bb = f.better_below()
    law = phase_matrix(bb, partner, q)[start_layer] @ phase_matrix(bb, Operator.OI, p)
    return start_layer - float(law @ np.arange(f.n + 1))


def am_phase_success_exact(f: UnitationFunction, q: float, start_layer: int, grace: int = 1) -> float:
    """Probability that the run started in ``(start_layer, AM)`` hits the optimum
    before the AM phase is over.

    With ``grace=1`` the first OI move after the phase also counts, matching a
    path whose last flip may be made by either operator; ``grace=0`` counts
    only hits during the phase itself.
    """
    bb = f.better_below()
    n = f.n
    am = move_matrix(bb, Operator.AM)
    oi = move_matrix(bb, Operator.OI)
    after = oi[:, 0] if grace else np.zeros(n + 1)
    # u[y] = sum_y' AM[y, y'] (1{y'=0} + 1{y'>0} ((1-q) u[y'] + q after[y']))
    a = np.eye(n) - (1 - q) * am[1:, 1:]
    b = am[1:, 0] + q * am[1:, 1:] @ after[1:]
    u = np.linalg.solve(a, b)
    return 1.0 if start_layer == 0 else float(u[start_layer - 1])
