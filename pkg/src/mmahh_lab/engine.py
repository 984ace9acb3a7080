"""Simulation of the Markov move-acceptance hyper-heuristic and the mixing baseline.

Three interchangeable back ends share one contract:

``"iterate"``
    compiled loop doing exactly one mutation, acceptance test and selector
    step per iteration;
``"events"``
    compiled event-driven loop (geometric waiting times between accepted
    moves and between switches), same law as ``"iterate"`` but far fewer
    random draws on long plateaus of rejected moves;
``"bits"``
    pure-Python reference working on real bit-strings through
    :func:`~mmahh_lab.benchmarks.evaluate` and
    :func:`~mmahh_lab.acceptance.accept`.

The mixing baseline (operator drawn independently each iteration) is run as
the selector chain whose two rows coincide, with the first operator drawn
from the same mixing law.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy import stats

from . import _kernels
from .acceptance import MarkovParams, Operator, accept, next_operator
from .benchmarks import UnitationFunction, evaluate
from .bitstring import BitString, RandomSource, random_one_bit_flip, random_source, uniform_bitstring

DEFAULT_BUDGET = 10**9
METHODS = ("events", "iterate", "bits")


@dataclass(frozen=True)
class EngineConfig:
    function: UnitationFunction
    params: MarkovParams | None = None
    mixing: float | None = None
    initial: str | int = "uniform"
    initial_operator: Operator = Operator.OI
    max_iterations: int = DEFAULT_BUDGET
    record_phases: bool = False
    trace_capacity: int = 0
    seed: int = 0
    stream: int = 0
    method: str = "events"

    def __post_init__(self):
        if (self.params is None) == (self.mixing is None):
            raise ValueError("give exactly one of params (Markov selector) or mixing (i.i.d. baseline)")
        if self.mixing is not None and not 0.0 < self.mixing < 1.0:
            raise ValueError(f"mixing probability must lie in (0, 1), got {self.mixing}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.initial != "uniform":
            if isinstance(self.initial, bool) or not isinstance(self.initial, (int, np.integer)):
                raise ValueError(f"initial must be 'uniform' or a layer, got {self.initial!r}")
            if not 0 <= self.initial <= self.function.n:
                raise ValueError(f"initial layer must lie in [0, {self.function.n}], got {self.initial}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.trace_capacity < 0:
            raise ValueError("trace_capacity must be non-negative")
        op = Operator(self.initial_operator)
        object.__setattr__(self, "initial_operator", op)
        if op is not Operator.OI and op is not self.partner:
            raise ValueError(f"initial operator {op.name} is not part of the configured pair")

    @property
    def partner(self) -> Operator:
        return self.params.partner if self.params is not None else Operator.AM

    @property
    def selector(self) -> tuple[float, float]:
        """``(leave_oi, stay_partner)`` probabilities of the selector chain."""
        if self.params is not None:
            return self.params.p, 1.0 - self.params.q
        return self.mixing, self.mixing


@dataclass(frozen=True)
class Phase:
    op: Operator
    start: int
    length: int
    start_layer: int


@dataclass
class RunResult:
    hit: bool
    T: int | None
    iterations_used: int
    initial_layer: int
    final_layer: int
    usage: dict[Operator, int]
    phases: list[Phase] | None = None
    layer_trace: np.ndarray | None = None
    trace_stride: int = 1

    @property
    def switch_times(self) -> list[int]:
        return [ph.start for ph in self.phases[1:]] if self.phases else []


@dataclass(frozen=True)
class TrialSummary:
    trials: int
    successes: int
    mean_T: float
    sd_T: float
    ci95: tuple[float, float]

    @property
    def failures(self) -> int:
        return self.trials - self.successes

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials

    @property
    def se_T(self) -> float:
        return self.sd_T / math.sqrt(self.successes) if self.successes > 1 else math.nan


def summarize(results: Sequence[RunResult]) -> TrialSummary:
    """Mean runtime over successful runs with a Student-t 95% interval."""
    times = np.array([r.T for r in results if r.hit], dtype=float)
    k = len(times)
    if k == 0:
        return TrialSummary(len(results), 0, math.nan, math.nan, (math.nan, math.nan))
    mean = float(times.mean())
    if k == 1:
        return TrialSummary(len(results), 1, mean, math.nan, (mean, mean))
    sd = float(times.std(ddof=1))
    half = float(stats.t.ppf(0.975, k - 1)) * sd / math.sqrt(k)
    return TrialSummary(len(results), k, mean, sd, (mean - half, mean + half))


def _initial_state(config: EngineConfig, rng: RandomSource) -> tuple[int, int]:
    n = config.function.n
    if config.initial == "uniform":
        y = n - int(rng.binomial(n, 0.5))
    else:
        y = int(config.initial)
    if config.mixing is not None:
        s = 1 if rng.random() < config.mixing else 0
    else:
        s = 0 if config.initial_operator is Operator.OI else 1
    return y, s


def _phases_from_switches(config, s0, y0, switch_t, switch_y, used) -> list[Phase]:
    ops = (Operator.OI, config.partner)
    starts = [0, *map(int, switch_t)]
    layers = [y0, *map(int, switch_y)]
    phases = []
    for k, start in enumerate(starts):
        end = starts[k + 1] if k + 1 < len(starts) else used
        if end > start:
            phases.append(Phase(ops[(s0 + k) % 2], start, end - start, layers[k]))
    return phases


def _run_compiled(config: EngineConfig, rng: RandomSource) -> RunResult:
    f = config.function
    better = f.better_below()
    y0, s0 = _initial_state(config, rng)
    leave_oi, stay = config.selector
    kernel = _kernels.run_events if config.method == "events" else _kernels.run_iterate
    state = np.array([y0, s0, 0, 0, 0], dtype=np.int64)
    usage = np.zeros(2, dtype=np.int64)
    size = 64 if config.record_phases else 0
    switch_t = np.zeros(size, dtype=np.int64)
    switch_y = np.zeros(size, dtype=np.int64)
    trace = np.zeros(config.trace_capacity, dtype=np.int64)
    meta = np.array([0, 1], dtype=np.int64)
    while True:
        status = kernel(rng, better, int(config.partner), leave_oi, stay, state,
                        config.max_iterations, usage, switch_t, switch_y, trace, meta)
        if status != _kernels.SWITCH_FULL:
            break
        switch_t = np.concatenate([switch_t, np.zeros_like(switch_t)])
        switch_y = np.concatenate([switch_y, np.zeros_like(switch_y)])
    y, used, k = int(state[0]), int(state[2]), int(state[3])
    hit = status == _kernels.HIT
    phases = None
    if config.record_phases:
        phases = _phases_from_switches(config, s0, y0, switch_t[:k], switch_y[:k], used)
    return RunResult(
        hit=hit,
        T=used if hit else None,
        iterations_used=used,
        initial_layer=y0,
        final_layer=y,
        usage={Operator.OI: int(usage[0]), config.partner: int(usage[1])},
        phases=phases,
        layer_trace=trace[: meta[0]].copy() if config.trace_capacity else None,
        trace_stride=int(meta[1]),
    )


def _run_bits(config: EngineConfig, rng: RandomSource) -> RunResult:
    """Reference loop on real bit-strings."""
    f = config.function
    n = f.n
    if config.initial == "uniform":
        x = uniform_bitstring(n, rng)
    else:
        x = BitString((1 << n) - (1 << int(config.initial)), n)  # zeros in the first y0 positions
    if config.mixing is not None:
        op = config.partner if rng.random() < config.mixing else Operator.OI
    else:
        op = config.initial_operator
    optimum = BitString.ones_string(n)
    y0 = n - x.ones
    s0 = 0 if op is Operator.OI else 1
    fx = evaluate(f, x)
    usage = {Operator.OI: 0, config.partner: 0}
    switches = []
    trace = []
    t = 0
    while x != optimum and t < config.max_iterations:
        if config.trace_capacity and len(trace) < config.trace_capacity:
            trace.append(n - x.ones)
        usage[op] += 1
        candidate = random_one_bit_flip(x, rng)
        fc = evaluate(f, candidate)
        if accept(op, fx, fc):
            x, fx = candidate, fc
        if config.params is not None:
            new_op = next_operator(op, config.params, rng)
        else:
            new_op = config.partner if rng.random() < config.mixing else Operator.OI
        t += 1
        if new_op is not op:
            switches.append((t, n - x.ones))
        op = new_op
    hit = x == optimum
    phases = None
    if config.record_phases:
        phases = _phases_from_switches(config, s0, y0, [a for a, _ in switches], [b for _, b in switches], t)
    return RunResult(
        hit=hit,
        T=t if hit else None,
        iterations_used=t,
        initial_layer=y0,
        final_layer=n - x.ones,
        usage=usage,
        phases=phases,
        layer_trace=np.array(trace, dtype=np.int64) if config.trace_capacity else None,
    )


def run(config: EngineConfig, rng: RandomSource | None = None) -> RunResult:
    """Run one trial; the stream defaults to ``(config.seed, config.stream)``."""
    if rng is None:
        rng = random_source(config.seed, config.stream)
    if config.method == "bits":
        return _run_bits(config, rng)
    return _run_compiled(config, rng)


def run_mmahh(config: EngineConfig, rng: RandomSource | None = None) -> RunResult:
    if config.params is None:
        raise ValueError("run_mmahh needs Markov selector params")
    return run(config, rng)


def run_mahh(config: EngineConfig, rng: RandomSource | None = None) -> RunResult:
    if config.mixing is None:
        raise ValueError("run_mahh needs a mixing probability")
    return run(config, rng)


def run_trials(config: EngineConfig, trials: int, parallel: int = 1) -> tuple[list[RunResult], TrialSummary]:
    """Independent trials; trial ``i`` uses the stream ``(config.seed, i)``.

    Results do not depend on ``parallel``: every trial owns its stream and the
    list is returned in trial order.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    configs = [replace(config, stream=i) for i in range(trials)]
    if parallel > 1 and config.method != "bits":
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(run, configs))
    else:
        results = [run(c) for c in configs]
    return results, summarize(results)


# ---------------------------------------------------------------------------
# phase-level measurements


@dataclass(frozen=True)
class Estimate:
    mean: float
    se: float
    samples: int


def _estimate(values: np.ndarray) -> Estimate:
    values = np.asarray(values, dtype=float)
    se = float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else math.nan
    return Estimate(float(values.mean()), se, len(values))


def simulate_phases(f: UnitationFunction, start_layer: int, ops: Sequence[Operator],
                    rates: Sequence[float], trials: int, rng: RandomSource, grace_oi: int = 0):
    """End layers of a fixed phase sequence; each phase makes at least one move
    attempt and ends after each attempt with its rate."""
    if not 0 <= start_layer <= f.n:
        raise ValueError(f"start layer must lie in [0, {f.n}], got {start_layer}")
    if len(ops) != len(rates) or not ops:
        raise ValueError("need one rate per phase")
    for r in rates:
        if not 0.0 < r <= 1.0:
            raise ValueError(f"rates must lie in (0, 1], got {r}")
    return _kernels.phase_ends(
        rng, f.better_below(), np.array([int(o) for o in ops], dtype=np.int64),
        np.array(rates, dtype=float), int(start_layer), int(trials), int(grace_oi),
    )


def measure_phase_drift(f: UnitationFunction, start_layer: int, op: Operator, rate: float,
                        trials: int, rng: RandomSource) -> Estimate:
    """Mean decrease of the layer over one phase of ``op`` with switch rate ``rate``."""
    ends, _ = simulate_phases(f, start_layer, [op], [rate], trials, rng)
    return _estimate(start_layer - ends[:, 0])


def measure_pair_drift(f: UnitationFunction, start_layer: int, p: float, q: float, trials: int,
                       rng: RandomSource, partner: Operator = Operator.AM) -> Estimate:
    """Mean decrease over a partner phase (rate ``q``) followed by an OI phase (rate ``p``)."""
    ends, _ = simulate_phases(f, start_layer, [partner, Operator.OI], [q, p], trials, rng)
    return _estimate(start_layer - ends[:, 1])


def measure_am_phase_success(f: UnitationFunction, start_layer: int, q: float, trials: int,
                             rng: RandomSource, grace: int = 1) -> Estimate:
    """Fraction of AM phases from ``start_layer`` that reach the optimum
    (including the first OI move after the phase when ``grace=1``)."""
    _, hits = simulate_phases(f, start_layer, [Operator.AM], [q], trials, rng, grace_oi=grace)
    return _estimate(hits.astype(float))


def measure_gap_drift(n: int, m: int, x_ones: int, partner_weight: float, trials: int,
                      rng: RandomSource) -> Estimate:
    """One-step decrease of the Jump potential from a string with ``x_ones`` ones,
    the operator being AM with probability ``partner_weight`` and OI otherwise."""
    from .benchmarks import make_jump
    from .exact import potential_d

    f = make_jump(n, m)
    values = np.asarray(f.values)
    y = n - x_ones
    use_am = rng.random(trials) < partner_weight
    zero_flip = rng.integers(0, n, size=trials) < y
    cand = np.where(zero_flip, y - 1, y + 1)
    improves = values[cand] > values[y]
    accepted = use_am | improves
    new_y = np.where(accepted, cand, y)
    d = np.array([potential_d(n - z, n, m) for z in range(n + 1)], dtype=float)
    return _estimate(d[y] - d[new_y])


@dataclass
class SelectorSample:
    oi_lengths: np.ndarray
    partner_lengths: np.ndarray
    partner_steps: int
    steps: int


def sample_selector(leave_oi: float, stay: float, steps: int, rng: RandomSource,
                    start: Operator = Operator.OI, max_phases: int = 10**7) -> SelectorSample:
    """Run the operator selector alone and collect completed phase lengths."""
    lengths = np.zeros(max_phases, dtype=np.int64)
    kinds = np.zeros(max_phases, dtype=np.int64)
    s = 0 if start is Operator.OI else 1
    k, partner_steps = _kernels.selector_run(rng, leave_oi, stay, s, int(steps), lengths, kinds)
    k = min(k, max_phases)
    lengths, kinds = lengths[:k], kinds[:k]
    return SelectorSample(lengths[kinds == 0], lengths[kinds == 1], int(partner_steps), int(steps))
