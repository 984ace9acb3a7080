"""Functions of unitation: OneMax, Jump, Cliff, Trap and the SEQOPT family.

A function is stored as one value per layer, ``values[y]`` being the fitness
of every string at Hamming distance ``y`` from the all-ones optimum.  The
*optima layers* ``(n, d_1, ..., d_k, 0)`` are the layers where the direction
of the landscape flips; they are inferred from the values and cross-checked
against any sequence given explicitly.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .bitstring import BitString, RandomSource, distance_to_optimum

# smallest gap between adjacent layers produced by the random generator
MIN_LAYER_GAP = 2.0**-40


class LayerDirection(enum.Enum):
    INCREASING = "increasing-toward-optimum"
    DECREASING = "decreasing-toward-optimum"


@dataclass(frozen=True)
class SeqoptCheck:
    ok: bool
    violation: tuple[int, int] | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def _validate_optima(n: int, optima: Sequence[int]) -> tuple[int, ...]:
    optima = tuple(int(d) for d in optima)
    bounded = (n, *optima, 0)
    if any(a <= b for a, b in zip(bounded, bounded[1:])):
        raise ValueError(
            f"interior optima must satisfy n > d_1 > ... > d_k > 0, got {optima} for n={n}"
        )
    return optima


def check_seqopt(values: Sequence[float], optima: Sequence[int]) -> SeqoptCheck:
    """Check the SEQOPT_k(d_1..d_k) conditions on a per-layer value table.

    Blocks are scanned from layer ``n`` toward the optimum; block ``l``
    (layers ``d_l .. d_{l+1}``) must increase toward the optimum when
    ``k - l`` is even and decrease when it is odd.  The first offending
    adjacent pair is reported as ``(h + 1, h)``.
    """
    n = len(values) - 1
    optima = _validate_optima(n, optima)
    k = len(optima)
    v = np.asarray(values, dtype=float)
    if n >= 1 and not np.all(v[0] > v[1:]):
        worst = int(np.argmax(v[1:])) + 1
        return SeqoptCheck(False, (worst, 0), f"layer 0 is not the unique maximum (layer {worst})")
    bounds = (n, *optima, 0)
    for ell in range(k + 1):
        increasing = (k - ell) % 2 == 0
        for h in range(bounds[ell] - 1, bounds[ell + 1] - 1, -1):
            good = v[h] > v[h + 1] if increasing else v[h] < v[h + 1]
            if not good:
                want = "increase" if increasing else "decrease"
                return SeqoptCheck(
                    False, (h + 1, h), f"block {ell} should {want} toward the optimum at layers ({h + 1}, {h})"
                )
    return SeqoptCheck(True)


def infer_optima(values: Sequence[float]) -> tuple[int, ...]:
    """Interior layers where the direction of a plateau-free landscape flips."""
    v = np.asarray(values, dtype=float)
    n = len(v) - 1
    better = v[:-1] > v[1:]  # better[h]: layer h fitter than layer h + 1
    return tuple(h for h in range(n - 1, 0, -1) if better[h] != better[h - 1])


@dataclass(frozen=True)
class UnitationFunction:
    """Fitness depending only on the number of ones, stored per layer."""

    values: tuple[float, ...]
    label: str = ""
    optima: tuple[int, ...] | None = None

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if len(values) < 2:
            raise ValueError("need at least two layers (n >= 1)")
        if not all(math.isfinite(v) for v in values):
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", values)
        for h in range(len(values) - 1):
            if values[h] == values[h + 1]:
                raise ValueError(f"plateau between layers {h} and {h + 1}")
        inferred = infer_optima(values)
        if self.optima is not None and tuple(self.optima) != inferred:
            check = check_seqopt(values, self.optima)
            raise ValueError(f"values do not match optima {tuple(self.optima)}: {check.reason}")
        object.__setattr__(self, "optima", inferred)
        check = check_seqopt(values, inferred)
        if not check:
            raise ValueError(check.reason)

    @property
    def n(self) -> int:
        return len(self.values) - 1

    @property
    def k(self) -> int:
        return len(self.optima)

    @property
    def optima_layers(self) -> tuple[int, ...]:
        """``(d_0 = n, d_1, ..., d_k, d_{k+1} = 0)``."""
        return (self.n, *self.optima, 0)

    def better_below(self) -> np.ndarray:
        """``out[h]`` is True iff layer ``h`` is fitter than layer ``h + 1``."""
        v = np.asarray(self.values)
        return v[:-1] > v[1:]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "values": list(self.values),
            "optima_layers": list(self.optima_layers),
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "UnitationFunction":
        values = data["values"]
        if "n" in data and int(data["n"]) != len(values) - 1:
            raise ValueError(f"n={data['n']} but {len(values)} values")
        optima = None
        if data.get("optima_layers") is not None:
            layers = [int(d) for d in data["optima_layers"]]
            if len(layers) < 2 or layers[0] != len(values) - 1 or layers[-1] != 0:
                raise ValueError(f"optima_layers must run from n to 0, got {layers}")
            optima = tuple(layers[1:-1])
        return cls(tuple(values), label=data.get("label", ""), optima=optima)


def save_function(f: UnitationFunction, path) -> None:
    Path(path).write_text(json.dumps(f.to_dict(), indent=2) + "\n")


def load_function(path) -> UnitationFunction:
    return UnitationFunction.from_dict(json.loads(Path(path).read_text()))


def _from_ones(n: int, fitness, label: str) -> UnitationFunction:
    # fitness is given as a function of the number of ones
    return UnitationFunction(tuple(fitness(n - y) for y in range(n + 1)), label=label)


def make_onemax(n: int) -> UnitationFunction:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return _from_ones(n, lambda ones: ones, f"onemax(n={n})")


def make_jump(n: int, m: int) -> UnitationFunction:
    if n < 1 or not 1 <= m <= n:
        raise ValueError(f"jump needs 1 <= m <= n, got n={n}, m={m}")

    def fitness(ones):
        return m + ones if ones <= n - m or ones == n else n - ones

    return _from_ones(n, fitness, f"jump(n={n}, m={m})")


def make_cliff(n: int, d: int) -> UnitationFunction:
    if not 1 <= d <= n - 1:
        raise ValueError(f"cliff needs 1 <= d <= n - 1, got n={n}, d={d}")
    return _from_ones(n, lambda ones: ones if ones <= n - d else ones - d + 0.5, f"cliff(n={n}, d={d})")


def make_trap(n: int) -> UnitationFunction:
    if n < 2:
        raise ValueError(f"trap needs n >= 2, got {n}")
    f = make_jump(n, n)
    return UnitationFunction(f.values, label=f"trap(n={n})")


def evaluate(f: UnitationFunction, x: BitString) -> float:
    if x.n != f.n:
        raise ValueError(f"string length {x.n} does not match function length {f.n}")
    return f.values[distance_to_optimum(x)]


def verify_seqopt(f: UnitationFunction, optima: Sequence[int]) -> SeqoptCheck:
    """Whether ``f`` lies in SEQOPT_k(d_1..d_k) for ``optima = (d_1..d_k)``."""
    return check_seqopt(f.values, optima)


def random_seqopt(n: int, optima: Sequence[int], rng: RandomSource, label: str = "") -> UnitationFunction:
    """Random member of SEQOPT_k(d_1..d_k).

    Values are built from layer ``n`` toward the optimum with increments drawn
    uniformly from (0, 1] (floored at ``MIN_LAYER_GAP``); the optimum is then
    lifted above every other layer.
    """
    optima = _validate_optima(n, optima)
    k = len(optima)
    bounds = (n, *optima, 0)
    values = np.zeros(n + 1)
    for ell in range(k + 1):
        sign = 1.0 if (k - ell) % 2 == 0 else -1.0
        for h in range(bounds[ell] - 1, bounds[ell + 1] - 1, -1):
            step = max(1.0 - rng.random(), MIN_LAYER_GAP)
            values[h] = values[h + 1] + sign * step
    rest = values[1:].max()
    if values[0] <= rest:
        values[0] = rest + max(1.0 - rng.random(), MIN_LAYER_GAP)
    label = label or f"seqopt(n={n}, d={list(optima)})"
    return UnitationFunction(tuple(values), label=label, optima=optima)


def layer_direction(f: UnitationFunction, h: int) -> LayerDirection:
    """Direction of ``f`` between layers ``h + 1`` and ``h``."""
    if not 0 <= h <= f.n - 1:
        raise ValueError(f"h must lie in [0, {f.n - 1}], got {h}")
    a, b = f.values[h], f.values[h + 1]
    if a == b:
        raise ValueError(f"plateau between layers {h} and {h + 1}")
    return LayerDirection.INCREASING if a > b else LayerDirection.DECREASING


def seqopt_parameters(family: str, n: int, **params) -> tuple[int, ...]:
    """Interior optima of the classic benchmarks as SEQOPT members."""
    if family == "onemax":
        return ()
    if family == "jump":
        m = params["m"]
        if m == 1:
            return ()
        return (1,) if m == n else (m, 1)
    if family == "trap":
        return (1,)
    if family == "cliff":
        d = params["d"]
        return () if d == 1 else (d, d - 1)
    raise ValueError(f"unknown family {family!r}")


def make_function(family: str, n: int, **params) -> UnitationFunction:
    """Build a benchmark by family name (``onemax``, ``jump``, ``cliff``, ``trap``)."""
    if family == "onemax":
        return make_onemax(n)
    if family == "jump":
        return make_jump(n, params["m"])
    if family == "cliff":
        return make_cliff(n, params["d"])
    if family == "trap":
        return make_trap(n)
    raise ValueError(f"unknown family {family!r}")
