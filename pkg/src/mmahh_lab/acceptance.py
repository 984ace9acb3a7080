"""Acceptance operators and the two-state operator selector."""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .bitstring import RandomSource


class Operator(enum.IntEnum):
    OI = 0  # only improving
    AM = 1  # all moves
    OW = 2  # only worsening


PAIRINGS = {"oi_ow": Operator.OW, "oi_am": Operator.AM}


def accept(op: Operator, f_current: float, f_candidate: float) -> bool:
    """Acceptance decision; ties are rejected by OI and OW."""
    if op is Operator.OI:
        return f_candidate > f_current
    if op is Operator.OW:
        return f_candidate < f_current
    if op is Operator.AM:
        return True
    raise ValueError(f"unknown operator {op!r}")


@dataclass(frozen=True)
class MarkovParams:
    """Switching probabilities of the selector.

    ``p`` is the probability of leaving OI for the partner operator and ``q``
    the probability of returning from the partner to OI.
    """

    p: float
    q: float
    partner: Operator = Operator.OW

    def __post_init__(self):
        for name in ("p", "q"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {value}")
        if self.partner not in (Operator.AM, Operator.OW):
            raise ValueError(f"partner must be AM or OW, got {self.partner!r}")
        object.__setattr__(self, "partner", Operator(self.partner))

    @classmethod
    def from_pair(cls, pair: str, p: float, q: float) -> "MarkovParams":
        try:
            partner = PAIRINGS[pair]
        except KeyError:
            raise ValueError(f"operator pair must be one of {sorted(PAIRINGS)}, got {pair!r}") from None
        return cls(p, q, partner)

    @property
    def pair(self) -> str:
        return "oi_ow" if self.partner is Operator.OW else "oi_am"

    def switch_probability(self, op: Operator) -> float:
        if op is Operator.OI:
            return self.p
        if op is self.partner:
            return self.q
        raise ValueError(f"{op.name} is not part of the {self.pair} pairing")


def next_operator(op: Operator, params: MarkovParams, rng: RandomSource) -> Operator:
    """One step of the selector chain."""
    if rng.random() < params.switch_probability(op):
        return params.partner if op is Operator.OI else Operator.OI
    return op


def stationary_nonelitist_fraction(params: MarkovParams) -> float:
    """Long-run fraction of iterations spent with the partner operator."""
    return params.p / (params.p + params.q)
