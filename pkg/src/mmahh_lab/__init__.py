"""Markov move-acceptance hyper-heuristics on functions of unitation."""
from .acceptance import MarkovParams, Operator, accept, next_operator, stationary_nonelitist_fraction
from .benchmarks import (
    UnitationFunction,
    check_seqopt,
    evaluate,
    make_cliff,
    make_function,
    make_jump,
    make_onemax,
    make_trap,
    random_seqopt,
    verify_seqopt,
)
from .bitstring import BitString, random_one_bit_flip, random_source, uniform_bitstring
from .engine import EngineConfig, RunResult, run, run_mahh, run_mmahh, run_trials

__all__ = [
    "BitString",
    "EngineConfig",
    "MarkovParams",
    "Operator",
    "RunResult",
    "UnitationFunction",
    "accept",
    "check_seqopt",
    "evaluate",
    "make_cliff",
    "make_function",
    "make_jump",
    "make_onemax",
    "make_trap",
    "next_operator",
    "random_one_bit_flip",
    "random_seqopt",
    "random_source",
    "run",
    "run_mahh",
    "run_mmahh",
    "run_trials",
    "stationary_nonelitist_fraction",
    "uniform_bitstring",
    "verify_seqopt",
]
