"""Parameter sweeps, CSV emission and sweep reports.

A sweep is described by a JSON document (see :data:`SWEEP_SCHEMA`).  Each
grid cell is one (benchmark, n, algorithm parameters) combination; trial
``i`` of every cell uses the random stream ``(seed, i)``, so a row can be
reproduced on its own from the recorded parameters and base seed.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import jsonschema

from .acceptance import MarkovParams, Operator
from .benchmarks import UnitationFunction, make_function, random_seqopt, seqopt_parameters
from .bitstring import random_source
from .engine import DEFAULT_BUDGET, EngineConfig, TrialSummary, run_trials
from .exact import bound_jump_oi_am, bound_seqopt
from .stats import MODELS, fit_exponent

log = logging.getLogger(__name__)

ALGORITHMS = ("mmahh_oi_ow", "mmahh_oi_am", "mahh")
FAMILIES = ("onemax", "jump", "cliff", "trap", "seqopt")
PRESETS = ("quasilinear", "thm1-case1", "thm1-case2", "inverse-n")
CSV_COLUMNS = (
    "family", "n", "params", "algo", "p", "q", "trials", "successes",
    "mean_T", "sd_T", "ci95_lo", "ci95_hi", "seed",
)

# stream index reserved for drawing random SEQOPT instances
FUNCTION_STREAM = 2**32

SWEEP_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "SweepSpec",
    "type": "object",
    "required": ["family", "n", "algo", "rule"],
    "additionalProperties": False,
    "properties": {
        "family": {"enum": list(FAMILIES)},
        "n": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "m": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1,
              "description": "jump gap sizes"},
        "d": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1,
              "description": "cliff positions"},
        "optima": {"type": "array", "minItems": 1,
                   "items": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                   "description": "interior optima vectors for random SEQOPT instances"},
        "algo": {"enum": list(ALGORITHMS)},
        "rule": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "preset": {"enum": list(PRESETS)},
                "c": {"type": "number", "exclusiveMinimum": 0},
                "d": {"type": "number", "exclusiveMinimum": 0},
                "p": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "q": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "mixing": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            },
        },
        "trials": {"type": "integer", "minimum": 1, "default": 100},
        "budget": {"type": "integer", "minimum": 1, "default": DEFAULT_BUDGET},
        "seed": {"type": "integer", "minimum": 0, "default": 0},
        "initial": {"oneOf": [{"const": "uniform"}, {"type": "integer", "minimum": 0}], "default": "uniform"},
        "method": {"enum": ["events", "iterate", "bits"], "default": "events"},
        "out": {"type": "string"},
    },
}


class ConfigError(ValueError):
    """Invalid sweep configuration."""


@dataclass(frozen=True)
class SweepSpec:
    family: str
    n: tuple[int, ...]
    algo: str
    rule: dict
    m: tuple[int, ...] = ()
    d: tuple[int, ...] = ()
    optima: tuple[tuple[int, ...], ...] = ()
    trials: int = 100
    budget: int = DEFAULT_BUDGET
    seed: int = 0
    initial: str | int = "uniform"
    method: str = "events"
    out: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        try:
            jsonschema.validate(data, SWEEP_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(map(str, exc.absolute_path)) or "<root>"
            raise ConfigError(f"{where}: {exc.message}") from None
        spec = cls(
            family=data["family"],
            n=tuple(data["n"]),
            algo=data["algo"],
            rule=dict(data["rule"]),
            m=tuple(data.get("m", ())),
            d=tuple(data.get("d", ())),
            optima=tuple(tuple(v) for v in data.get("optima", ())),
            trials=data.get("trials", 100),
            budget=data.get("budget", DEFAULT_BUDGET),
            seed=data.get("seed", 0),
            initial=data.get("initial", "uniform"),
            method=data.get("method", "events"),
            out=data.get("out"),
        )
        spec._check()
        return spec

    @classmethod
    def load(cls, path) -> "SweepSpec":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_dict(data)

    def _check(self):
        grid = {"jump": ("m", self.m), "cliff": ("d", self.d), "seqopt": ("optima", self.optima)}
        if self.family in grid:
            name, values = grid[self.family]
            if not values:
                raise ConfigError(f"family {self.family} needs a non-empty '{name}' grid")
        rule = self.rule
        preset = rule.get("preset")
        if self.algo == "mahh":
            if preset not in (None, "inverse-n") or ("mixing" in rule) == (preset is not None):
                raise ConfigError("mahh needs either rule.mixing or rule.preset='inverse-n'")
        else:
            explicit = "p" in rule and "q" in rule
            if preset is None and not explicit:
                raise ConfigError("mmahh rules need a preset or explicit p and q")
            if preset == "inverse-n":
                raise ConfigError("preset 'inverse-n' applies to mahh only")
            if preset is not None and ("p" in rule or "q" in rule):
                raise ConfigError("give either a preset or explicit p/q, not both")
            if preset in ("thm1-case1", "thm1-case2") and self.family != "jump":
                raise ConfigError(f"preset {preset} is defined for the jump family only")

    def to_dict(self) -> dict:
        out = {
            "family": self.family, "n": list(self.n), "algo": self.algo, "rule": dict(self.rule),
            "trials": self.trials, "budget": self.budget, "seed": self.seed,
            "initial": self.initial, "method": self.method,
        }
        for key in ("m", "d"):
            if getattr(self, key):
                out[key] = list(getattr(self, key))
        if self.optima:
            out["optima"] = [list(v) for v in self.optima]
        if self.out is not None:
            out["out"] = self.out
        return out


@dataclass(frozen=True)
class Cell:
    family: str
    n: int
    label: str
    function_params: dict
    algo: str
    p: float | None
    q: float | None


def preset_parameters(preset: str, n: int, m: int | None = None, c: float | None = None,
                      d: float | None = None) -> tuple[float, float]:
    """``(p, q)`` for a named regime; for ``inverse-n`` both entries hold the mixing probability.

    ``quasilinear``: ``p = q = 1/(c n ln n)``, ``c = 1``;
    ``thm1-case1``: ``q = 1/2``, ``p = m q/(c n)``, ``c = 2``;
    ``thm1-case2``: ``q = 1/(d m)``, ``p = m q/(c n)``, ``c = 2``, ``d = 1``;
    ``inverse-n``: ``1/(c n)``, ``c = 1``.
    """
    if preset == "quasilinear":
        c = 1.0 if c is None else c
        if n < 2:
            raise ValueError("quasilinear preset needs n >= 2")
        p = 1.0 / (c * n * math.log(n))
        return p, p
    if preset in ("thm1-case1", "thm1-case2"):
        if m is None:
            raise ValueError(f"preset {preset} needs m")
        c = 2.0 if c is None else c
        q = 0.5 if preset == "thm1-case1" else 1.0 / ((1.0 if d is None else d) * m)
        return m * q / (c * n), q
    if preset == "inverse-n":
        c = 1.0 if c is None else c
        return 1.0 / (c * n), 1.0 / (c * n)
    raise ValueError(f"unknown preset {preset!r}")


def _format_params(params: dict) -> str:
    parts = []
    for key, value in params.items():
        parts.append(f"{key}={'/'.join(map(str, value)) if isinstance(value, tuple) else value}")
    return ";".join(parts)


def _function_grid(spec: SweepSpec, n: int) -> Iterable[dict]:
    if spec.family == "jump":
        return ({"m": m} for m in spec.m)
    if spec.family == "cliff":
        return ({"d": d} for d in spec.d)
    if spec.family == "seqopt":
        return ({"d": v} for v in spec.optima)
    return ({},)


def build_function(family: str, n: int, params: dict, seed: int) -> UnitationFunction:
    if family == "seqopt":
        return random_seqopt(n, params["d"], random_source(seed, FUNCTION_STREAM))
    return make_function(family, n, **params)


def expand_cells(spec: SweepSpec) -> list[tuple[Cell, str | None]]:
    """All grid cells in output order, paired with a skip reason (``None`` if runnable)."""
    out = []
    rule = spec.rule
    for n, params in ((n, params) for n in spec.n for params in _function_grid(spec, n)):
        reason = None
        p = q = None
        try:
            build_function(spec.family, n, params, spec.seed)
            if spec.initial != "uniform" and not 0 <= spec.initial <= n:
                raise ValueError(f"initial layer {spec.initial} outside [0, {n}]")
            if "preset" in rule:
                p, q = preset_parameters(rule["preset"], n, params.get("m"), rule.get("c"), rule.get("d"))
            elif spec.algo == "mahh":
                p = q = rule["mixing"]
            else:
                p, q = rule["p"], rule["q"]
            if spec.algo == "mahh":
                q = None
                if not 0 < p < 1:
                    raise ValueError(f"mixing probability {p} outside (0, 1)")
            else:
                MarkovParams(p, q)
        except (ValueError, KeyError) as exc:
            reason = str(exc)
        out.append((Cell(spec.family, n, _format_params(params), params, spec.algo, p, q), reason))
    return out


def engine_config(spec: SweepSpec, cell: Cell) -> EngineConfig:
    f = build_function(cell.family, cell.n, cell.function_params, spec.seed)
    common = dict(initial=spec.initial, max_iterations=spec.budget, seed=spec.seed, method=spec.method)
    if cell.algo == "mahh":
        return EngineConfig(f, mixing=cell.p, **common)
    partner = Operator.OW if cell.algo == "mmahh_oi_ow" else Operator.AM
    return EngineConfig(f, params=MarkovParams(cell.p, cell.q, partner), **common)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_row(spec: SweepSpec, cell: Cell, summary: TrialSummary) -> dict:
    return {
        "family": cell.family, "n": cell.n, "params": cell.label, "algo": cell.algo,
        "p": cell.p, "q": cell.q, "trials": summary.trials, "successes": summary.successes,
        "mean_T": summary.mean_T, "sd_T": summary.sd_T,
        "ci95_lo": summary.ci95[0], "ci95_hi": summary.ci95[1], "seed": spec.seed,
    }


def format_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def run_sweep(spec: SweepSpec, parallel: int = 1) -> list[dict]:
    """Simulate every runnable cell; skipped and failed cells are logged and left out."""
    rows = []
    cells = expand_cells(spec)
    if not any(reason is None for _, reason in cells):
        raise ConfigError("no runnable grid cells")
    for cell, reason in cells:
        if reason is not None:
            log.warning("skipping %s n=%d %s: %s", cell.family, cell.n, cell.label, reason)
            continue
        try:
            _, summary = run_trials(engine_config(spec, cell), spec.trials, parallel)
        except Exception as exc:  # a failing cell must not stop the sweep
            log.error("cell %s n=%d %s failed: %s", cell.family, cell.n, cell.label, exc)
            continue
        rows.append(csv_row(spec, cell, summary))
        log.info("%s n=%d %s %s: %d/%d hits, mean T %.6g", cell.family, cell.n, cell.label, cell.algo,
                 summary.successes, summary.trials, summary.mean_T)
    return rows


# ---------------------------------------------------------------------------
# sweep report


def read_csv(path_or_text) -> list[dict]:
    text = str(path_or_text)
    if not text.startswith("family,"):
        text = Path(text).read_text()
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ConfigError(f"CSV header {reader.fieldnames} does not match {list(CSV_COLUMNS)}")
    rows = []
    for raw in reader:
        try:
            rows.append({
                **raw,
                "n": int(raw["n"]),
                "p": float(raw["p"]) if raw["p"] else None,
                "q": float(raw["q"]) if raw["q"] else None,
                "trials": int(raw["trials"]),
                "successes": int(raw["successes"]),
                "mean_T": float(raw["mean_T"]),
                "seed": int(raw["seed"]),
            })
        except ValueError as exc:
            raise ConfigError(f"malformed CSV row {raw}: {exc}") from None
    return rows


def parse_params(label: str, family: str = "") -> dict:
    """Inverse of the ``params`` column; SEQOPT optima come back as tuples."""
    out = {}
    for part in filter(None, label.split(";")):
        key, _, value = part.partition("=")
        values = tuple(int(v) for v in value.split("/"))
        out[key] = values if family == "seqopt" else values[0]
    return out


def bound_for_row(row: dict) -> float | None:
    """Scaling term of the runtime bound matching the row, if any."""
    n, family = row["n"], row["family"]
    params = parse_params(row["params"], family)
    if row["algo"] == "mmahh_oi_am" and family == "jump":
        return bound_jump_oi_am(n, params["m"], row["p"], row["q"]).value
    if row["algo"] == "mmahh_oi_ow" and n >= 2:
        if family == "seqopt":
            optima = params["d"]
        else:
            optima = seqopt_parameters(family, n, **params)
        return bound_seqopt(n, optima).value
    return None


DEFAULT_GROUPING = ("family", "params", "algo")


def sweep_report(rows: Sequence[dict], grouping: Sequence[str] = DEFAULT_GROUPING,
                 model: str = "pure-power", min_success: float = 0.95) -> dict:
    """Per-group exponent fits with bound ratios."""
    if model not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}")
    for key in grouping:
        if key not in CSV_COLUMNS:
            raise ConfigError(f"cannot group by {key!r}")
    groups = {}
    for row in rows:
        groups.setdefault(tuple(str(row[k]) for k in grouping), []).append(row)
    report = {"grouping": list(grouping), "model": model, "groups": []}
    for key, members in groups.items():
        usable = [r for r in members if r["trials"] and r["successes"] / r["trials"] >= min_success]
        if not usable:
            log.warning("group %s has no cell with success rate >= %g; omitted", key, min_success)
            continue
        entry = {"key": dict(zip(grouping, key)), "cells": [], "fit": None}
        for r in sorted(usable, key=lambda r: r["n"]):
            bound = bound_for_row(r)
            entry["cells"].append({
                "n": r["n"], "mean_T": r["mean_T"], "bound": bound,
                "ratio": r["mean_T"] / bound if bound else None,
            })
        ns = [c["n"] for c in entry["cells"]]
        if len(set(ns)) >= 3 and len(ns) == len(set(ns)):
            entry["fit"] = fit_exponent([(c["n"], c["mean_T"]) for c in entry["cells"]], model).to_dict()
        else:
            log.warning("group %s has fewer than 3 distinct n; no fit", key)
        ratios = [c["ratio"] for c in entry["cells"] if c["ratio"] is not None]
        if ratios:
            entry["ratio_spread"] = max(ratios) / min(ratios)
        report["groups"].append(entry)
    return report
