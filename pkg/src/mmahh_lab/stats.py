"""Exponent fitting for runtime sweeps."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

MODELS = ("pure-power", "power-times-log")


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit of ``log T = alpha * log n + beta``.

    With ``model="power-times-log"`` the response is ``log T - log log n``,
    i.e. ``T ~ e^beta * n^alpha * ln n``.
    """

    alpha: float
    beta: float
    residual_norm: float
    model: str
    points: tuple[tuple[float, float], ...] = field(default=())

    def predict(self, n: float) -> float:
        extra = math.log(n) if self.model == "power-times-log" else 1.0
        return math.exp(self.beta) * n**self.alpha * extra

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "residual_norm": self.residual_norm,
            "model": self.model,
            "points": [list(p) for p in self.points],
        }


def fit_exponent(points: Sequence[tuple[float, float]], model: str = "pure-power") -> FitResult:
    """Fit the growth exponent of ``mean_T`` in ``n`` by OLS on log scales.

    Parameters
    ----------
    points : sequence of (n, mean_T)
        At least three points with distinct ``n``; ``n > 1`` is required for
        the log-corrected model.
    model : {"pure-power", "power-times-log"}

    Returns
    -------
    FitResult
    """
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    pts = [(float(n), float(t)) for n, t in points]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points, got {len(pts)}")
    ns = np.array([n for n, _ in pts])
    ts = np.array([t for _, t in pts])
    if len(set(ns.tolist())) != len(ns):
        raise ValueError("n values must be distinct")
    if np.any(ns <= 0) or np.any(ts <= 0) or not np.all(np.isfinite(ts)):
        raise ValueError("n and mean_T must be positive and finite")
    x = np.log(ns)
    yv = np.log(ts)
    if model == "power-times-log":
        if np.any(ns <= 1):
            raise ValueError("power-times-log needs n > 1")
        yv = yv - np.log(x)
    design = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, yv, rcond=None)
    resid = float(np.linalg.norm(design @ coef - yv))
    return FitResult(float(coef[0]), float(coef[1]), resid, model, tuple(pts))
